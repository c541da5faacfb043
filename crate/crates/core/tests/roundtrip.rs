use proptest::prelude::*;

use subthz_chan::ingest_campaign;
use subthz_chan::measurement::{write_campaign, AntennaConfig, DirectionalPdp, LocationMeasurement, Polarization};

fn location(idx: usize, pol: Polarization, sweeps: Vec<(u8, u8, Vec<f64>)>, start: u16) -> LocationMeasurement {
    LocationMeasurement {
        tx_id: format!("TX{idx}"),
        rx_id: format!("RX{idx}"),
        tx_pos_m: [0.0, 0.0, 3.0],
        rx_pos_m: [5.0 + idx as f64, 2.0, 1.5],
        polarization: pol,
        los: idx.is_multiple_of(2),
        sweeps: sweeps
            .into_iter()
            .map(|(t, r, p)| {
                let delays = (0..p.len()).map(|k| 2.0 * (start as f64 + k as f64)).collect();
                DirectionalPdp::new(t as f64 * 8.0, r as f64 * 8.0, delays, p, -97.25).unwrap()
            })
            .collect(),
        tx_antenna: AntennaConfig::default_tx(),
        rx_antenna: AntennaConfig::default_rx(),
        tx_power_dbm: 3.5,
    }
}

fn sweeps() -> impl Strategy<Value = Vec<(u8, u8, Vec<f64>)>> {
    prop::collection::btree_map((0u8..45, 0u8..45), prop::collection::vec(-130.0f64..-20.0, 1..12), 1..6)
        .prop_map(|m| m.into_iter().map(|((t, r), p)| (t, r, p)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn write_then_ingest_is_identity(
        locs in prop::collection::vec((sweeps(), 0u16..200, any::<bool>()), 1..5),
    ) {
        let original: Vec<_> = locs
            .into_iter()
            .enumerate()
            .map(|(i, (s, start, vh))| location(i, if vh { Polarization::VH } else { Polarization::VV }, s, start))
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_campaign(dir.path(), "rt", 142e9, 2.0, &original).unwrap();
        let c = ingest_campaign(&manifest).unwrap();
        prop_assert_eq!(c.locations, original);
    }
}
