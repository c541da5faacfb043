//! Measurement data model shared by every analysis stage.
//!
//! A campaign is a set of [`LocationMeasurement`]s, one per TX-RX pair and
//! polarization. Each location carries the directional power delay profiles
//! recorded while both horns were stepped through the azimuth plane.
//!
//! Azimuths follow the mathematical convention: degrees counter-clockwise
//! from the +x axis of the campaign coordinate frame, wrapped to `[0, 360)`.

mod io;

pub use io::{ingest_campaign, write_campaign, Campaign, CampaignManifest, ManifestAntenna, ManifestLocation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::wrap_360;

/// Close-in reference distance, meters.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

/// Sounder multipath resolution, nanoseconds.
pub const DEFAULT_DELAY_RESOLUTION_NS: f64 = 2.0;

/// Default carrier, hertz.
pub const DEFAULT_CARRIER_HZ: f64 = 142e9;

/// Largest path loss the sounder can resolve, dB.
pub const DEFAULT_MAX_MEASURABLE_PL_DB: f64 = 152.0;

const GRID_TOLERANCE_NS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AntennaConfig {
    pub gain_dbi: f64,
    pub hpbw_deg: f64,
    pub az_step_deg: f64,
    pub height_m: f64,
}

impl AntennaConfig {
    /// 27 dBi horn with an 8° beam stepped in 8° increments, mounted at `height_m`.
    pub fn horn(height_m: f64) -> Self {
        AntennaConfig {
            gain_dbi: 27.0,
            hpbw_deg: 8.0,
            az_step_deg: 8.0,
            height_m,
        }
    }

    pub fn default_tx() -> Self {
        Self::horn(3.0)
    }

    pub fn default_rx() -> Self {
        Self::horn(1.5)
    }

    /// Number of pointing directions in one azimuth sweep.
    pub fn directions_per_sweep(&self) -> usize {
        (360.0 / self.az_step_deg).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain_dbi > 0.0) {
            return Err(Error::validation(
                "gain_dbi",
                format!("must be > 0, got {}", self.gain_dbi),
            ));
        }
        if !(self.hpbw_deg > 0.0 && self.hpbw_deg <= self.az_step_deg && self.az_step_deg <= 360.0) {
            return Err(Error::validation(
                "hpbw_deg",
                format!(
                    "need 0 < hpbw_deg ({}) <= az_step_deg ({}) <= 360",
                    self.hpbw_deg, self.az_step_deg
                ),
            ));
        }
        let steps = 360.0 / self.az_step_deg;
        if (steps - steps.round()).abs() > 1e-9 {
            return Err(Error::validation(
                "az_step_deg",
                format!("{} does not divide 360", self.az_step_deg),
            ));
        }
        Ok(())
    }
}

impl Default for AntennaConfig {
    fn default() -> Self {
        Self::default_tx()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "VV")]
    VV,
    #[serde(rename = "VH")]
    VH,
}

impl Polarization {
    pub fn opposite(self) -> Self {
        match self {
            Polarization::VV => Polarization::VH,
            Polarization::VH => Polarization::VV,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarization::VV => "VV",
            Polarization::VH => "VH",
        }
    }
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "VV" => Ok(Polarization::VV),
            "VH" => Ok(Polarization::VH),
            other => Err(Error::validation(
                "polarization",
                format!("expected VV or VH, got {other:?}"),
            )),
        }
    }
}

/// A (TX azimuth, RX azimuth) pointing pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pointing {
    pub tx_az_deg: f64,
    pub rx_az_deg: f64,
}

impl Pointing {
    pub fn new(tx_az_deg: f64, rx_az_deg: f64) -> Self {
        Pointing { tx_az_deg, rx_az_deg }
    }

    /// Integer key in micro-degrees, used to match pointings across files.
    pub fn key(&self) -> (i64, i64) {
        let q = |a: f64| (wrap_360(a) * 1e6).round() as i64 % 360_000_000;
        (q(self.tx_az_deg), q(self.rx_az_deg))
    }
}

/// One power delay profile recorded at a fixed pointing pair.
///
/// After [`threshold_pdp`] the delay grid may have holes: absent bins are
/// simply not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionalPdp {
    pub tx_az_deg: f64,
    pub rx_az_deg: f64,
    pub delays_ns: Vec<f64>,
    pub powers_db: Vec<f64>,
    pub noise_floor_db: f64,
}

impl DirectionalPdp {
    pub fn new(
        tx_az_deg: f64,
        rx_az_deg: f64,
        delays_ns: Vec<f64>,
        powers_db: Vec<f64>,
        noise_floor_db: f64,
    ) -> Result<Self> {
        let pdp = DirectionalPdp {
            tx_az_deg,
            rx_az_deg,
            delays_ns,
            powers_db,
            noise_floor_db,
        };
        pdp.validate_shape()?;
        Ok(pdp)
    }

    pub fn pointing(&self) -> Pointing {
        Pointing::new(self.tx_az_deg, self.rx_az_deg)
    }

    pub fn len(&self) -> usize {
        self.delays_ns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delays_ns.is_empty()
    }

    /// `(delay_ns, power_db)` pairs.
    pub fn taps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.delays_ns.iter().copied().zip(self.powers_db.iter().copied())
    }

    pub fn peak_db(&self) -> Option<f64> {
        self.powers_db.iter().copied().reduce(f64::max)
    }

    /// True when the strongest bin rises above the noise floor.
    pub fn is_detectable(&self) -> bool {
        self.peak_db().is_some_and(|p| p > self.noise_floor_db)
    }

    /// Taps at or above the noise floor.
    pub fn above_noise(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.taps().filter(move |&(_, p)| p >= self.noise_floor_db)
    }

    /// Structural checks that hold for raw and thresholded profiles alike.
    pub fn validate_shape(&self) -> Result<()> {
        for (name, az) in [("tx_az_deg", self.tx_az_deg), ("rx_az_deg", self.rx_az_deg)] {
            if !(0.0..360.0).contains(&az) {
                return Err(Error::validation(name, format!("{az} outside [0, 360)")));
            }
        }
        if self.delays_ns.len() != self.powers_db.len() {
            return Err(Error::validation(
                "powers_db",
                format!("{} powers for {} delays", self.powers_db.len(), self.delays_ns.len()),
            ));
        }
        if let Some(bad) = self.delays_ns.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::validation(
                "delays_ns",
                format!("not strictly increasing at index {}", bad + 1),
            ));
        }
        if self.delays_ns.iter().chain(&self.powers_db).any(|v| !v.is_finite()) || !self.noise_floor_db.is_finite() {
            return Err(Error::validation("powers_db", "non-finite value"));
        }
        Ok(())
    }

    /// Raw sweeps must sit on a uniform grid of `resolution_ns`.
    pub fn validate_grid(&self, resolution_ns: f64) -> Result<()> {
        self.validate_shape()?;
        if let Some(bad) = self
            .delays_ns
            .windows(2)
            .position(|w| ((w[1] - w[0]) - resolution_ns).abs() > GRID_TOLERANCE_NS)
        {
            return Err(Error::validation(
                "delays_ns",
                format!(
                    "non-uniform delay grid at pointing ({}, {}): step {} ns at index {}, expected {} ns",
                    self.tx_az_deg,
                    self.rx_az_deg,
                    self.delays_ns[bad + 1] - self.delays_ns[bad],
                    bad + 1,
                    resolution_ns
                ),
            ));
        }
        Ok(())
    }
}

/// Removes every bin below `max(powers) - threshold_db` or below the noise floor.
///
/// The peak bin always survives. Fails with [`Error::NoSignal`] when the peak
/// does not rise above the noise floor.
pub fn threshold_pdp(pdp: &DirectionalPdp, threshold_db: f64) -> Result<DirectionalPdp> {
    if !(threshold_db > 0.0) {
        return Err(Error::validation(
            "threshold_db",
            format!("must be > 0, got {threshold_db}"),
        ));
    }
    let peak = pdp
        .peak_db()
        .ok_or_else(|| Error::NoSignal("empty power delay profile".into()))?;
    if peak <= pdp.noise_floor_db {
        return Err(Error::NoSignal(format!(
            "peak {peak} dB at pointing ({}, {}) is not above noise floor {} dB",
            pdp.tx_az_deg, pdp.rx_az_deg, pdp.noise_floor_db
        )));
    }
    let floor = peak - threshold_db;
    let (delays_ns, powers_db) = pdp
        .taps()
        .filter(|&(_, p)| p >= floor && p >= pdp.noise_floor_db)
        .unzip();
    Ok(DirectionalPdp {
        tx_az_deg: pdp.tx_az_deg,
        rx_az_deg: pdp.rx_az_deg,
        delays_ns,
        powers_db,
        noise_floor_db: pdp.noise_floor_db,
    })
}

/// Every sweep, the geometry, and the polarization for one TX-RX pair.
#[derive(Clone, Debug, PartialEq)]
pub struct LocationMeasurement {
    pub tx_id: String,
    pub rx_id: String,
    pub tx_pos_m: [f64; 3],
    pub rx_pos_m: [f64; 3],
    pub polarization: Polarization,
    pub los: bool,
    pub sweeps: Vec<DirectionalPdp>,
    pub tx_antenna: AntennaConfig,
    pub rx_antenna: AntennaConfig,
    pub tx_power_dbm: f64,
}

impl LocationMeasurement {
    /// 3-D TX-RX separation, meters.
    pub fn distance_m(&self) -> f64 {
        self.tx_pos_m
            .iter()
            .zip(&self.rx_pos_m)
            .map(|(a, b)| (b - a).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Azimuth of the RX as seen from the TX.
    pub fn tx_los_bearing_deg(&self) -> f64 {
        let dx = self.rx_pos_m[0] - self.tx_pos_m[0];
        let dy = self.rx_pos_m[1] - self.tx_pos_m[1];
        wrap_360(dy.atan2(dx).to_degrees())
    }

    /// Azimuth of the TX as seen from the RX.
    pub fn rx_los_bearing_deg(&self) -> f64 {
        wrap_360(self.tx_los_bearing_deg() + 180.0)
    }

    /// Combined TX + RX antenna gain, dBi.
    pub fn total_gain_dbi(&self) -> f64 {
        self.tx_antenna.gain_dbi + self.rx_antenna.gain_dbi
    }

    pub fn has_signal(&self) -> bool {
        self.sweeps.iter().any(DirectionalPdp::is_detectable)
    }

    pub fn label(&self) -> String {
        format!("{}-{} {}", self.tx_id, self.rx_id, self.polarization)
    }

    pub fn validate(&self, resolution_ns: f64) -> Result<()> {
        self.tx_antenna.validate()?;
        self.rx_antenna.validate()?;
        let d = self.distance_m();
        if !(d > REFERENCE_DISTANCE_M) {
            return Err(Error::validation(
                "tx_pos_m",
                format!(
                    "{}: TX-RX distance {d} m must exceed {REFERENCE_DISTANCE_M} m",
                    self.label()
                ),
            ));
        }
        if !self.tx_power_dbm.is_finite() {
            return Err(Error::validation("tx_power_dbm", "non-finite"));
        }
        let mut seen = std::collections::HashSet::new();
        for sweep in &self.sweeps {
            sweep.validate_grid(resolution_ns)?;
            if !seen.insert(sweep.pointing().key()) {
                return Err(Error::validation(
                    "sweeps",
                    format!(
                        "{}: duplicate pointing ({}, {})",
                        self.label(),
                        sweep.tx_az_deg,
                        sweep.rx_az_deg
                    ),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub threshold_db: f64,
    pub carrier_hz: f64,
    pub max_measurable_pl_db: f64,
    pub d0_m: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            threshold_db: 30.0,
            carrier_hz: DEFAULT_CARRIER_HZ,
            max_measurable_pl_db: DEFAULT_MAX_MEASURABLE_PL_DB,
            d0_m: REFERENCE_DISTANCE_M,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold_db > 0.0) {
            return Err(Error::validation("threshold_db", "must be > 0"));
        }
        if !(self.carrier_hz > 0.0) {
            return Err(Error::validation("carrier_hz", "must be > 0"));
        }
        if self.d0_m != REFERENCE_DISTANCE_M {
            return Err(Error::validation("d0_m", "reference distance is fixed at 1 m"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pdp(taps: &[(f64, f64)]) -> DirectionalPdp {
        DirectionalPdp::new(
            0.0,
            0.0,
            taps.iter().map(|t| t.0).collect(),
            taps.iter().map(|t| t.1).collect(),
            -100.0,
        )
        .unwrap()
    }

    #[test]
    fn threshold_drops_taps_beyond_window() {
        let p = pdp(&[(0.0, 0.0), (10.0, -19.0), (20.0, -31.0)]);
        let t = threshold_pdp(&p, 30.0).unwrap();
        assert_eq!(t.delays_ns, vec![0.0, 10.0]);
        assert_eq!(t.powers_db, vec![0.0, -19.0]);
    }

    #[test]
    fn threshold_single_tap() {
        let p = pdp(&[(0.0, 0.0), (20.0, -31.0)]);
        let t = threshold_pdp(&p, 20.0).unwrap();
        assert_eq!(t.delays_ns, vec![0.0]);
    }

    #[test]
    fn threshold_respects_noise_floor() {
        let mut p = pdp(&[(0.0, -50.0), (2.0, -61.0), (4.0, -70.0)]);
        p.noise_floor_db = -60.0;
        let t = threshold_pdp(&p, 30.0).unwrap();
        assert_eq!(t.delays_ns, vec![0.0]);
    }

    #[test]
    fn all_noise_is_no_signal() {
        let mut p = pdp(&[(0.0, -90.0), (2.0, -95.0)]);
        p.noise_floor_db = -90.0;
        assert!(matches!(threshold_pdp(&p, 20.0), Err(Error::NoSignal(_))));
    }

    #[test]
    fn non_uniform_grid_rejected() {
        let p = pdp(&[(0.0, 0.0), (2.0, -1.0), (6.0, -2.0)]);
        assert!(p.validate_grid(2.0).is_err());
        let q = pdp(&[(0.0, 0.0), (2.0, -1.0), (4.0, -2.0)]);
        assert!(q.validate_grid(2.0).is_ok());
    }

    #[test]
    fn antenna_defaults_valid() {
        AntennaConfig::default_tx().validate().unwrap();
        assert_eq!(AntennaConfig::default_rx().height_m, 1.5);
        assert_eq!(AntennaConfig::default_tx().directions_per_sweep(), 45);
        let mut bad = AntennaConfig::default_tx();
        bad.az_step_deg = 7.0;
        assert!(bad.validate().is_err());
        bad.az_step_deg = 4.0;
        assert!(bad.validate().is_err(), "hpbw wider than step");
    }

    #[test]
    fn bearings_are_reciprocal() {
        let loc = LocationMeasurement {
            tx_id: "TX".into(),
            rx_id: "RX".into(),
            tx_pos_m: [0.0, 0.0, 3.0],
            rx_pos_m: [0.0, 10.0, 1.5],
            polarization: Polarization::VV,
            los: true,
            sweeps: vec![],
            tx_antenna: AntennaConfig::default_tx(),
            rx_antenna: AntennaConfig::default_rx(),
            tx_power_dbm: 0.0,
        };
        assert!((loc.tx_los_bearing_deg() - 90.0).abs() < 1e-12);
        assert!((loc.rx_los_bearing_deg() - 270.0).abs() < 1e-12);
        assert!((loc.distance_m() - (100.0f64 + 2.25).sqrt()).abs() < 1e-12);
    }

    fn arb_pdp() -> impl Strategy<Value = DirectionalPdp> {
        (1usize..40, -120.0f64..-60.0).prop_flat_map(|(n, noise)| {
            prop::collection::vec(-130.0f64..-40.0, n).prop_map(move |powers| {
                let delays = (0..powers.len()).map(|i| i as f64 * 2.0).collect();
                DirectionalPdp::new(0.0, 0.0, delays, powers, noise).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn threshold_is_idempotent(p in arb_pdp(), t in 1.0f64..50.0) {
            if let Ok(once) = threshold_pdp(&p, t) {
                let twice = threshold_pdp(&once, t).unwrap();
                prop_assert_eq!(once, twice);
            }
        }

        #[test]
        fn wider_threshold_retains_superset(p in arb_pdp(), t1 in 1.0f64..50.0, extra in 0.0f64..30.0) {
            if let Ok(narrow) = threshold_pdp(&p, t1) {
                let wide = threshold_pdp(&p, t1 + extra).unwrap();
                for d in &narrow.delays_ns {
                    prop_assert!(wide.delays_ns.contains(d));
                }
                // peak always kept
                prop_assert!(narrow.powers_db.contains(&p.peak_db().unwrap()));
            }
        }
    }
}
