//! Power angular spectra, RMS angular spread and spatial lobes.
//!
//! The angular spread uses the wrapped-deviation form: the circular mean
//! `μ = arg Σ P_n e^{jθ_n}`, deviations `θ_n − μ` wrapped to `(−180°, 180°]`,
//! and the power-weighted RMS of those deviations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::LocationMeasurement;
use crate::stats::Summary;
use crate::units::{db_to_linear, wrap_180, wrap_360};

/// Relative resultant length below which the circular mean is undefined.
pub const DEGENERATE_RESULTANT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    /// Departure, indexed by TX azimuth.
    #[serde(rename = "AOD")]
    Aod,
    /// Arrival, indexed by RX azimuth.
    #[serde(rename = "AOA")]
    Aoa,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Aod => "AOD",
            Side::Aoa => "AOA",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AOD" => Ok(Side::Aod),
            "AOA" => Ok(Side::Aoa),
            _ => Err(Error::validation("side", format!("expected AOD or AOA, got {s:?}"))),
        }
    }
}

/// Integrated linear power per azimuth bin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerAngularSpectrum {
    pub side: Side,
    pub bins_deg: Vec<f64>,
    pub powers_mw: Vec<f64>,
}

impl PowerAngularSpectrum {
    /// Empty spectrum on a uniform grid of `step_deg`.
    pub fn zeros(side: Side, step_deg: f64) -> Self {
        let n = (360.0 / step_deg).round() as usize;
        PowerAngularSpectrum {
            side,
            bins_deg: (0..n).map(|k| k as f64 * step_deg).collect(),
            powers_mw: vec![0.0; n],
        }
    }

    pub fn step_deg(&self) -> f64 {
        360.0 / self.bins_deg.len() as f64
    }

    /// Index of the bin nearest to `az_deg`.
    pub fn bin_of(&self, az_deg: f64) -> usize {
        let n = self.bins_deg.len();
        (wrap_360(az_deg) / self.step_deg()).round() as usize % n
    }

    pub fn peak_mw(&self) -> f64 {
        self.powers_mw.iter().copied().fold(0.0, f64::max)
    }

    /// Rotates every bin by `shift` positions.
    pub fn rotated(&self, shift: usize) -> Self {
        let mut powers = self.powers_mw.clone();
        let n = powers.len().max(1);
        powers.rotate_right(shift % n);
        PowerAngularSpectrum {
            side: self.side,
            bins_deg: self.bins_deg.clone(),
            powers_mw: powers,
        }
    }
}

/// Builds the spectrum of one side.
///
/// Each detectable pointing pair contributes its integrated above-noise power
/// (antenna gains removed). Pairs weaker than the strongest pair by more than
/// `threshold_db` are dropped before accumulation into the bin of this side's
/// azimuth.
pub fn power_angular_spectrum(
    loc: &LocationMeasurement,
    side: Side,
    threshold_db: f64,
) -> Result<PowerAngularSpectrum> {
    if !(threshold_db > 0.0) {
        return Err(Error::validation("threshold_db", "must be > 0"));
    }
    let gain_db = loc.total_gain_dbi();
    let directional: Vec<(f64, f64)> = loc
        .sweeps
        .iter()
        .filter(|s| s.is_detectable())
        .map(|s| {
            let az = match side {
                Side::Aod => s.tx_az_deg,
                Side::Aoa => s.rx_az_deg,
            };
            let p: f64 = s.above_noise().map(|(_, p)| db_to_linear(p - gain_db)).sum();
            (az, p)
        })
        .collect();
    let max = directional.iter().map(|d| d.1).fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::NoSignal(format!("no detectable direction at {}", loc.label())));
    }
    let floor = max * db_to_linear(-threshold_db);
    let step = match side {
        Side::Aod => loc.tx_antenna.az_step_deg,
        Side::Aoa => loc.rx_antenna.az_step_deg,
    };
    let mut pas = PowerAngularSpectrum::zeros(side, step);
    for (az, p) in directional.into_iter().filter(|d| d.1 >= floor) {
        let bin = pas.bin_of(az);
        pas.powers_mw[bin] += p;
    }
    Ok(pas)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularSpread {
    pub rmsas_deg: f64,
    pub mean_deg: f64,
    /// Set when the power-weighted resultant vanished and the mean was pinned to 0°.
    pub degenerate_mean: bool,
}

/// RMS angular spread about the circular mean, degrees.
pub fn rms_angular_spread(pas: &PowerAngularSpectrum) -> Result<AngularSpread> {
    let total: f64 = pas.powers_mw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NoSignal("power angular spectrum is empty".into()));
    }
    // Work relative to the strongest bin so a lone bin resolves exactly.
    let reference = pas
        .bins_deg
        .iter()
        .zip(&pas.powers_mw)
        .fold(
            (0.0, f64::NEG_INFINITY),
            |acc, (&th, &p)| if p > acc.1 { (th, p) } else { acc },
        )
        .0;
    let offsets: Vec<f64> = pas.bins_deg.iter().map(|&th| wrap_180(th - reference)).collect();
    let (re, im) = offsets
        .iter()
        .zip(&pas.powers_mw)
        .fold((0.0, 0.0), |(re, im), (&th, &p)| {
            let r = th.to_radians();
            (re + p * r.cos(), im + p * r.sin())
        });
    let degenerate = re.hypot(im) < DEGENERATE_RESULTANT * total;
    let (mean_deg, mean_offset) = if degenerate {
        (0.0, wrap_180(-reference))
    } else {
        let m = im.atan2(re).to_degrees();
        (wrap_360(reference + m), m)
    };
    let ms = offsets
        .iter()
        .zip(&pas.powers_mw)
        .map(|(&th, &p)| p * wrap_180(th - mean_offset).powi(2))
        .sum::<f64>()
        / total;
    Ok(AngularSpread {
        rmsas_deg: ms.sqrt(),
        mean_deg,
        degenerate_mean: degenerate,
    })
}

/// A circularly contiguous run of bins within the threshold of the peak.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialLobe {
    pub start_deg: f64,
    pub end_deg: f64,
    pub peak_power_mw: f64,
    pub lobe_power_mw: f64,
}

/// Bins whose power is positive and within `threshold_db` of the peak.
pub fn lobe_mask(pas: &PowerAngularSpectrum, threshold_db: f64) -> Vec<bool> {
    let floor = pas.peak_mw() * db_to_linear(-threshold_db);
    pas.powers_mw.iter().map(|&p| p > 0.0 && p >= floor).collect()
}

/// Maximal runs of marked bins on the azimuth ring; a run crossing 0° is one lobe.
pub fn extract_spatial_lobes(pas: &PowerAngularSpectrum, threshold_db: f64) -> Vec<SpatialLobe> {
    let mask = lobe_mask(pas, threshold_db);
    let n = mask.len();
    let lobe = |start: usize, len: usize| {
        let idx = (start..start + len).map(|i| i % n);
        SpatialLobe {
            start_deg: pas.bins_deg[start % n],
            end_deg: pas.bins_deg[(start + len - 1) % n],
            peak_power_mw: idx.clone().map(|i| pas.powers_mw[i]).fold(0.0, f64::max),
            lobe_power_mw: idx.map(|i| pas.powers_mw[i]).sum(),
        }
    };
    let Some(gap) = mask.iter().position(|&m| !m) else {
        return if n == 0 { Vec::new() } else { vec![lobe(0, n)] };
    };

    // Walk the ring once starting just after an unmarked bin.
    let mut lobes = Vec::new();
    let mut run_start = None;
    for offset in 1..=n {
        let i = (gap + offset) % n;
        match (mask[i], run_start) {
            (true, None) => run_start = Some(gap + offset),
            (false, Some(s)) => {
                lobes.push(lobe(s % n, gap + offset - s));
                run_start = None;
            }
            _ => {}
        }
    }
    lobes.sort_by(|a, b| a.start_deg.total_cmp(&b.start_deg));
    lobes
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularStats {
    pub rmsas_deg: f64,
    pub n_lobes: usize,
    pub threshold_db: f64,
    pub degenerate_mean: bool,
}

pub fn angular_stats(loc: &LocationMeasurement, side: Side, threshold_db: f64) -> Result<AngularStats> {
    let pas = power_angular_spectrum(loc, side, threshold_db)?;
    let spread = rms_angular_spread(&pas)?;
    Ok(AngularStats {
        rmsas_deg: spread.rmsas_deg,
        n_lobes: extract_spatial_lobes(&pas, threshold_db).len(),
        threshold_db,
        degenerate_mean: spread.degenerate_mean,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularSummary {
    pub threshold_db: f64,
    pub aoa_lobes: Summary,
    pub aod_lobes: Summary,
    pub aoa_rmsas: Summary,
    pub aod_rmsas: Summary,
}

/// Per-location (AOD, AOA) statistics; locations without signal are skipped.
pub fn campaign_angular_samples(
    locs: &[LocationMeasurement],
    threshold_db: f64,
) -> Result<Vec<(AngularStats, AngularStats)>> {
    let mut out = Vec::new();
    for loc in locs {
        if !loc.has_signal() {
            log::debug!("{}: no signal, skipped in angular summary", loc.label());
            continue;
        }
        out.push((
            angular_stats(loc, Side::Aod, threshold_db)?,
            angular_stats(loc, Side::Aoa, threshold_db)?,
        ));
    }
    Ok(out)
}

/// Lobe counts and RMS angular spread summarized over locations, per side.
pub fn campaign_angular_summary(locs: &[LocationMeasurement], threshold_db: f64) -> Result<AngularSummary> {
    if locs.is_empty() {
        return Err(Error::validation("locations", "need at least one location"));
    }
    let samples = campaign_angular_samples(locs, threshold_db)?;
    let summarize = |f: &dyn Fn(&(AngularStats, AngularStats)) -> f64| {
        let v: Vec<f64> = samples.iter().map(f).collect();
        Summary::from_values(&v).ok_or_else(|| Error::NoSignal("no location with detectable signal".into()))
    };
    Ok(AngularSummary {
        threshold_db,
        aoa_lobes: summarize(&|s| s.1.n_lobes as f64)?,
        aod_lobes: summarize(&|s| s.0.n_lobes as f64)?,
        aoa_rmsas: summarize(&|s| s.1.rmsas_deg)?,
        aod_rmsas: summarize(&|s| s.0.rmsas_deg)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{AntennaConfig, DirectionalPdp, Polarization};
    use proptest::prelude::*;

    fn pas(powers: &[f64]) -> PowerAngularSpectrum {
        let step = 360.0 / powers.len() as f64;
        PowerAngularSpectrum {
            side: Side::Aoa,
            bins_deg: (0..powers.len()).map(|k| k as f64 * step).collect(),
            powers_mw: powers.to_vec(),
        }
    }

    fn loc(sweeps: Vec<DirectionalPdp>) -> LocationMeasurement {
        LocationMeasurement {
            tx_id: "TX1".into(),
            rx_id: "RX2".into(),
            tx_pos_m: [0.0, 0.0, 3.0],
            rx_pos_m: [10.0, 0.0, 1.5],
            polarization: Polarization::VV,
            los: true,
            sweeps,
            tx_antenna: AntennaConfig::default_tx(),
            rx_antenna: AntennaConfig::default_rx(),
            tx_power_dbm: 0.0,
        }
    }

    fn tap(tx: f64, rx: f64, p: f64) -> DirectionalPdp {
        DirectionalPdp::new(tx, rx, vec![0.0], vec![p], -120.0).unwrap()
    }

    #[test]
    fn single_direction_gives_single_bin() {
        let l = loc(vec![tap(16.0, 200.0, -60.0)]);
        let aoa = power_angular_spectrum(&l, Side::Aoa, 30.0).unwrap();
        assert_eq!(aoa.powers_mw.iter().filter(|&&p| p > 0.0).count(), 1);
        assert!(aoa.powers_mw[25] > 0.0);
        let aod = power_angular_spectrum(&l, Side::Aod, 30.0).unwrap();
        assert!(aod.powers_mw[2] > 0.0);
        assert_eq!(rms_angular_spread(&aoa).unwrap().rmsas_deg, 0.0);
    }

    #[test]
    fn uniform_directions_give_flat_pas() {
        let l = loc((0..45).map(|k| tap(0.0, k as f64 * 8.0, -70.0)).collect());
        let p = power_angular_spectrum(&l, Side::Aoa, 30.0).unwrap();
        assert!(p.powers_mw.iter().all(|&x| x == p.powers_mw[0]));
    }

    #[test]
    fn weak_directions_dropped_globally() {
        let l = loc(vec![
            tap(0.0, 0.0, -60.0),
            tap(0.0, 80.0, -95.0),
            tap(0.0, 160.0, -85.0),
        ]);
        let p = power_angular_spectrum(&l, Side::Aoa, 30.0).unwrap();
        assert!(p.powers_mw[10] == 0.0);
        assert!(p.powers_mw[20] > 0.0);
    }

    #[test]
    fn two_bins_at_0_and_90() {
        let mut v = vec![0.0; 4];
        v[0] = 1.0;
        v[1] = 1.0;
        let s = rms_angular_spread(&pas(&v)).unwrap();
        assert!((s.mean_deg - 45.0).abs() < 1e-9);
        assert!((s.rmsas_deg - 45.0).abs() < 1e-9);
        assert!(!s.degenerate_mean);
    }

    #[test]
    fn uniform_45_bins_is_degenerate() {
        let s = rms_angular_spread(&pas(&[1.0; 45])).unwrap();
        assert!(s.degenerate_mean);
        // sqrt(2·64·Σ_{k=1}^{22} k² / 45)
        assert!((s.rmsas_deg - 103.897_385_273_483_5).abs() < 1e-9);
    }

    #[test]
    fn empty_pas_errors() {
        assert!(rms_angular_spread(&pas(&[0.0; 8])).is_err());
    }

    #[test]
    fn wrap_around_run_is_one_lobe() {
        let mut v = vec![0.0; 45];
        for i in [43, 44, 0, 1] {
            v[i] = 1.0;
        }
        v[20] = 1.0;
        let lobes = extract_spatial_lobes(&pas(&v), 30.0);
        assert_eq!(lobes.len(), 2);
        let wrap = lobes.iter().find(|l| l.start_deg == 344.0).unwrap();
        assert_eq!(wrap.end_deg, 8.0);
        assert_eq!(wrap.lobe_power_mw, 4.0);
    }

    #[test]
    fn full_ring_is_one_lobe() {
        assert_eq!(extract_spatial_lobes(&pas(&[1.0; 45]), 10.0).len(), 1);
    }

    #[test]
    fn five_separated_runs() {
        let mut v = vec![0.0; 45];
        for i in [0, 1, 5, 12, 13, 14, 25, 40] {
            v[i] = 1.0 + i as f64;
        }
        assert_eq!(extract_spatial_lobes(&pas(&v), 30.0).len(), 5);
    }

    #[test]
    fn threshold_marks_lobes_relative_to_peak() {
        let mut v = vec![0.0; 45];
        v[0] = 1.0;
        v[10] = 1e-3; // -30 dB, inside at 30
        v[20] = 1e-4; // -40 dB
        assert_eq!(extract_spatial_lobes(&pas(&v), 30.0).len(), 2);
        assert_eq!(extract_spatial_lobes(&pas(&v), 20.0).len(), 1);
    }

    fn arb_pas() -> impl Strategy<Value = PowerAngularSpectrum> {
        prop::collection::vec(prop_oneof![Just(0.0), 1e-6f64..1.0], 45)
            .prop_filter_map("nonzero", |v| v.iter().any(|&p| p > 0.0).then(|| pas(&v)))
    }

    proptest! {
        #[test]
        fn lobe_count_bounds_and_invariance(p in arb_pas(), shift in 0usize..45, scale in 1e-3f64..1e3) {
            let n = extract_spatial_lobes(&p, 30.0).len();
            prop_assert!((1..=22).contains(&n));
            prop_assert_eq!(extract_spatial_lobes(&p.rotated(shift), 30.0).len(), n);
            let mut scaled = p.clone();
            scaled.powers_mw.iter_mut().for_each(|x| *x *= scale);
            prop_assert_eq!(extract_spatial_lobes(&scaled, 30.0).len(), n);
        }

        #[test]
        fn marked_set_grows_with_threshold(p in arb_pas()) {
            let m20 = lobe_mask(&p, 20.0);
            let m30 = lobe_mask(&p, 30.0);
            prop_assert!(m20.iter().zip(&m30).all(|(a, b)| !a || *b));
        }

        #[test]
        fn rmsas_bounded_and_scale_invariant(p in arb_pas(), scale in 1e-3f64..1e3) {
            let s = rms_angular_spread(&p).unwrap();
            prop_assert!(s.rmsas_deg >= 0.0 && s.rmsas_deg <= 180.0);
            let mut scaled = p.clone();
            scaled.powers_mw.iter_mut().for_each(|x| *x *= scale);
            let t = rms_angular_spread(&scaled).unwrap();
            if !s.degenerate_mean {
                prop_assert!((s.rmsas_deg - t.rmsas_deg).abs() < 1e-6);
            }
        }
    }
}
