//! Omnidirectional PDP reconstruction and delay-spread statistics.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{threshold_pdp, DirectionalPdp, LocationMeasurement, Polarization};
use crate::stats::Summary;
use crate::units::db_to_linear;

/// Delay bins are matched at picosecond precision when summing directions.
fn delay_key(delay_ns: f64) -> i64 {
    (delay_ns * 1e3).round() as i64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdpSource {
    pub tx_id: String,
    pub rx_id: String,
    pub polarization: Polarization,
}

/// Antenna-gain-free power delay profile summed over every pointing pair.
#[derive(Clone, Debug, PartialEq)]
pub struct OmniPdp {
    pub delays_ns: Vec<f64>,
    pub powers_mw: Vec<f64>,
    pub source: PdpSource,
}

impl OmniPdp {
    pub fn total_power_mw(&self) -> f64 {
        self.powers_mw.iter().sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayStats {
    pub rmsds_ns: f64,
    pub mds_ns: f64,
    pub threshold_db: f64,
    pub n_taps: usize,
}

/// Anything that can yield thresholded `(delay_ns, linear power)` taps.
pub trait DelayProfile {
    /// Taps within `threshold_db` of the peak, in delay order.
    fn thresholded_taps(&self, threshold_db: f64) -> Result<Vec<(f64, f64)>>;
}

impl DelayProfile for DirectionalPdp {
    fn thresholded_taps(&self, threshold_db: f64) -> Result<Vec<(f64, f64)>> {
        let kept = threshold_pdp(self, threshold_db)?;
        Ok(kept.taps().map(|(d, p)| (d, db_to_linear(p))).collect())
    }
}

impl DelayProfile for OmniPdp {
    fn thresholded_taps(&self, threshold_db: f64) -> Result<Vec<(f64, f64)>> {
        if !(threshold_db > 0.0) {
            return Err(Error::validation("threshold_db", "must be > 0"));
        }
        let peak = self.powers_mw.iter().copied().fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::NoSignal(format!(
                "empty omnidirectional PDP for {}-{}",
                self.source.tx_id, self.source.rx_id
            )));
        }
        let floor = peak * db_to_linear(-threshold_db);
        Ok(self
            .delays_ns
            .iter()
            .zip(&self.powers_mw)
            .filter(|&(_, &p)| p >= floor)
            .map(|(&d, &p)| (d, p))
            .collect())
    }
}

/// Sums the linear power of every detectable pointing pair per delay bin,
/// with antenna gains removed.
///
/// Only sweeps whose peak clears the noise floor contribute, and within them
/// only bins at or above the floor.
pub fn synthesize_omni_pdp(loc: &LocationMeasurement) -> Result<OmniPdp> {
    let gain_db = loc.total_gain_dbi();
    let mut bins: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for sweep in loc.sweeps.iter().filter(|s| s.is_detectable()) {
        for (delay, power_db) in sweep.above_noise() {
            let entry = bins.entry(delay_key(delay)).or_insert((delay, 0.0));
            entry.1 += db_to_linear(power_db - gain_db);
        }
    }
    if bins.is_empty() {
        return Err(Error::NoSignal(format!("no sweep above noise at {}", loc.label())));
    }
    let (delays_ns, powers_mw) = bins.into_values().unzip();
    Ok(OmniPdp {
        delays_ns,
        powers_mw,
        source: PdpSource {
            tx_id: loc.tx_id.clone(),
            rx_id: loc.rx_id.clone(),
            polarization: loc.polarization,
        },
    })
}

fn rms_of_taps(taps: &[(f64, f64)]) -> f64 {
    let total: f64 = taps.iter().map(|t| t.1).sum();
    let mean = taps.iter().map(|&(d, p)| p * d).sum::<f64>() / total;
    let var = taps.iter().map(|&(d, p)| p * (d - mean).powi(2)).sum::<f64>() / total;
    var.max(0.0).sqrt()
}

fn extent_of_taps(taps: &[(f64, f64)]) -> f64 {
    match (taps.first(), taps.last()) {
        (Some(first), Some(last)) => last.0 - first.0,
        _ => 0.0,
    }
}

fn nonempty(taps: Vec<(f64, f64)>) -> Result<Vec<(f64, f64)>> {
    if taps.is_empty() {
        Err(Error::NoSignal("no taps survive thresholding".into()))
    } else {
        Ok(taps)
    }
}

/// Power-weighted standard deviation of tap delays after thresholding, ns.
pub fn rms_delay_spread<P: DelayProfile + ?Sized>(pdp: &P, threshold_db: f64) -> Result<f64> {
    let taps = nonempty(pdp.thresholded_taps(threshold_db)?)?;
    Ok(rms_of_taps(&taps))
}

/// Delay of the last surviving tap relative to the first, ns.
pub fn max_delay_spread<P: DelayProfile + ?Sized>(pdp: &P, threshold_db: f64) -> Result<f64> {
    let taps = nonempty(pdp.thresholded_taps(threshold_db)?)?;
    Ok(extent_of_taps(&taps))
}

pub fn delay_stats<P: DelayProfile + ?Sized>(pdp: &P, threshold_db: f64) -> Result<DelayStats> {
    let taps = nonempty(pdp.thresholded_taps(threshold_db)?)?;
    Ok(DelayStats {
        rmsds_ns: rms_of_taps(&taps),
        mds_ns: extent_of_taps(&taps),
        threshold_db,
        n_taps: taps.len(),
    })
}

/// One row group of the campaign delay table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelaySummary {
    pub threshold_db: f64,
    pub omni_rmsds: Summary,
    pub omni_mds: Summary,
    pub dir_rmsds: Summary,
    pub dir_mds: Summary,
}

/// Per-location omni and per-direction delay statistics for one campaign.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DelaySamples {
    pub omni: Vec<DelayStats>,
    pub directional: Vec<DelayStats>,
}

/// Collects the raw values behind [`campaign_delay_summary`].
///
/// Locations with no detectable signal contribute nothing; directions whose
/// peak does not clear the noise floor are skipped.
pub fn campaign_delay_samples(locs: &[LocationMeasurement], threshold_db: f64) -> Result<DelaySamples> {
    let mut out = DelaySamples::default();
    for loc in locs {
        let omni = match synthesize_omni_pdp(loc) {
            Ok(o) => o,
            Err(Error::NoSignal(_)) => {
                log::debug!("{}: no signal, skipped in delay summary", loc.label());
                continue;
            }
            Err(e) => return Err(e),
        };
        out.omni.push(delay_stats(&omni, threshold_db)?);
        for sweep in loc.sweeps.iter().filter(|s| s.is_detectable()) {
            out.directional.push(delay_stats(sweep, threshold_db)?);
        }
    }
    Ok(out)
}

/// Min/max/mean/median/90% of omni and directional RMSDS and MDS.
pub fn campaign_delay_summary(locs: &[LocationMeasurement], threshold_db: f64) -> Result<DelaySummary> {
    if locs.is_empty() {
        return Err(Error::validation("locations", "need at least one location"));
    }
    let samples = campaign_delay_samples(locs, threshold_db)?;
    let summarize = |v: Vec<f64>| {
        Summary::from_values(&v).ok_or_else(|| Error::NoSignal("no location with detectable signal".into()))
    };
    Ok(DelaySummary {
        threshold_db,
        omni_rmsds: summarize(samples.omni.iter().map(|s| s.rmsds_ns).collect())?,
        omni_mds: summarize(samples.omni.iter().map(|s| s.mds_ns).collect())?,
        dir_rmsds: summarize(samples.directional.iter().map(|s| s.rmsds_ns).collect())?,
        dir_mds: summarize(samples.directional.iter().map(|s| s.mds_ns).collect())?,
    })
}
