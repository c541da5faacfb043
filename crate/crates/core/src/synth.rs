//! Drop-based stochastic channel generator.
//!
//! A drop is one independent realization of a TX-RX link: CI path loss with
//! log-normal shadowing, a random number of spatial lobes on the azimuth grid,
//! an exponentially decaying tap cluster per lobe, and a per-tap XPD. Drops can
//! be rendered to the campaign file format so the analysis pipeline can be run
//! against known ground truth.
//!
//! Geometry of a drop is relative: lobe centers are offsets from the LOS
//! bearing at each end. Rendering picks absolute bearings.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{
    write_campaign, AntennaConfig, DirectionalPdp, LocationMeasurement, Polarization, REFERENCE_DISTANCE_M,
};
use crate::pathloss::fspl;
use crate::units::{db_to_linear, linear_to_db, wrap_360, SPEED_OF_LIGHT};
use crate::xpd::PathClass;

/// Longest intra-lobe cluster, in taps.
const MAX_TAPS_PER_LOBE: usize = 8192;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalLaw {
    pub mean_db: f64,
    pub std_db: f64,
}

/// Lobe count: `min + Poisson(mean − min)`, clipped at `max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LobeCountLaw {
    pub mean: f64,
    pub min: u32,
    pub max: u32,
}

/// Log-normal law given by the mean and std of `ln(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogNormalLaw {
    pub log_mean: f64,
    pub log_std: f64,
}

impl LogNormalLaw {
    /// Law whose arithmetic mean and median are the given values.
    pub fn from_mean_median(mean: f64, median: f64) -> Self {
        LogNormalLaw {
            log_mean: median.ln(),
            log_std: (2.0 * (mean / median).ln()).max(0.0).sqrt(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthesisParams {
    /// LOS path loss exponent.
    pub ple: f64,
    /// NLOS path loss exponent.
    pub nlos_ple: f64,
    pub shadow_sigma_db: f64,
    pub xpd_boresight: NormalLaw,
    pub xpd_reflection: NormalLaw,
    pub lobe_count_law: LobeCountLaw,
    /// Intra-lobe RMS delay spread, ns.
    pub rmsds_target_ns: LogNormalLaw,
    pub carrier_hz: f64,
    pub az_step_deg: f64,
    pub distance_range_m: [f64; 2],
    pub delay_resolution_ns: f64,
    /// Boresight tap power over the rest of the LOS lobe, dB.
    pub los_k_factor_db: f64,
    /// Non-leading lobes sit uniformly in `[-spread, 0]` dB below the leading lobe.
    pub lobe_power_spread_db: f64,
    /// Mean of the exponential extra delay of every non-leading lobe, ns.
    pub lobe_excess_delay_mean_ns: f64,
    /// Cluster taps are generated down to this many dB below the first tap.
    pub tap_dynamic_range_db: f64,
    /// Share of rendered locations that are NLOS.
    pub nlos_fraction: f64,
    pub tx_power_dbm: f64,
    pub antenna_gain_dbi: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub max_measurable_pl_db: f64,
}

impl Default for SynthesisParams {
    fn default() -> Self {
        SynthesisParams {
            ple: 1.86,
            nlos_ple: 4.58,
            shadow_sigma_db: 1.5,
            xpd_boresight: NormalLaw {
                mean_db: 26.2,
                std_db: 2.7,
            },
            xpd_reflection: NormalLaw {
                mean_db: 20.2,
                std_db: 4.3,
            },
            lobe_count_law: LobeCountLaw {
                mean: 3.5,
                min: 1,
                max: 7,
            },
            rmsds_target_ns: LogNormalLaw::from_mean_median(16.0, 10.4),
            carrier_hz: 142e9,
            az_step_deg: 8.0,
            distance_range_m: [6.3, 39.6],
            delay_resolution_ns: 2.0,
            los_k_factor_db: 30.0,
            lobe_power_spread_db: 20.0,
            lobe_excess_delay_mean_ns: 10.0,
            tap_dynamic_range_db: 40.0,
            nlos_fraction: 2.0 / 13.0,
            tx_power_dbm: 0.0,
            antenna_gain_dbi: 27.0,
            tx_height_m: 3.0,
            rx_height_m: 1.5,
            max_measurable_pl_db: 152.0,
        }
    }
}

impl SynthesisParams {
    pub fn n_bins(&self) -> usize {
        (360.0 / self.az_step_deg).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parameter(m));
        if !(self.ple > 0.0 && self.nlos_ple > 0.0) {
            return bad("path loss exponents must be > 0".into());
        }
        for (name, s) in [
            ("shadow_sigma_db", self.shadow_sigma_db),
            ("xpd_boresight.std_db", self.xpd_boresight.std_db),
            ("xpd_reflection.std_db", self.xpd_reflection.std_db),
            ("rmsds_target_ns.log_std", self.rmsds_target_ns.log_std),
            ("lobe_power_spread_db", self.lobe_power_spread_db),
            ("lobe_excess_delay_mean_ns", self.lobe_excess_delay_mean_ns),
            ("los_k_factor_db", self.los_k_factor_db),
        ] {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("{name} must be finite and >= 0, got {s}"));
            }
        }
        let law = self.lobe_count_law;
        if law.min < 1 || !(law.min as f64 <= law.mean && law.mean <= law.max as f64) {
            return bad(format!(
                "lobe_count_law needs 1 <= min <= mean <= max, got {}/{}/{}",
                law.min, law.mean, law.max
            ));
        }
        let steps = 360.0 / self.az_step_deg;
        if !(self.az_step_deg > 0.0) || (steps - steps.round()).abs() > 1e-9 {
            return bad(format!("az_step_deg {} must divide 360", self.az_step_deg));
        }
        let capacity = max_separated_lobes(self.n_bins());
        if law.max as usize > capacity {
            return bad(format!(
                "lobe_count_law.max {} exceeds the {capacity} separated lobes a {}-bin ring holds",
                law.max,
                self.n_bins()
            ));
        }
        let [lo, hi] = self.distance_range_m;
        let dh = (self.tx_height_m - self.rx_height_m).abs();
        if !(lo > REFERENCE_DISTANCE_M && lo <= hi && lo > dh) {
            return bad(format!("distance_range_m [{lo}, {hi}] invalid"));
        }
        if !(self.carrier_hz > 0.0 && self.delay_resolution_ns > 0.0 && self.tap_dynamic_range_db > 0.0) {
            return bad("carrier_hz, delay_resolution_ns and tap_dynamic_range_db must be > 0".into());
        }
        if !(0.0..=1.0).contains(&self.nlos_fraction) {
            return bad("nlos_fraction must lie in [0, 1]".into());
        }
        if !(self.antenna_gain_dbi > 0.0) {
            return bad("antenna_gain_dbi must be > 0".into());
        }
        Ok(())
    }

    /// Per-bin noise floor of rendered sweeps: the received level of a link at
    /// the largest measurable path loss.
    pub fn noise_floor_dbm(&self) -> f64 {
        self.tx_power_dbm + 2.0 * self.antenna_gain_dbi - self.max_measurable_pl_db
    }

    /// CI mean path loss at `distance_m`.
    pub fn mean_path_loss_db(&self, distance_m: f64, condition: Condition) -> f64 {
        let n = match condition {
            Condition::Los => self.ple,
            Condition::Nlos => self.nlos_ple,
        };
        fspl(self.carrier_hz, REFERENCE_DISTANCE_M) + 10.0 * n * (distance_m / REFERENCE_DISTANCE_M).log10()
    }
}

/// Separated lobes (at least one empty bin between neighbours) a ring holds.
fn max_separated_lobes(n_bins: usize) -> usize {
    if n_bins < 2 {
        n_bins
    } else {
        n_bins / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "LOS")]
    Los,
    #[serde(rename = "NLOS")]
    Nlos,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropTap {
    pub delay_ns: f64,
    /// Received power for 0 dBm transmitted through isotropic antennas, mW.
    pub power_mw: f64,
    pub xpd_db: f64,
    pub class: PathClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DropLobe {
    /// Arrival offset from the RX-side LOS bearing, degrees.
    pub center_deg: f64,
    /// Departure offset from the TX-side LOS bearing, degrees.
    pub aod_center_deg: f64,
    /// Realized RMS delay spread of this lobe's taps, ns.
    pub rmsds_ns: f64,
    pub taps: Vec<DropTap>,
}

impl DropLobe {
    pub fn power_mw(&self) -> f64 {
        self.taps.iter().map(|t| t.power_mw).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDrop {
    pub seed: u64,
    pub distance_m: f64,
    pub condition: Condition,
    pub pl_db: f64,
    pub lobes: Vec<DropLobe>,
}

impl ChannelDrop {
    pub fn taps(&self) -> impl Iterator<Item = &DropTap> {
        self.lobes.iter().flat_map(|l| &l.taps)
    }

    pub fn total_power_mw(&self) -> f64 {
        self.taps().map(|t| t.power_mw).sum()
    }

    /// Co- over cross-polarized total power, dB.
    pub fn effective_xpd_db(&self) -> f64 {
        let cross: f64 = self.taps().map(|t| t.power_mw * db_to_linear(-t.xpd_db)).sum();
        linear_to_db(self.total_power_mw() / cross)
    }

    pub fn boresight_xpd_db(&self) -> Option<f64> {
        self.taps().find(|t| t.class == PathClass::Boresight).map(|t| t.xpd_db)
    }
}

fn normal(rng: &mut ChaCha8Rng, law: NormalLaw) -> f64 {
    if law.std_db == 0.0 {
        return law.mean_db;
    }
    Normal::new(law.mean_db, law.std_db).expect("validated std").sample(rng)
}

fn draw_lobe_count(rng: &mut ChaCha8Rng, law: LobeCountLaw) -> usize {
    let lambda = law.mean - law.min as f64;
    let extra = if lambda > 0.0 {
        Poisson::new(lambda).expect("positive rate").sample(rng) as u64
    } else {
        0
    };
    (law.min as u64 + extra).min(law.max as u64) as usize
}

/// Places `k` lobes on an `n`-bin ring so that no two are adjacent.
///
/// Each lobe is laid down as a two-bin block (lobe + guard bin) among
/// `n − 2k` free bins in random order. With `anchor_zero` the first lobe
/// sits at bin 0; otherwise the layout is rotated by a random offset.
fn place_lobes(rng: &mut ChaCha8Rng, n: usize, k: usize, anchor_zero: bool) -> Result<Vec<usize>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    if k == 1 {
        return Ok(vec![if anchor_zero { 0 } else { rng.random_range(0..n) }]);
    }
    if k > max_separated_lobes(n) {
        return Err(Error::Parameter(format!("cannot separate {k} lobes on a {n}-bin ring")));
    }
    let mut items: Vec<bool> = std::iter::repeat_n(true, k - anchor_zero as usize)
        .chain(std::iter::repeat_n(false, n - 2 * k))
        .collect();
    items.shuffle(rng);
    let mut pos = if anchor_zero { 2 } else { rng.random_range(0..n) };
    let mut bins = if anchor_zero { vec![0] } else { Vec::new() };
    for block in items {
        if block {
            bins.push(pos % n);
            pos += 2;
        } else {
            pos += 1;
        }
    }
    Ok(bins)
}

fn rms_of_grid(powers: &[f64], step: f64) -> f64 {
    let total: f64 = powers.iter().sum();
    let mean = powers.iter().enumerate().map(|(k, p)| p * k as f64 * step).sum::<f64>() / total;
    let var = powers
        .iter()
        .enumerate()
        .map(|(k, p)| p * (k as f64 * step - mean).powi(2))
        .sum::<f64>()
        / total;
    var.max(0.0).sqrt()
}

fn cluster_len(decay_ns: f64, step: f64, range_db: f64) -> usize {
    let len = (range_db / (10.0 * std::f64::consts::LOG10_E) * decay_ns / step).floor() as usize + 1;
    len.min(MAX_TAPS_PER_LOBE)
}

fn exponential_cluster(decay_ns: f64, step: f64, range_db: f64) -> Vec<f64> {
    (0..cluster_len(decay_ns, step, range_db))
        .map(|k| (-(k as f64) * step / decay_ns).exp())
        .collect()
}

/// RMS spread of [`exponential_cluster`] from running moments, without building it.
fn cluster_rms(decay_ns: f64, step: f64, range_db: f64) -> f64 {
    let ratio = (-step / decay_ns).exp();
    let (mut s0, mut s1, mut s2, mut p) = (0.0, 0.0, 0.0, 1.0);
    for k in 0..cluster_len(decay_ns, step, range_db) {
        let k = k as f64;
        s0 += p;
        s1 += p * k;
        s2 += p * k * k;
        p *= ratio;
    }
    let mean = s1 / s0;
    step * (s2 / s0 - mean * mean).max(0.0).sqrt()
}

/// Relative tap powers of a single-exponential cluster on a `step` grid whose
/// RMS delay spread matches `target_ns`, found by bisection on the decay
/// constant.
pub fn exponential_pdp_for_rmsds(target_ns: f64, step: f64, range_db: f64) -> Vec<f64> {
    if !(target_ns > 0.0) {
        return vec![1.0];
    }
    let (mut lo, mut hi) = (1e-3f64.ln(), 1e5f64.ln());
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if cluster_rms(mid.exp(), step, range_db) < target_ns {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let below = exponential_cluster(lo.exp(), step, range_db);
    let above = exponential_cluster(hi.exp(), step, range_db);
    if (rms_of_grid(&below, step) - target_ns).abs() < (rms_of_grid(&above, step) - target_ns).abs() {
        below
    } else {
        above
    }
}

/// Draws one channel realization. Deterministic in `(params, distance_m, condition, seed)`.
pub fn sample_drop(params: &SynthesisParams, distance_m: f64, condition: Condition, seed: u64) -> Result<ChannelDrop> {
    params.validate()?;
    let [lo, hi] = params.distance_range_m;
    if !(distance_m >= lo && distance_m <= hi) {
        return Err(Error::Parameter(format!(
            "distance {distance_m} m outside [{lo}, {hi}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shadow = normal(
        &mut rng,
        NormalLaw {
            mean_db: 0.0,
            std_db: params.shadow_sigma_db,
        },
    );
    let pl_db = params.mean_path_loss_db(distance_m, condition) + shadow;

    let k = draw_lobe_count(&mut rng, params.lobe_count_law);
    let los = condition == Condition::Los;
    let n_bins = params.n_bins();
    let aod_bins = place_lobes(&mut rng, n_bins, k, los)?;
    let aoa_bins = place_lobes(&mut rng, n_bins, k, los)?;

    let step = params.delay_resolution_ns;
    let tof_ns = distance_m / SPEED_OF_LIGHT * 1e9;
    let first_delay = (tof_ns / step).round() * step;
    let rmsds_law = LogNormal::new(params.rmsds_target_ns.log_mean, params.rmsds_target_ns.log_std)
        .map_err(|e| Error::Parameter(format!("rmsds_target_ns: {e}")))?;
    let k_factor = db_to_linear(params.los_k_factor_db);

    let mut lobes = Vec::with_capacity(k);
    for (i, (&aod, &aoa)) in aod_bins.iter().zip(&aoa_bins).enumerate() {
        let lobe_db = if i == 0 {
            0.0
        } else {
            -rng.random_range(0.0..=params.lobe_power_spread_db)
        };
        let excess_bins = if i == 0 || params.lobe_excess_delay_mean_ns == 0.0 {
            0.0
        } else {
            let u: f64 = rng.random();
            (-params.lobe_excess_delay_mean_ns * (1.0 - u).ln() / step).round()
        };
        let target = rmsds_law.sample(&mut rng);
        let mut rel = exponential_pdp_for_rmsds(target, step, params.tap_dynamic_range_db);
        let boresight = los && i == 0;
        if boresight && rel.len() > 1 {
            rel[0] = k_factor * rel[1..].iter().sum::<f64>();
        }
        let scale = db_to_linear(lobe_db) / rel.iter().sum::<f64>();
        let start = first_delay + excess_bins * step;
        let taps = rel
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let class = if boresight && j == 0 {
                    PathClass::Boresight
                } else {
                    PathClass::Reflection
                };
                let law = match class {
                    PathClass::Boresight => params.xpd_boresight,
                    PathClass::Reflection => params.xpd_reflection,
                };
                DropTap {
                    delay_ns: start + j as f64 * step,
                    power_mw: p * scale,
                    xpd_db: normal(&mut rng, law),
                    class,
                }
            })
            .collect::<Vec<_>>();
        let rmsds_ns = rms_of_grid(&rel, step);
        lobes.push(DropLobe {
            center_deg: wrap_360(aoa as f64 * params.az_step_deg),
            aod_center_deg: wrap_360(aod as f64 * params.az_step_deg),
            rmsds_ns,
            taps,
        });
    }

    // Normalize so the taps carry exactly the drawn path loss.
    let total: f64 = lobes.iter().map(DropLobe::power_mw).sum();
    let norm = db_to_linear(-pl_db) / total;
    for tap in lobes.iter_mut().flat_map(|l| l.taps.iter_mut()) {
        tap.power_mw *= norm;
    }
    Ok(ChannelDrop {
        seed,
        distance_m,
        condition,
        pl_db,
        lobes,
    })
}

/// Per-item seed derived from a campaign seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A rendered synthetic campaign.
#[derive(Clone, Debug)]
pub struct RenderedCampaign {
    pub manifest_path: PathBuf,
    pub drops: Vec<ChannelDrop>,
    /// VV then VH location per drop, in drop order.
    pub locations: Vec<LocationMeasurement>,
}

/// Distances spread evenly over the configured range.
pub fn campaign_distances(params: &SynthesisParams, n: usize) -> Vec<f64> {
    let [lo, hi] = params.distance_range_m;
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Conditions for `n` locations: `round(n · nlos_fraction)` NLOS flags at
/// seeded positions.
pub fn campaign_conditions(params: &SynthesisParams, n: usize, seed: u64) -> Vec<Condition> {
    let n_nlos = (n as f64 * params.nlos_fraction).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    let mut out = vec![Condition::Los; n];
    for i in rand::seq::index::sample(&mut rng, n, n_nlos.min(n)) {
        out[i] = Condition::Nlos;
    }
    out
}

/// Turns a drop into VV and VH measurements at a concrete geometry.
///
/// Each lobe becomes one pointing pair carrying its whole tap cluster. Bins
/// are written on the full delay grid between the lobe's first and last tap.
pub fn drop_to_locations(
    params: &SynthesisParams,
    drop: &ChannelDrop,
    index: usize,
    bearing_deg: f64,
) -> Result<[LocationMeasurement; 2]> {
    let dh = params.tx_height_m - params.rx_height_m;
    let horizontal = (drop.distance_m.powi(2) - dh.powi(2)).sqrt();
    if !horizontal.is_finite() {
        return Err(Error::Parameter(format!(
            "distance {} m shorter than the antenna height difference",
            drop.distance_m
        )));
    }
    let rad = bearing_deg.to_radians();
    let tx_pos_m = [0.0, 0.0, params.tx_height_m];
    let rx_pos_m = [horizontal * rad.cos(), horizontal * rad.sin(), params.rx_height_m];
    let antenna = |height_m| AntennaConfig {
        gain_dbi: params.antenna_gain_dbi,
        hpbw_deg: params.az_step_deg,
        az_step_deg: params.az_step_deg,
        height_m,
    };
    let offset_dbm = params.tx_power_dbm + 2.0 * params.antenna_gain_dbi;
    let noise = params.noise_floor_dbm();
    let step = params.delay_resolution_ns;

    let build = |pol: Polarization| -> Result<LocationMeasurement> {
        let mut sweeps = Vec::with_capacity(drop.lobes.len());
        for lobe in &drop.lobes {
            let first = lobe.taps.first().map_or(0.0, |t| t.delay_ns);
            let last = lobe.taps.last().map_or(0.0, |t| t.delay_ns);
            let n = ((last - first) / step).round() as usize + 1;
            let mut mw = vec![0.0; n];
            for t in &lobe.taps {
                let cross = if pol == Polarization::VH {
                    db_to_linear(-t.xpd_db)
                } else {
                    1.0
                };
                mw[((t.delay_ns - first) / step).round() as usize] += t.power_mw * cross;
            }
            let delays = (0..n).map(|k| first + k as f64 * step).collect();
            let powers = mw.iter().map(|&p| offset_dbm + linear_to_db(p)).collect();
            sweeps.push(DirectionalPdp::new(
                wrap_360(bearing_deg + lobe.aod_center_deg),
                wrap_360(bearing_deg + 180.0 + lobe.center_deg),
                delays,
                powers,
                noise,
            )?);
        }
        Ok(LocationMeasurement {
            tx_id: format!("TX{}", index + 1),
            rx_id: format!("RX{}", index + 1),
            tx_pos_m,
            rx_pos_m,
            polarization: pol,
            los: drop.condition == Condition::Los,
            sweeps,
            tx_antenna: antenna(params.tx_height_m),
            rx_antenna: antenna(params.rx_height_m),
            tx_power_dbm: params.tx_power_dbm,
        })
    };
    Ok([build(Polarization::VV)?, build(Polarization::VH)?])
}

/// Draws `n_locations` drops and writes them, in both polarizations, as a
/// campaign under `out_dir`, together with the ground truth in `drops.json`.
pub fn render_campaign(
    params: &SynthesisParams,
    n_locations: usize,
    seed: u64,
    out_dir: impl AsRef<Path>,
) -> Result<RenderedCampaign> {
    if n_locations == 0 {
        return Err(Error::Parameter("n_locations must be >= 1".into()));
    }
    params.validate()?;
    let out_dir = out_dir.as_ref();
    let distances = campaign_distances(params, n_locations);
    let conditions = campaign_conditions(params, n_locations, seed);
    let mut drops = Vec::with_capacity(n_locations);
    let mut locations = Vec::with_capacity(2 * n_locations);
    for (i, (&d, &cond)) in distances.iter().zip(&conditions).enumerate() {
        let drop_seed = derive_seed(seed, i as u64);
        let drop = sample_drop(params, d, cond, drop_seed)?;
        let mut geo = ChaCha8Rng::seed_from_u64(derive_seed(drop_seed, 0));
        let bearing = geo.random_range(0..params.n_bins()) as f64 * params.az_step_deg;
        locations.extend(drop_to_locations(params, &drop, i, bearing)?);
        drops.push(drop);
    }
    let manifest_path = write_campaign(
        out_dir,
        &format!("synthetic-{seed}"),
        params.carrier_hz,
        params.delay_resolution_ns,
        &locations,
    )?;
    let truth = out_dir.join("drops.json");
    let mut json = serde_json::to_string_pretty(&drops).expect("drops serialize");
    json.push('\n');
    std::fs::write(&truth, json).map_err(|e| Error::io(&truth, e))?;
    log::info!("rendered {} synthetic locations to {}", n_locations, out_dir.display());
    Ok(RenderedCampaign {
        manifest_path,
        drops,
        locations,
    })
}
