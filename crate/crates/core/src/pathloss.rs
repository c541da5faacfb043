//! Path loss samples, direction classes, and close-in (CI / CIX) model fits.
//!
//! The CI model anchors a straight line at the 1 m free-space loss:
//!
//! ```text
//! PL(d) = FSPL(f, 1 m) + 10·n·log10(d / 1 m) + X_σ
//! ```
//!
//! and the CIX variant reuses the co-polarized exponent `n` and adds one
//! constant cross-polarization offset. Both single parameters are MMSE
//! estimates in closed form.

use serde::{Deserialize, Serialize};

use crate::delay::synthesize_omni_pdp;
use crate::error::{Error, Result};
use crate::measurement::{LocationMeasurement, Pointing, Polarization, REFERENCE_DISTANCE_M};
use crate::units::{circular_distance, db_to_linear, linear_to_db, SPEED_OF_LIGHT};

/// Free-space path loss `20·log10(4π·d·f/c)`, dB.
pub fn fspl(carrier_hz: f64, distance_m: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * distance_m * carrier_hz / SPEED_OF_LIGHT).log10()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PathLossKind {
    Omni,
    DirB,
    DirNBB,
    DirNB,
}

impl PathLossKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PathLossKind::Omni => "omni",
            PathLossKind::DirB => "B",
            PathLossKind::DirNBB => "NBB",
            PathLossKind::DirNB => "NB",
        }
    }
}

impl std::str::FromStr for PathLossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "omni" | "Omni" => Ok(PathLossKind::Omni),
            "B" => Ok(PathLossKind::DirB),
            "NBB" => Ok(PathLossKind::DirNBB),
            "NB" => Ok(PathLossKind::DirNB),
            _ => Err(Error::validation("kind", format!("expected omni|B|NBB|NB, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathLossSample {
    pub distance_m: f64,
    pub pl_db: f64,
    pub polarization: Polarization,
    pub kind: PathLossKind,
    pub los: bool,
    pub tx_id: String,
    pub rx_id: String,
    /// Set for directional samples.
    pub pointing: Option<Pointing>,
}

/// Omnidirectional path loss: transmit power minus the gain-free received power
/// summed over all detectable bins and directions.
pub fn omni_path_loss(loc: &LocationMeasurement) -> Result<PathLossSample> {
    let omni = synthesize_omni_pdp(loc)?;
    Ok(PathLossSample {
        distance_m: loc.distance_m(),
        pl_db: loc.tx_power_dbm - linear_to_db(omni.total_power_mw()),
        polarization: loc.polarization,
        kind: PathLossKind::Omni,
        los: loc.los,
        tx_id: loc.tx_id.clone(),
        rx_id: loc.rx_id.clone(),
        pointing: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DirectionClass {
    Boresight,
    NonBoresightBest,
    NonBoresight,
}

impl DirectionClass {
    pub fn kind(self) -> PathLossKind {
        match self {
            DirectionClass::Boresight => PathLossKind::DirB,
            DirectionClass::NonBoresightBest => PathLossKind::DirNBB,
            DirectionClass::NonBoresight => PathLossKind::DirNB,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedDirection {
    pub pointing: Pointing,
    pub class: DirectionClass,
    /// Received power at the antenna ports (gains included), dBm.
    pub received_dbm: f64,
}

/// Splits the detectable directions of a location into B / NBB / NB.
///
/// B is geometric: the pair whose TX and RX azimuths both lie within half a
/// step of the line-of-sight bearings, closest first. It exists only for LOS
/// locations and only if that pair was detected. NBB is the strongest of the
/// remaining directions; NB holds the rest. Output follows sweep order.
pub fn classify_directions(loc: &LocationMeasurement) -> Result<Vec<ClassifiedDirection>> {
    let detected: Vec<(Pointing, f64)> = loc
        .sweeps
        .iter()
        .filter(|s| s.is_detectable())
        .map(|s| {
            let mw: f64 = s.above_noise().map(|(_, p)| db_to_linear(p)).sum();
            (s.pointing(), linear_to_db(mw))
        })
        .collect();
    if detected.is_empty() {
        return Err(Error::NoSignal(format!("no detectable direction at {}", loc.label())));
    }

    let boresight = if loc.los {
        let (tx_bearing, rx_bearing) = (loc.tx_los_bearing_deg(), loc.rx_los_bearing_deg());
        let (tx_tol, rx_tol) = (
            loc.tx_antenna.az_step_deg / 2.0 + 1e-9,
            loc.rx_antenna.az_step_deg / 2.0 + 1e-9,
        );
        detected
            .iter()
            .enumerate()
            .filter_map(|(i, (pt, dbm))| {
                let dt = circular_distance(pt.tx_az_deg, tx_bearing);
                let dr = circular_distance(pt.rx_az_deg, rx_bearing);
                (dt <= tx_tol && dr <= rx_tol).then_some((i, dt + dr, *dbm))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(b.2.total_cmp(&a.2)))
            .map(|c| c.0)
    } else {
        None
    };

    let best = detected
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != boresight)
        .fold(None::<(usize, f64)>, |acc, (i, d)| match acc {
            Some((_, p)) if p >= d.1 => acc,
            _ => Some((i, d.1)),
        })
        .map(|b| b.0);

    Ok(detected
        .into_iter()
        .enumerate()
        .map(|(i, (pointing, received_dbm))| ClassifiedDirection {
            pointing,
            class: if Some(i) == boresight {
                DirectionClass::Boresight
            } else if Some(i) == best {
                DirectionClass::NonBoresightBest
            } else {
                DirectionClass::NonBoresight
            },
            received_dbm,
        })
        .collect())
}

/// One sample per detectable pointing pair: `Ptx + Gtx + Grx − Prx(dir)`.
pub fn directional_path_loss(loc: &LocationMeasurement) -> Vec<PathLossSample> {
    let Ok(classes) = classify_directions(loc) else {
        return Vec::new();
    };
    let budget = loc.tx_power_dbm + loc.total_gain_dbi();
    let distance_m = loc.distance_m();
    classes
        .into_iter()
        .map(|c| PathLossSample {
            distance_m,
            pl_db: budget - c.received_dbm,
            polarization: loc.polarization,
            kind: c.class.kind(),
            los: loc.los,
            tx_id: loc.tx_id.clone(),
            rx_id: loc.rx_id.clone(),
            pointing: Some(c.pointing),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CiFit {
    pub ple: f64,
    pub sigma_db: f64,
    pub n_samples: usize,
    pub fspl_anchor_db: f64,
}

impl CiFit {
    /// Model mean at `distance_m`.
    pub fn predict(&self, distance_m: f64) -> f64 {
        self.fspl_anchor_db + 10.0 * self.ple * (distance_m / REFERENCE_DISTANCE_M).log10()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CixFit {
    pub xpd_db: f64,
    pub sigma_db: f64,
    pub ple_vv: f64,
    pub n_samples: usize,
}

/// `(10·log10(d/d0), PL − FSPL(f, d0))` sorted for order-free accumulation.
fn regressors(samples: &[PathLossSample], anchor: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(samples.len());
    for s in samples {
        if !(s.distance_m >= REFERENCE_DISTANCE_M) {
            return Err(Error::validation(
                "distance_m",
                format!("{} m is below the 1 m reference distance", s.distance_m),
            ));
        }
        if !s.pl_db.is_finite() {
            return Err(Error::validation("pl_db", "non-finite path loss"));
        }
        out.push((10.0 * (s.distance_m / REFERENCE_DISTANCE_M).log10(), s.pl_db - anchor));
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    Ok(out)
}

fn check_grouping(samples: &[PathLossSample]) -> Result<()> {
    if let Some(first) = samples.first() {
        if samples
            .iter()
            .any(|s| s.polarization != first.polarization || s.kind != first.kind)
        {
            return Err(Error::validation(
                "samples",
                "CI fit requires a single polarization and kind",
            ));
        }
    }
    Ok(())
}

/// MMSE fit of the single-parameter CI model.
///
/// `n = Σ a·b / Σ a²` with `a = 10·log10(d/d0)` and `b = PL − FSPL(f, d0)`;
/// σ is the population RMS of the residuals.
pub fn fit_ci(samples: &[PathLossSample], carrier_hz: f64) -> Result<CiFit> {
    if samples.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "CI fit needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    check_grouping(samples)?;
    let anchor = fspl(carrier_hz, REFERENCE_DISTANCE_M);
    let ab = regressors(samples, anchor)?;
    let saa: f64 = ab.iter().map(|(a, _)| a * a).sum();
    if !(saa > 0.0) {
        return Err(Error::DegenerateFit("all samples at the reference distance".into()));
    }
    let sab: f64 = ab.iter().map(|(a, b)| a * b).sum();
    let ple = sab / saa;
    let sse: f64 = ab.iter().map(|(a, b)| (b - ple * a).powi(2)).sum();
    Ok(CiFit {
        ple,
        sigma_db: (sse / ab.len() as f64).sqrt(),
        n_samples: ab.len(),
        fspl_anchor_db: anchor,
    })
}

/// MMSE cross-polarization offset on top of the co-polarized CI line.
pub fn fit_cix(vh_samples: &[PathLossSample], ci_vv: &CiFit, carrier_hz: f64) -> Result<CixFit> {
    if vh_samples.is_empty() {
        return Err(Error::DegenerateFit(
            "CIX fit needs at least one cross-polarized sample".into(),
        ));
    }
    check_grouping(vh_samples)?;
    let anchor = fspl(carrier_hz, REFERENCE_DISTANCE_M);
    let excess: Vec<f64> = regressors(vh_samples, anchor)?
        .into_iter()
        .map(|(a, b)| b - ci_vv.ple * a)
        .collect();
    let n = excess.len() as f64;
    let xpd = excess.iter().sum::<f64>() / n;
    let sigma = (excess.iter().map(|e| (e - xpd).powi(2)).sum::<f64>() / n).sqrt();
    Ok(CixFit {
        xpd_db: xpd,
        sigma_db: sigma,
        ple_vv: ci_vv.ple,
        n_samples: excess.len(),
    })
}
