//! Directional cross-polarization discrimination.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{LocationMeasurement, Pointing};
use crate::pathloss::{classify_directions, directional_path_loss, DirectionClass, PathLossKind};
use crate::stats::mean_std;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PathClass {
    Boresight,
    Reflection,
}

impl PathClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PathClass::Boresight => "boresight",
            PathClass::Reflection => "reflection",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalXpd {
    pub direction: Pointing,
    pub xpd_db: f64,
    pub path_class: PathClass,
    pub tx_id: String,
    pub rx_id: String,
}

/// Boresight iff `direction` is the location's B direction; anything else,
/// including every NLOS direction, is a reflection.
pub fn classify_path(loc: &LocationMeasurement, direction: Pointing) -> PathClass {
    let key = direction.key();
    let is_b = classify_directions(loc).is_ok_and(|c| {
        c.iter()
            .any(|d| d.class == DirectionClass::Boresight && d.pointing.key() == key)
    });
    if is_b {
        PathClass::Boresight
    } else {
        PathClass::Reflection
    }
}

/// XPD of every pointing pair detectable under both polarizations:
/// `PL_VH(dir) − PL_VV(dir)`.
///
/// Classes come from the co-polarized location. No common direction yields an
/// empty vector.
pub fn directional_xpd(loc_vv: &LocationMeasurement, loc_vh: &LocationMeasurement) -> Result<Vec<DirectionalXpd>> {
    if loc_vv.tx_id != loc_vh.tx_id || loc_vv.rx_id != loc_vh.rx_id {
        return Err(Error::validation(
            "locations",
            format!("{} and {} are different TX-RX pairs", loc_vv.label(), loc_vh.label()),
        ));
    }
    if loc_vv.polarization == loc_vh.polarization {
        return Err(Error::validation(
            "polarization",
            format!("{} and {} share a polarization", loc_vv.label(), loc_vh.label()),
        ));
    }
    let (co, cross) = if loc_vv.polarization == crate::measurement::Polarization::VV {
        (loc_vv, loc_vh)
    } else {
        (loc_vh, loc_vv)
    };
    let cross_pl: HashMap<(i64, i64), f64> = directional_path_loss(cross)
        .into_iter()
        .filter_map(|s| s.pointing.map(|p| (p.key(), s.pl_db)))
        .collect();
    Ok(directional_path_loss(co)
        .into_iter()
        .filter_map(|s| {
            let pointing = s.pointing?;
            let vh = cross_pl.get(&pointing.key())?;
            Some(DirectionalXpd {
                direction: pointing,
                xpd_db: vh - s.pl_db,
                path_class: if s.kind == PathLossKind::DirB {
                    PathClass::Boresight
                } else {
                    PathClass::Reflection
                },
                tx_id: co.tx_id.clone(),
                rx_id: co.rx_id.clone(),
            })
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XpdClassSummary {
    pub class: PathClass,
    pub mean_db: f64,
    pub std_db: f64,
    pub n: usize,
    /// Empirical CDF as ascending `(xpd_db, k/N)` pairs.
    pub cdf: Vec<(f64, f64)>,
}

/// Population mean/std and empirical CDF per class; empty classes are omitted.
pub fn xpd_summary(xpds: &[DirectionalXpd]) -> Vec<XpdClassSummary> {
    [PathClass::Boresight, PathClass::Reflection]
        .into_iter()
        .filter_map(|class| {
            let mut v: Vec<f64> = xpds
                .iter()
                .filter(|x| x.path_class == class)
                .map(|x| x.xpd_db)
                .collect();
            if v.is_empty() {
                return None;
            }
            v.sort_by(f64::total_cmp);
            let (mean_db, std_db) = mean_std(&v);
            let n = v.len();
            let cdf = v
                .iter()
                .enumerate()
                .map(|(k, &x)| (x, (k + 1) as f64 / n as f64))
                .collect();
            Some(XpdClassSummary {
                class,
                mean_db,
                std_db,
                n,
                cdf,
            })
        })
        .collect()
}
