//! Post-processing for directional sub-THz channel sounder campaigns and a
//! drop-based generator that reproduces their statistics.
//!
//! The analysis side ingests rotating-horn sweeps (one power delay profile per
//! TX/RX pointing pair), rebuilds omnidirectional PDPs and angular spectra, and
//! reports delay spread, angular spread, spatial lobes, close-in path loss fits
//! and cross-polarization discrimination. [`synth`] goes the other way and
//! renders synthetic campaigns in the same file format.
//!
//! ```
//! use subthz_chan::pathloss::fspl;
//!
//! let pl = fspl(142e9, 1.0);
//! assert!((pl - 75.4936).abs() < 1e-3);
//! ```

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod delay;
pub mod error;
pub mod measurement;
pub mod pathloss;
pub mod pipeline;
pub mod stats;
pub mod synth;
pub mod units;
pub mod xpd;

pub use error::{Error, Result};
pub use measurement::{
    ingest_campaign, AnalysisConfig, AntennaConfig, Campaign, DirectionalPdp, LocationMeasurement, Pointing,
    Polarization,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/measurement-data.md")]
    mod measurement_data {}
    #[doc = include_str!("../../../book/src/delay-spread.md")]
    mod delay_spread {}
    #[doc = include_str!("../../../book/src/angular-spread.md")]
    mod angular_spread {}
    #[doc = include_str!("../../../book/src/path-loss.md")]
    mod path_loss {}
    #[doc = include_str!("../../../book/src/xpd.md")]
    mod xpd {}
    #[doc = include_str!("../../../book/src/synthesis.md")]
    mod synthesis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
