//! End-to-end analysis run and report bundle.
//!
//! Every file in the bundle is a pure function of the input files and the
//! [`RunConfig`]: locations are processed in `(tx_id, rx_id)` order, CSV numbers
//! carry four decimals, and nothing time-dependent is written.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::angular::{campaign_angular_summary, AngularSummary};
use crate::delay::{campaign_delay_summary, DelaySummary};
use crate::error::{Error, Result};
use crate::measurement::{ingest_campaign, Campaign, LocationMeasurement, Polarization};
use crate::pathloss::{
    directional_path_loss, fit_ci, fit_cix, omni_path_loss, CiFit, CixFit, PathLossKind, PathLossSample,
};
use crate::stats::Summary;
use crate::xpd::{directional_xpd, xpd_summary, DirectionalXpd, XpdClassSummary};

pub const DEFAULT_THRESHOLDS_DB: [f64; 2] = [20.0, 30.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFormats {
    pub csv: bool,
    pub json: bool,
}

impl Default for ReportFormats {
    fn default() -> Self {
        ReportFormats { csv: true, json: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub manifest: PathBuf,
    pub thresholds_db: Vec<f64>,
    /// Overrides the manifest carrier when set.
    pub carrier_hz: Option<f64>,
    pub out_dir: PathBuf,
    /// Recorded in the report; the analysis itself draws no random numbers.
    pub seed: Option<u64>,
    pub formats: ReportFormats,
    /// Fit path loss and XPD over NLOS locations too. Off by default.
    pub include_nlos: bool,
}

impl RunConfig {
    pub fn new(manifest: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            manifest: manifest.into(),
            thresholds_db: DEFAULT_THRESHOLDS_DB.to_vec(),
            carrier_hz: None,
            out_dir: out_dir.into(),
            seed: None,
            formats: ReportFormats::default(),
            include_nlos: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_thresholds(&self.thresholds_db)?;
        if let Some(f) = self.carrier_hz {
            if !(f > 0.0 && f.is_finite()) {
                return Err(Error::validation("carrier_hz", format!("must be > 0, got {f}")));
            }
        }
        if !self.formats.csv && !self.formats.json {
            return Err(Error::validation("formats", "select at least one of csv, json"));
        }
        Ok(())
    }
}

pub fn validate_thresholds(thresholds_db: &[f64]) -> Result<()> {
    if thresholds_db.is_empty() {
        return Err(Error::validation("thresholds_db", "at least one threshold is required"));
    }
    if let Some(t) = thresholds_db.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::validation("thresholds_db", format!("must be > 0, got {t}")));
    }
    Ok(())
}

/// Locations of one polarization in canonical `(tx_id, rx_id)` order.
pub fn locations_of(campaign: &Campaign, pol: Polarization) -> Vec<&LocationMeasurement> {
    let mut v: Vec<_> = campaign.locations.iter().filter(|l| l.polarization == pol).collect();
    v.sort_by(|a, b| (&a.tx_id, &a.rx_id).cmp(&(&b.tx_id, &b.rx_id)));
    v
}

/// Co-/cross-polarized measurement pairs sharing a TX-RX pair.
pub fn polarization_pairs(campaign: &Campaign) -> Vec<(&LocationMeasurement, &LocationMeasurement)> {
    let vh: BTreeMap<(&str, &str), &LocationMeasurement> = locations_of(campaign, Polarization::VH)
        .into_iter()
        .map(|l| ((l.tx_id.as_str(), l.rx_id.as_str()), l))
        .collect();
    locations_of(campaign, Polarization::VV)
        .into_iter()
        .filter_map(|vv| vh.get(&(vv.tx_id.as_str(), vv.rx_id.as_str())).map(|&vh| (vv, vh)))
        .collect()
}

/// Path loss samples of one polarization and kind. Locations or directions
/// without detectable power contribute nothing.
pub fn path_loss_samples(
    campaign: &Campaign,
    pol: Polarization,
    kind: PathLossKind,
    include_nlos: bool,
) -> Result<Vec<PathLossSample>> {
    let mut out = Vec::new();
    for loc in locations_of(campaign, pol) {
        if !include_nlos && !loc.los {
            continue;
        }
        if kind == PathLossKind::Omni {
            match omni_path_loss(loc) {
                Ok(s) => out.push(s),
                Err(Error::NoSignal(_)) => log::info!("{}: no detectable power, excluded from fit", loc.label()),
                Err(e) => return Err(e),
            }
        } else {
            out.extend(directional_path_loss(loc).into_iter().filter(|s| s.kind == kind));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathLossFitReport {
    pub polarization: Polarization,
    pub kind: PathLossKind,
    pub ple: f64,
    pub sigma_db: f64,
    /// CIX offset against the co-polarized fit of the same kind; VH only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xpd_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cix_sigma_db: Option<f64>,
    pub n_samples: usize,
    pub fspl_anchor_db: f64,
}

/// CI fit of one polarization and kind; for VH also the CIX offset over the
/// VV fit of the same kind.
pub fn fit_path_loss(
    campaign: &Campaign,
    pol: Polarization,
    kind: PathLossKind,
    carrier_hz: f64,
    include_nlos: bool,
) -> Result<(PathLossFitReport, Vec<PathLossSample>)> {
    let samples = path_loss_samples(campaign, pol, kind, include_nlos)?;
    let ci = fit_ci(&samples, carrier_hz)?;
    let cix = if pol == Polarization::VH {
        let vv = path_loss_samples(campaign, Polarization::VV, kind, include_nlos)?;
        Some(fit_cix(&samples, &fit_ci(&vv, carrier_hz)?, carrier_hz)?)
    } else {
        None
    };
    Ok((fit_report(pol, kind, &ci, cix.as_ref()), samples))
}

fn fit_report(pol: Polarization, kind: PathLossKind, ci: &CiFit, cix: Option<&CixFit>) -> PathLossFitReport {
    PathLossFitReport {
        polarization: pol,
        kind,
        ple: ci.ple,
        sigma_db: ci.sigma_db,
        xpd_db: cix.map(|c| c.xpd_db),
        cix_sigma_db: cix.map(|c| c.sigma_db),
        n_samples: ci.n_samples,
        fspl_anchor_db: ci.fspl_anchor_db,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    /// Relative to the manifest directory, `/`-separated.
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub manifest: String,
    pub thresholds_db: Vec<f64>,
    pub carrier_hz: f64,
    pub seed: Option<u64>,
    pub include_nlos: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathLossReport {
    pub omni_vv: CiFit,
    pub omni_vh: Option<CiFit>,
    pub cix: Option<CixFit>,
    /// Per-class directional fits that had enough samples.
    pub directional: Vec<PathLossFitReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ReportConfig,
    pub inputs: Vec<InputDigest>,
    pub campaign_id: String,
    pub n_locations: usize,
    pub pathloss: PathLossReport,
    pub delay: Vec<DelaySummary>,
    pub angular: Vec<AngularSummary>,
    pub xpd: Vec<XpdClassSummary>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    /// Bundle files written, in a fixed order.
    pub files: Vec<PathBuf>,
}

fn optional_fit<T>(what: &str, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegenerateFit(m)) => {
            log::warn!("{what}: skipped ({m})");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn digest_inputs(campaign: &Campaign, manifest: &Path) -> Result<Vec<InputDigest>> {
    let base = manifest.parent().unwrap_or(Path::new(""));
    campaign
        .source_files
        .iter()
        .map(|p| {
            let bytes = fs::read(p).map_err(|e| Error::io(p, e))?;
            let rel = p.strip_prefix(base).unwrap_or(p);
            let path = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            Ok(InputDigest {
                path,
                sha256: hex::encode(Sha256::digest(&bytes)),
            })
        })
        .collect()
}

/// Runs every analysis stage on an ingested campaign.
pub fn analyze(campaign: &Campaign, config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let carrier_hz = config.carrier_hz.unwrap_or(campaign.carrier_hz);
    let nlos = config.include_nlos;

    let vv_omni = path_loss_samples(campaign, Polarization::VV, PathLossKind::Omni, nlos)?;
    let omni_vv = fit_ci(&vv_omni, carrier_hz)?;
    let vh_omni = path_loss_samples(campaign, Polarization::VH, PathLossKind::Omni, nlos)?;
    let omni_vh = optional_fit("VH CI fit", fit_ci(&vh_omni, carrier_hz))?;
    let cix = optional_fit("CIX fit", fit_cix(&vh_omni, &omni_vv, carrier_hz))?;

    let mut directional = Vec::new();
    for pol in [Polarization::VV, Polarization::VH] {
        for kind in [PathLossKind::DirB, PathLossKind::DirNBB, PathLossKind::DirNB] {
            let what = format!("{pol} {} fit", kind.as_str());
            if let Some((fit, _)) = optional_fit(&what, fit_path_loss(campaign, pol, kind, carrier_hz, nlos))? {
                directional.push(fit);
            }
        }
    }

    let vv: Vec<LocationMeasurement> = locations_of(campaign, Polarization::VV).into_iter().cloned().collect();
    let mut delay = Vec::with_capacity(config.thresholds_db.len());
    let mut angular = Vec::with_capacity(config.thresholds_db.len());
    for &t in &config.thresholds_db {
        delay.push(campaign_delay_summary(&vv, t)?);
        angular.push(campaign_angular_summary(&vv, t)?);
    }

    let xpd = xpd_summary(&directional_xpds(campaign, nlos)?);
    let manifest_name = config.manifest.file_name().map_or_else(
        || config.manifest.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    );
    Ok(Report {
        config: ReportConfig {
            manifest: manifest_name,
            thresholds_db: config.thresholds_db.clone(),
            carrier_hz,
            seed: config.seed,
            include_nlos: nlos,
        },
        inputs: digest_inputs(campaign, &config.manifest)?,
        campaign_id: campaign.campaign_id.clone(),
        n_locations: campaign.locations.len(),
        pathloss: PathLossReport {
            omni_vv,
            omni_vh,
            cix,
            directional,
        },
        delay,
        angular,
        xpd,
    })
}

/// Directional XPD of every VV/VH pair, in canonical order.
pub fn directional_xpds(campaign: &Campaign, include_nlos: bool) -> Result<Vec<DirectionalXpd>> {
    let mut out = Vec::new();
    for (vv, vh) in polarization_pairs(campaign) {
        if include_nlos || vv.los {
            out.extend(directional_xpd(vv, vh)?);
        }
    }
    Ok(out)
}

/// Ingests, analyzes, and writes the report bundle to `config.out_dir`.
pub fn run_pipeline(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let campaign = ingest_campaign(&config.manifest)?;
    log::info!(
        "ingested {} locations from {}",
        campaign.locations.len(),
        config.manifest.display()
    );
    let report = analyze(&campaign, config)?;
    let out = &config.out_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let mut bundle: Vec<(&str, String)> = Vec::new();
    if config.formats.csv {
        bundle.push(("delay_stats.csv", delay_table_csv(&report.delay)));
        bundle.push(("angular_stats.csv", angular_table_csv(&report.angular)));
        let mut samples = Vec::new();
        for pol in [Polarization::VV, Polarization::VH] {
            for kind in [
                PathLossKind::Omni,
                PathLossKind::DirB,
                PathLossKind::DirNBB,
                PathLossKind::DirNB,
            ] {
                samples.extend(path_loss_samples(&campaign, pol, kind, config.include_nlos)?);
            }
        }
        bundle.push(("pathloss_samples.csv", path_loss_samples_csv(&samples)));
        bundle.push(("pathloss_fits.csv", path_loss_fits_csv(&report.pathloss)));
        bundle.push(("xpd.csv", xpd_csv(&directional_xpds(&campaign, config.include_nlos)?)));
        bundle.push(("xpd_cdf.csv", xpd_cdf_csv(&report.xpd)));
    }
    if config.formats.json {
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        bundle.push(("report.json", json));
    }
    let mut files = Vec::with_capacity(bundle.len());
    for (name, body) in bundle {
        let path = out.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        files.push(path);
    }
    Ok(RunOutput { report, files })
}

const SUMMARY_COLUMNS: &str = "Min,Max,Mean,Median,90%";

fn summary_row(out: &mut String, label: &str, threshold_db: f64, s: &Summary) {
    writeln!(
        out,
        "{label},{threshold_db},{:.4},{:.4},{:.4},{:.4},{:.4}",
        s.min, s.max, s.mean, s.median, s.p90
    )
    .unwrap();
}

/// Delay table: Omni/Dir × RMSDS/MDS × threshold rows.
pub fn delay_table_csv(rows: &[DelaySummary]) -> String {
    let mut out = format!("statistic,threshold_db,{SUMMARY_COLUMNS}\n");
    type Pick = fn(&DelaySummary) -> &Summary;
    let groups: [(&str, Pick); 4] = [
        ("Omni RMSDS (ns)", |d| &d.omni_rmsds),
        ("Omni MDS (ns)", |d| &d.omni_mds),
        ("Dir RMSDS (ns)", |d| &d.dir_rmsds),
        ("Dir MDS (ns)", |d| &d.dir_mds),
    ];
    for (label, pick) in groups {
        for d in rows {
            summary_row(&mut out, label, d.threshold_db, pick(d));
        }
    }
    out
}

/// Angular table: lobe counts and RMS angular spread per side and threshold.
pub fn angular_table_csv(rows: &[AngularSummary]) -> String {
    let mut out = format!("statistic,threshold_db,{SUMMARY_COLUMNS}\n");
    type Pick = fn(&AngularSummary) -> &Summary;
    let groups: [(&str, Pick); 4] = [
        ("#AOA SL", |a| &a.aoa_lobes),
        ("#AOD SL", |a| &a.aod_lobes),
        ("AOA RMSAS (deg)", |a| &a.aoa_rmsas),
        ("AOD RMSAS (deg)", |a| &a.aod_rmsas),
    ];
    for (label, pick) in groups {
        for a in rows {
            summary_row(&mut out, label, a.threshold_db, pick(a));
        }
    }
    out
}

/// Scatter of path loss samples.
pub fn path_loss_samples_csv(samples: &[PathLossSample]) -> String {
    let mut out = String::from("polarization,kind,tx_id,rx_id,los,tx_az_deg,rx_az_deg,distance_m,pl_db\n");
    for s in samples {
        let (tx, rx) = s.pointing.map_or((String::new(), String::new()), |p| {
            (format!("{:.4}", p.tx_az_deg), format!("{:.4}", p.rx_az_deg))
        });
        writeln!(
            out,
            "{},{},{},{},{},{tx},{rx},{:.4},{:.4}",
            s.polarization,
            s.kind.as_str(),
            s.tx_id,
            s.rx_id,
            s.los,
            s.distance_m,
            s.pl_db
        )
        .unwrap();
    }
    out
}

fn opt4(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.4}"))
}

pub fn path_loss_fits_csv(p: &PathLossReport) -> String {
    let mut out = String::from("model,polarization,kind,ple,sigma_db,xpd_db,n_samples\n");
    let ci = |out: &mut String, pol: &str, f: &CiFit| {
        writeln!(out, "CI,{pol},omni,{:.4},{:.4},,{}", f.ple, f.sigma_db, f.n_samples).unwrap();
    };
    ci(&mut out, "VV", &p.omni_vv);
    if let Some(f) = &p.omni_vh {
        ci(&mut out, "VH", f);
    }
    if let Some(c) = &p.cix {
        writeln!(
            out,
            "CIX,VH,omni,{:.4},{:.4},{:.4},{}",
            c.ple_vv, c.sigma_db, c.xpd_db, c.n_samples
        )
        .unwrap();
    }
    for d in &p.directional {
        writeln!(
            out,
            "CI,{},{},{:.4},{:.4},{},{}",
            d.polarization,
            d.kind.as_str(),
            d.ple,
            d.sigma_db,
            opt4(d.xpd_db),
            d.n_samples
        )
        .unwrap();
    }
    out
}

pub fn xpd_csv(xpds: &[DirectionalXpd]) -> String {
    let mut out = String::from("tx_id,rx_id,tx_az_deg,rx_az_deg,class,xpd_db\n");
    for x in xpds {
        writeln!(
            out,
            "{},{},{:.4},{:.4},{},{:.4}",
            x.tx_id,
            x.rx_id,
            x.direction.tx_az_deg,
            x.direction.rx_az_deg,
            x.path_class.as_str(),
            x.xpd_db
        )
        .unwrap();
    }
    out
}

pub fn xpd_cdf_csv(summaries: &[XpdClassSummary]) -> String {
    let mut out = String::from("class,xpd_db,cdf\n");
    for s in summaries {
        for (x, p) in &s.cdf {
            writeln!(out, "{},{x:.4},{p:.4}", s.class.as_str()).unwrap();
        }
    }
    out
}
