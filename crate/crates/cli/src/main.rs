use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subthz_chan::angular::{
    angular_stats, campaign_angular_summary, extract_spatial_lobes, power_angular_spectrum, Side,
};
use subthz_chan::delay::campaign_delay_summary;
use subthz_chan::measurement::{ingest_campaign, Campaign, LocationMeasurement, Polarization};
use subthz_chan::pathloss::PathLossKind;
use subthz_chan::pipeline::{
    angular_table_csv, delay_table_csv, directional_xpds, fit_path_loss, locations_of, path_loss_samples_csv,
    run_pipeline, validate_thresholds, xpd_csv, ReportFormats, RunConfig, DEFAULT_THRESHOLDS_DB,
};
use subthz_chan::synth::{render_campaign, SynthesisParams};
use subthz_chan::xpd::xpd_summary;
use subthz_chan::{Error, Result};

#[derive(Parser)]
#[command(
    name = "subthz-chan",
    version,
    about = "Directional channel-sounder analysis and drop synthesis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a campaign and list its locations.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Close-in path loss fits.
    Fit {
        #[command(subcommand)]
        what: FitCommand,
    },
    /// Campaign delay and angular statistics tables.
    Stats {
        #[command(subcommand)]
        what: StatsCommand,
    },
    /// Power angular spectrum and spatial lobes of one location.
    Pas(PasArgs),
    /// Directional cross-polarization discrimination.
    Xpd {
        #[command(flatten)]
        common: Common,
        /// Include NLOS locations.
        #[arg(long)]
        include_nlos: bool,
    },
    /// Render a synthetic campaign from generator parameters.
    Synth {
        /// Parameter JSON; omitted fields take their defaults.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 13)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: every fit and table, written as one report bundle.
    Report {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long = "threshold-db")]
        thresholds_db: Vec<f64>,
        #[arg(long)]
        carrier_hz: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Bundle formats; both when omitted.
        #[arg(long = "format", value_enum)]
        formats: Vec<Format>,
        #[arg(long)]
        include_nlos: bool,
    },
}

#[derive(Subcommand)]
enum FitCommand {
    /// CI fit of one polarization and kind; VH also reports the CIX offset.
    Pathloss {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value = "VV")]
        pol: Polarization,
        #[arg(long, default_value = "omni")]
        kind: PathLossKind,
        #[arg(long)]
        carrier_hz: Option<f64>,
        /// Directory for fit.json and the (distance_m, pl_db) scatter.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        include_nlos: bool,
    },
}

#[derive(Subcommand)]
enum StatsCommand {
    /// RMS and maximum delay spread, omni and directional.
    Delay(Common),
    /// Spatial lobe counts and RMS angular spread.
    Angular(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    manifest: PathBuf,
    /// Repeatable; defaults to 20 and 30.
    #[arg(long = "threshold-db")]
    thresholds_db: Vec<f64>,
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct PasArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    tx_id: String,
    #[arg(long)]
    rx_id: String,
    #[arg(long, default_value = "VV")]
    pol: Polarization,
    #[arg(long, default_value = "AOA")]
    side: Side,
    #[arg(long = "threshold-db", default_value_t = 30.0)]
    threshold_db: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn thresholds(given: &[f64]) -> Result<Vec<f64>> {
    let t = if given.is_empty() {
        DEFAULT_THRESHOLDS_DB.to_vec()
    } else {
        given.to_vec()
    };
    validate_thresholds(&t)?;
    Ok(t)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Error::Io {
                    path: dir.to_path_buf(),
                    source: e,
                })?;
            }
            fs::write(path, body).map_err(|e| Error::Io {
                path: path.to_path_buf(),
                source: e,
            })
        }
        None => {
            let _ = std::io::stdout().write_all(body.as_bytes());
            Ok(())
        }
    }
}

fn vv_locations(campaign: &Campaign) -> Vec<LocationMeasurement> {
    locations_of(campaign, Polarization::VV).into_iter().cloned().collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { manifest, format } => {
            let c = ingest_campaign(&manifest)?;
            let mut locs: Vec<_> = c.locations.iter().collect();
            locs.sort_by(|a, b| (&a.tx_id, &a.rx_id, a.polarization).cmp(&(&b.tx_id, &b.rx_id, b.polarization)));
            let body = match format {
                Format::Csv => {
                    let mut s = String::from("tx_id,rx_id,polarization,los,distance_m,directions,detectable\n");
                    for l in locs {
                        s.push_str(&format!(
                            "{},{},{},{},{:.4},{},{}\n",
                            l.tx_id,
                            l.rx_id,
                            l.polarization,
                            l.los,
                            l.distance_m(),
                            l.sweeps.len(),
                            l.sweeps.iter().filter(|s| s.is_detectable()).count()
                        ));
                    }
                    s
                }
                Format::Json => json(&serde_json::json!({
                    "campaign_id": c.campaign_id,
                    "carrier_hz": c.carrier_hz,
                    "delay_resolution_ns": c.delay_resolution_ns,
                    "locations": locs.iter().map(|l| serde_json::json!({
                        "tx_id": l.tx_id,
                        "rx_id": l.rx_id,
                        "polarization": l.polarization,
                        "los": l.los,
                        "distance_m": l.distance_m(),
                        "directions": l.sweeps.len(),
                        "detectable": l.sweeps.iter().filter(|s| s.is_detectable()).count(),
                    })).collect::<Vec<_>>(),
                })),
            };
            emit(None, &body)
        }
        Command::Fit {
            what:
                FitCommand::Pathloss {
                    manifest,
                    pol,
                    kind,
                    carrier_hz,
                    out,
                    include_nlos,
                },
        } => {
            let c = ingest_campaign(&manifest)?;
            let (fit, samples) = fit_path_loss(&c, pol, kind, carrier_hz.unwrap_or(c.carrier_hz), include_nlos)?;
            let body = json(&fit);
            if let Some(dir) = out {
                emit(Some(&dir.join("fit.json")), &body)?;
                let mut scatter = String::from("distance_m,pl_db\n");
                for s in &samples {
                    scatter.push_str(&format!("{:.4},{:.4}\n", s.distance_m, s.pl_db));
                }
                emit(Some(&dir.join("scatter.csv")), &scatter)?;
                emit(Some(&dir.join("samples.csv")), &path_loss_samples_csv(&samples))?;
            }
            emit(None, &body)
        }
        Command::Stats { what } => {
            let (common, delay) = match what {
                StatsCommand::Delay(c) => (c, true),
                StatsCommand::Angular(c) => (c, false),
            };
            let t = thresholds(&common.thresholds_db)?;
            let locs = vv_locations(&ingest_campaign(&common.manifest)?);
            let body = if delay {
                let rows = t
                    .iter()
                    .map(|&t| campaign_delay_summary(&locs, t))
                    .collect::<Result<Vec<_>>>()?;
                match common.format {
                    Format::Csv => delay_table_csv(&rows),
                    Format::Json => json(&rows),
                }
            } else {
                let rows = t
                    .iter()
                    .map(|&t| campaign_angular_summary(&locs, t))
                    .collect::<Result<Vec<_>>>()?;
                match common.format {
                    Format::Csv => angular_table_csv(&rows),
                    Format::Json => json(&rows),
                }
            };
            emit(common.out.as_deref(), &body)
        }
        Command::Pas(a) => {
            let c = ingest_campaign(&a.manifest)?;
            let loc = c
                .locations
                .iter()
                .find(|l| l.tx_id == a.tx_id && l.rx_id == a.rx_id && l.polarization == a.pol)
                .ok_or_else(|| Error::Validation {
                    field: "location".into(),
                    message: format!("no {}-{} {} location in the campaign", a.tx_id, a.rx_id, a.pol),
                })?;
            let pas = power_angular_spectrum(loc, a.side, a.threshold_db)?;
            let lobes = extract_spatial_lobes(&pas, a.threshold_db);
            let body = match a.format {
                Format::Csv => {
                    let mut s = String::from("az_deg,power_mw\n");
                    for (az, p) in pas.bins_deg.iter().zip(&pas.powers_mw) {
                        s.push_str(&format!("{az:.4},{p:e}\n"));
                    }
                    s
                }
                Format::Json => json(&serde_json::json!({
                    "pas": pas,
                    "lobes": lobes,
                    "stats": angular_stats(loc, a.side, a.threshold_db)?,
                })),
            };
            emit(None, &body)
        }
        Command::Xpd { common, include_nlos } => {
            let c = ingest_campaign(&common.manifest)?;
            let x = directional_xpds(&c, include_nlos)?;
            let body = match common.format {
                Format::Csv => xpd_csv(&x),
                Format::Json => json(&xpd_summary(&x)),
            };
            emit(common.out.as_deref(), &body)
        }
        Command::Synth { params, n, seed, out } => {
            let params = match params {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| Error::Io {
                        path: path.clone(),
                        source: e,
                    })?;
                    serde_json::from_str::<SynthesisParams>(&text).map_err(|e| Error::Parse {
                        path,
                        line: Some(e.line() as u64),
                        message: e.to_string(),
                    })?
                }
                None => SynthesisParams::default(),
            };
            let r = render_campaign(&params, n, seed, &out)?;
            println!("{}", r.manifest_path.display());
            Ok(())
        }
        Command::Report {
            manifest,
            thresholds_db,
            carrier_hz,
            out,
            seed,
            formats,
            include_nlos,
        } => {
            let mut cfg = RunConfig::new(manifest, out);
            cfg.thresholds_db = thresholds(&thresholds_db)?;
            cfg.carrier_hz = carrier_hz;
            cfg.seed = seed;
            cfg.include_nlos = include_nlos;
            if !formats.is_empty() {
                cfg.formats = ReportFormats {
                    csv: formats.contains(&Format::Csv),
                    json: formats.contains(&Format::Json),
                };
            }
            for f in run_pipeline(&cfg)?.files {
                println!("{}", f.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SUBTHZ_CHAN_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
