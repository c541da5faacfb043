//! JSON manifest + per-location sweep CSV.
//!
//! ```text
//! # noise_floor_db=-98
//! tx_az_deg,rx_az_deg,delay_ns,power_db
//! 0,180,132,-61.2
//! ```
//!
//! Rows for one pointing pair must be contiguous and sit on the sounder's
//! delay grid.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{AntennaConfig, DirectionalPdp, LocationMeasurement, Polarization, DEFAULT_DELAY_RESOLUTION_NS};
use crate::error::{Error, Result};

const SWEEP_HEADER: [&str; 4] = ["tx_az_deg", "rx_az_deg", "delay_ns", "power_db"];
const NOISE_FLOOR_TAG: &str = "# noise_floor_db=";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestAntenna {
    pub gain_dbi: f64,
    pub hpbw_deg: f64,
    pub az_step_deg: f64,
}

impl ManifestAntenna {
    fn at_height(&self, height_m: f64) -> AntennaConfig {
        AntennaConfig {
            gain_dbi: self.gain_dbi,
            hpbw_deg: self.hpbw_deg,
            az_step_deg: self.az_step_deg,
            height_m,
        }
    }
}

impl From<&AntennaConfig> for ManifestAntenna {
    fn from(a: &AntennaConfig) -> Self {
        ManifestAntenna {
            gain_dbi: a.gain_dbi,
            hpbw_deg: a.hpbw_deg,
            az_step_deg: a.az_step_deg,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestLocation {
    pub tx_id: String,
    pub rx_id: String,
    pub tx_pos_m: [f64; 3],
    pub rx_pos_m: [f64; 3],
    pub polarization: Polarization,
    pub los: bool,
    /// Horn used at both ends unless `rx_antenna` is given.
    pub antenna: ManifestAntenna,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx_antenna: Option<ManifestAntenna>,
    /// Sweep CSV path, relative to the manifest.
    pub sweeps: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignManifest {
    pub campaign_id: String,
    pub carrier_hz: f64,
    pub tx_power_dbm: f64,
    #[serde(default = "default_resolution")]
    pub delay_resolution_ns: f64,
    pub locations: Vec<ManifestLocation>,
}

fn default_resolution() -> f64 {
    DEFAULT_DELAY_RESOLUTION_NS
}

/// A validated campaign.
#[derive(Clone, Debug, PartialEq)]
pub struct Campaign {
    pub campaign_id: String,
    pub carrier_hz: f64,
    pub delay_resolution_ns: f64,
    pub locations: Vec<LocationMeasurement>,
    /// Manifest followed by every sweep file, in manifest order.
    pub source_files: Vec<PathBuf>,
}

/// Reads a manifest and every sweep file it references, validating all
/// measurement invariants.
pub fn ingest_campaign(manifest_path: impl AsRef<Path>) -> Result<Campaign> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: CampaignManifest = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: manifest_path.to_path_buf(),
        line: Some(e.line() as u64),
        message: e.to_string(),
    })?;
    if !(manifest.carrier_hz > 0.0) {
        return Err(Error::validation("carrier_hz", "must be > 0"));
    }
    if !(manifest.delay_resolution_ns > 0.0) {
        return Err(Error::validation("delay_resolution_ns", "must be > 0"));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let mut source_files = vec![manifest_path.to_path_buf()];
    let mut locations = Vec::with_capacity(manifest.locations.len());
    for entry in &manifest.locations {
        let sweep_path = base.join(&entry.sweeps);
        let sweeps = read_sweep_file(&sweep_path)?;
        let loc = LocationMeasurement {
            tx_id: entry.tx_id.clone(),
            rx_id: entry.rx_id.clone(),
            tx_pos_m: entry.tx_pos_m,
            rx_pos_m: entry.rx_pos_m,
            polarization: entry.polarization,
            los: entry.los,
            sweeps,
            tx_antenna: entry.antenna.at_height(entry.tx_pos_m[2]),
            rx_antenna: entry
                .rx_antenna
                .as_ref()
                .unwrap_or(&entry.antenna)
                .at_height(entry.rx_pos_m[2]),
            tx_power_dbm: manifest.tx_power_dbm,
        };
        loc.validate(manifest.delay_resolution_ns).map_err(|e| match e {
            Error::Validation { field, message } => Error::Validation {
                field,
                message: format!("{message} (in {})", sweep_path.display()),
            },
            other => other,
        })?;
        source_files.push(sweep_path);
        locations.push(loc);
    }
    log::info!(
        "ingested campaign {} with {} locations",
        manifest.campaign_id,
        locations.len()
    );
    Ok(Campaign {
        campaign_id: manifest.campaign_id,
        carrier_hz: manifest.carrier_hz,
        delay_resolution_ns: manifest.delay_resolution_ns,
        locations,
        source_files,
    })
}

#[derive(Deserialize)]
struct SweepRow {
    tx_az_deg: f64,
    rx_az_deg: f64,
    delay_ns: f64,
    power_db: f64,
}

fn read_sweep_file(path: &Path) -> Result<Vec<DirectionalPdp>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: Option<u64>, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut noise_floor = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(v) = line.strip_prefix(NOISE_FLOOR_TAG) {
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| parse_err(Some(i as u64 + 1), format!("bad noise floor {v:?}")))?;
            noise_floor = Some(v);
        }
    }
    let noise_floor_db = noise_floor.ok_or_else(|| parse_err(None, format!("missing `{NOISE_FLOOR_TAG}<v>` line")))?;

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| parse_err(e.position().map(|p| p.line()), e.to_string()))?
        .clone();
    if headers.iter().ne(SWEEP_HEADER) {
        return Err(parse_err(None, format!("header must be `{}`", SWEEP_HEADER.join(","))));
    }

    let mut sweeps: Vec<DirectionalPdp> = Vec::new();
    for record in reader.deserialize::<SweepRow>() {
        let row = record.map_err(|e| parse_err(e.position().map(|p| p.line()), e.to_string()))?;
        match sweeps.last_mut() {
            Some(last) if last.tx_az_deg == row.tx_az_deg && last.rx_az_deg == row.rx_az_deg => {
                last.delays_ns.push(row.delay_ns);
                last.powers_db.push(row.power_db);
            }
            _ => sweeps.push(DirectionalPdp {
                tx_az_deg: row.tx_az_deg,
                rx_az_deg: row.rx_az_deg,
                delays_ns: vec![row.delay_ns],
                powers_db: vec![row.power_db],
                noise_floor_db,
            }),
        }
    }
    Ok(sweeps)
}

fn sweep_file_name(loc: &LocationMeasurement) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect()
    };
    format!("{}_{}_{}.csv", clean(&loc.tx_id), clean(&loc.rx_id), loc.polarization)
}

/// Writes `locations` as `manifest.json` plus one sweep CSV per location under `dir`.
///
/// All locations must share `tx_power_dbm` and a single noise floor per sweep
/// file. Returns the manifest path.
pub fn write_campaign(
    dir: impl AsRef<Path>,
    campaign_id: &str,
    carrier_hz: f64,
    delay_resolution_ns: f64,
    locations: &[LocationMeasurement],
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tx_power_dbm = locations.first().map_or(0.0, |l| l.tx_power_dbm);
    if locations.iter().any(|l| l.tx_power_dbm != tx_power_dbm) {
        return Err(Error::validation("tx_power_dbm", "must be identical across a campaign"));
    }

    let mut entries = Vec::with_capacity(locations.len());
    for loc in locations {
        let name = sweep_file_name(loc);
        write_sweep_file(&dir.join(&name), loc)?;
        let antenna = ManifestAntenna::from(&loc.tx_antenna);
        let rx = ManifestAntenna::from(&loc.rx_antenna);
        entries.push(ManifestLocation {
            tx_id: loc.tx_id.clone(),
            rx_id: loc.rx_id.clone(),
            tx_pos_m: loc.tx_pos_m,
            rx_pos_m: loc.rx_pos_m,
            polarization: loc.polarization,
            los: loc.los,
            rx_antenna: (rx != antenna).then_some(rx),
            antenna,
            sweeps: name,
        });
    }
    let manifest = CampaignManifest {
        campaign_id: campaign_id.to_string(),
        carrier_hz,
        tx_power_dbm,
        delay_resolution_ns,
        locations: entries,
    };
    let path = dir.join("manifest.json");
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_sweep_file(path: &Path, loc: &LocationMeasurement) -> Result<()> {
    let noise = loc.sweeps.first().map_or(-200.0, |s| s.noise_floor_db);
    if loc.sweeps.iter().any(|s| s.noise_floor_db != noise) {
        return Err(Error::validation(
            "noise_floor_db",
            format!("{}: sweeps disagree on the noise floor", loc.label()),
        ));
    }
    let mut out = String::new();
    out.push_str(&format!("{NOISE_FLOOR_TAG}{noise}\n"));
    out.push_str(&SWEEP_HEADER.join(","));
    out.push('\n');
    for s in &loc.sweeps {
        for (d, p) in s.taps() {
            out.push_str(&format!("{},{},{d},{p}\n", s.tx_az_deg, s.rx_az_deg));
        }
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest(sweeps: &str) -> String {
        format!(
            r#"{{"campaign_id":"t","carrier_hz":142e9,"tx_power_dbm":0,
            "locations":[{{"tx_id":"TX1","rx_id":"RX1","tx_pos_m":[0,0,3],"rx_pos_m":[10,0,1.5],
            "polarization":"VV","los":true,
            "antenna":{{"gain_dbi":27,"hpbw_deg":8,"az_step_deg":8}},"sweeps":"{sweeps}"}}]}}"#
        )
    }

    fn write(dir: &Path, name: &str, body: &str) {
        fs::write(dir.join(name), body).unwrap();
    }

    #[test]
    fn ingest_full_sweep() {
        let dir = tempfile::tempdir().unwrap();
        let mut csv = String::from("# noise_floor_db=-98\ntx_az_deg,rx_az_deg,delay_ns,power_db\n");
        for k in 0..45 {
            let az = k as f64 * 8.0;
            for d in 0..3 {
                csv.push_str(&format!("0,{az},{},{}\n", 40 + 2 * d, -60 - d));
            }
        }
        write(dir.path(), "s.csv", &csv);
        write(dir.path(), "m.json", &manifest("s.csv"));
        let c = ingest_campaign(dir.path().join("m.json")).unwrap();
        assert_eq!(c.locations.len(), 1);
        let loc = &c.locations[0];
        assert_eq!(loc.sweeps.len(), 45);
        assert_eq!(loc.sweeps[3].delays_ns, vec![40.0, 42.0, 44.0]);
        assert_eq!(loc.tx_antenna.height_m, 3.0);
        assert_eq!(loc.rx_antenna.height_m, 1.5);
        assert_eq!(c.source_files.len(), 2);
    }

    #[test]
    fn non_uniform_grid_is_validation_error() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "s.csv",
            "# noise_floor_db=-98\ntx_az_deg,rx_az_deg,delay_ns,power_db\n0,0,0,-60\n0,0,2,-61\n0,0,6,-62\n",
        );
        write(dir.path(), "m.json", &manifest("s.csv"));
        let err = ingest_campaign(dir.path().join("m.json")).unwrap_err();
        assert!(
            matches!(err, Error::Validation { ref field, .. } if field == "delays_ns"),
            "{err}"
        );
    }

    #[test]
    fn duplicate_pointing_rejected() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "s.csv",
            "# noise_floor_db=-98\ntx_az_deg,rx_az_deg,delay_ns,power_db\n0,0,0,-60\n0,8,0,-61\n0,0,2,-62\n",
        );
        write(dir.path(), "m.json", &manifest("s.csv"));
        let err = ingest_campaign(dir.path().join("m.json")).unwrap_err();
        assert!(
            matches!(err, Error::Validation { ref field, .. } if field == "sweeps"),
            "{err}"
        );
    }

    #[test]
    fn malformed_row_names_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "s.csv",
            "# noise_floor_db=-98\ntx_az_deg,rx_az_deg,delay_ns,power_db\n0,0,0,-60\n0,0,two,-61\n",
        );
        write(dir.path(), "m.json", &manifest("s.csv"));
        let err = ingest_campaign(dir.path().join("m.json")).unwrap_err();
        match err {
            Error::Parse { path, line, .. } => {
                assert!(path.ends_with("s.csv"));
                assert_eq!(line, Some(4));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn wrong_header_and_missing_noise_floor() {
        let dir = tempfile::tempdir().unwrap();
        write(
            dir.path(),
            "a.csv",
            "# noise_floor_db=-98\ntx,rx,delay,power\n0,0,0,-60\n",
        );
        write(dir.path(), "m.json", &manifest("a.csv"));
        assert!(matches!(
            ingest_campaign(dir.path().join("m.json")),
            Err(Error::Parse { .. })
        ));
        write(
            dir.path(),
            "a.csv",
            "tx_az_deg,rx_az_deg,delay_ns,power_db\n0,0,0,-60\n",
        );
        assert!(matches!(
            ingest_campaign(dir.path().join("m.json")),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn missing_sweep_file_is_io() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "m.json", &manifest("nope.csv"));
        let err = ingest_campaign(dir.path().join("m.json")).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn malformed_manifest_is_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        write(dir.path(), "m.json", "{\"campaign_id\": 3,\n}");
        let err = ingest_campaign(dir.path().join("m.json")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: Some(_), .. }));
    }
}
