use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subthz-chan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn synth(dir: &Path, n: &str, params: Option<&Path>) -> String {
    let out = dir.to_str().unwrap();
    let mut args = vec!["synth", "--n", n, "--seed", "42", "--out", out];
    if let Some(p) = params {
        args.extend(["--params", p.to_str().unwrap()]);
    }
    let o = bin(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    dir.join("manifest.json").to_str().unwrap().to_string()
}

#[test]
fn report_bundle_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("c"), "13", None);
    let mut bundles = Vec::new();
    for run in ["r1", "r2"] {
        let out = tmp.path().join(run);
        let o = bin(&[
            "report",
            "--manifest",
            &manifest,
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "42",
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let mut files: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (p.file_name().unwrap().to_owned(), fs::read(&p).unwrap())
            })
            .collect();
        files.sort();
        bundles.push(files);
    }
    assert_eq!(bundles[0].len(), 7);
    assert_eq!(bundles[0], bundles[1]);
}

#[test]
fn single_threshold_gives_only_its_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("c"), "13", None);
    let o = bin(&["stats", "delay", "--manifest", &manifest, "--threshold-db", "30"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "statistic,threshold_db,Min,Max,Mean,Median,90%");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(1) == Some("30")));
}

#[test]
fn fit_pathloss_writes_json_and_scatter() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("c"), "13", None);
    let out = tmp.path().join("fit");
    let o = bin(&[
        "fit",
        "pathloss",
        "--manifest",
        &manifest,
        "--pol",
        "VH",
        "--kind",
        "omni",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["ple", "sigma_db", "xpd_db", "n_samples", "fspl_anchor_db"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let scatter = fs::read_to_string(out.join("scatter.csv")).unwrap();
    assert!(scatter.starts_with("distance_m,pl_db\n"));
    assert_eq!(scatter.lines().count(), 1 + v["n_samples"].as_u64().unwrap() as usize);
}

#[test]
fn missing_manifest_is_io_error() {
    let o = bin(&["stats", "delay", "--manifest", "/definitely/not/here.json"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("here.json"));
}

#[test]
fn bad_threshold_is_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("c"), "2", None);
    let o = bin(&["stats", "delay", "--manifest", &manifest, "--threshold-db", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_los_location_is_degenerate_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let params = tmp.path().join("params.json");
    fs::write(&params, r#"{"nlos_fraction": 0.0}"#).unwrap();
    let manifest = synth(&tmp.path().join("c"), "1", Some(&params));
    let o = bin(&[
        "report",
        "--manifest",
        &manifest,
        "--out",
        tmp.path().join("r").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_params_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let params = tmp.path().join("params.json");
    fs::write(&params, "{\n  \"ple\": \"steep\"\n}").unwrap();
    let o = bin(&[
        "synth",
        "--params",
        params.to_str().unwrap(),
        "--out",
        tmp.path().join("c").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("params.json:2"));
}

#[test]
fn pas_json_reports_lobes() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = synth(&tmp.path().join("c"), "3", None);
    let o = bin(&[
        "pas",
        "--manifest",
        &manifest,
        "--tx-id",
        "TX1",
        "--rx-id",
        "RX1",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pas"]["powers_mw"].as_array().unwrap().len(), 45);
    assert_eq!(
        v["lobes"].as_array().unwrap().len() as u64,
        v["stats"]["n_lobes"].as_u64().unwrap()
    );
}
