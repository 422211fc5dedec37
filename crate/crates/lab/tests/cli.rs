use std::path::Path;
use std::process::Command;

use psgrowth_core::spaces::GroupSpec;
use psgrowth_lab::{run, ExperimentConfig, ExperimentKind, LabError};

fn psgrowth(args: &[&str], dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_psgrowth"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn reports_are_byte_stable() {
    for kind in [ExperimentKind::Growth, ExperimentKind::Poincare, ExperimentKind::Horoboundary] {
        let cfg = ExperimentConfig::for_kind(kind).with_radius(8);
        let a = run(kind, &cfg).unwrap().to_json().unwrap();
        let b = run(kind, &cfg).unwrap().to_json().unwrap();
        assert_eq!(a, b, "{}", kind.name());
    }
    let cfg = ExperimentConfig::for_kind(ExperimentKind::Density).with_radius(2);
    let a = run(ExperimentKind::Density, &cfg).unwrap().to_json().unwrap();
    let b = run(ExperimentKind::Density, &cfg).unwrap().to_json().unwrap();
    assert_eq!(a, b);
}

#[test]
fn report_round_trips_through_json() {
    let cfg = ExperimentConfig::for_kind(ExperimentKind::Growth)
        .with_group(GroupSpec::FreeProduct { orders: vec![2, 3] })
        .with_radius(10);
    let rep = run(ExperimentKind::Growth, &cfg).unwrap();
    let back: psgrowth_lab::ExperimentReport = serde_json::from_str(&rep.to_json().unwrap()).unwrap();
    assert_eq!(back, rep);
    assert_eq!(back.inputs, cfg);
}

#[test]
fn mismatched_kind_is_a_config_error() {
    let cfg = ExperimentConfig::for_kind(ExperimentKind::Growth);
    let e = run(ExperimentKind::Spr, &cfg).unwrap_err();
    assert!(matches!(e, LabError::Config(_)));
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn cli_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = psgrowth(&["growth", "--radius", "6", "--out", "g"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    let text = std::fs::read_to_string(dir.path().join("g/report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["experiment"], "growth");
    assert_eq!(json["inputs"]["radius"], 6);

    let (code, _) = psgrowth(&["poincare", "--radius", "12", "--format", "csv", "--out", "p"], dir.path());
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(dir.path().join("p/series.csv")).unwrap();
    let headers: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["s", "radius", "log_term", "log_partial", "increment_ratio"]);
    assert_eq!(rdr.records().count(), 2 * 13);
    assert!(dir.path().join("p/verdicts.csv").exists());
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"radius": 4, "unknown_key": true}"#).unwrap();
    let (code, _) = psgrowth(&["growth", "--config", "bad.json"], dir.path());
    assert_eq!(code, 3);
    let (code, _) = psgrowth(&["growth", "--config", "missing.json"], dir.path());
    assert_eq!(code, 3);

    let (code, _) = psgrowth(&["spr", "--radius", "6", "--budget", "50", "--out", "b"], dir.path());
    assert_eq!(code, 2);

    std::fs::write(
        dir.path().join("wrong.json"),
        r#"{"experiment":"poincare","radius":20,"params":{"s_grid":[1.2],"expected":["DIVERGENT-AT-S"]}}"#,
    )
    .unwrap();
    let (code, stdout) = psgrowth(&["poincare", "--config", "wrong.json", "--out", "w"], dir.path());
    assert_eq!(code, 4);
    assert!(stdout.contains("FAIL series_at_1.2"), "{stdout}");
}
