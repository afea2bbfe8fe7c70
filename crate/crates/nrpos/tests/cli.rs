use std::process::Command;

fn nrpos() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nrpos"));
    c.env_remove("NRPOS_SEED");
    c
}

fn tiny(dir: &std::path::Path) -> std::path::PathBuf {
    let p = dir.join("tiny.json");
    std::fs::write(
        &p,
        r#"{"scenario": {"anchors": 3, "users": 2, "numerology_count": 2, "comb_size": 2,
            "irs": {"elements_h": 2, "elements_v": 2}},
            "optimizer": {"max_outer": 2},
            "experiment": {"seed": 5, "realizations": 2}}"#,
    )
    .unwrap();
    p
}

#[test]
fn run_writes_summary_and_cdf() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path());
    let (out, cdf) = (dir.path().join("m.csv"), dir.path().join("cdf.csv"));
    let s =
        nrpos().arg("--config").arg(&cfg).arg("--out").arg(&out).arg("--cdf").arg(&cdf).arg("run").status().unwrap();
    assert_eq!(s.code(), Some(0));
    let rows = nrpos::output::read_rows(&out).unwrap();
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.realizations == 2 && r.seed == 5));
    assert_eq!(std::fs::read_to_string(&cdf).unwrap().lines().count(), 11);
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path());
    let run = |seed: &str| {
        let o = nrpos()
            .arg("--config")
            .arg(&cfg)
            .arg("baselines")
            .arg("--schemes")
            .arg("BL0")
            .env("NRPOS_SEED", seed)
            .output()
            .unwrap();
        assert!(o.status.success());
        String::from_utf8(o.stdout).unwrap()
    };
    let a = run("11");
    assert_eq!(a, run("11"));
    assert!(a.lines().nth(1).unwrap().ends_with(",2,11"));
}

#[test]
fn sweep_labels_each_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path());
    let o = nrpos()
        .arg("--config")
        .arg(&cfg)
        .args(["sweep", "--param", "scenario.area_m", "--values", "[50,50],[80,80]"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(text.contains("\"scenario.area_m=[80,80]\",proposed"));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scenario": {"delta_min": 0.9}}"#).unwrap();
    assert_eq!(nrpos().arg("--config").arg(&bad).arg("run").status().unwrap().code(), Some(2));
    let cfg = tiny(dir.path());
    let s = nrpos()
        .arg("--config")
        .arg(&cfg)
        .args(["sweep", "--param", "scenario.nope", "--values", "1"])
        .status()
        .unwrap();
    assert_eq!(s.code(), Some(2));
    let s = nrpos().arg("--config").arg(&cfg).args(["baselines", "--schemes", "BL7"]).status().unwrap();
    assert_eq!(s.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_configuration_error() {
    let s = nrpos().args(["--config", "/nonexistent/x.json", "run"]).status().unwrap();
    assert_eq!(s.code(), Some(2));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = tiny(dir.path());
    let out = dir.path().join("missing").join("m.csv");
    let s = nrpos().arg("--config").arg(&cfg).arg("--out").arg(&out).arg("run").status().unwrap();
    assert_eq!(s.code(), Some(1));
}

#[test]
fn integral_validation_passes() {
    let o = nrpos().args(["validate-integrals", "--cases", "20"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("failed 0"));
}
