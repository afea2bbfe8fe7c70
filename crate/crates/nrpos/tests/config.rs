use nrpos::config::{split_values, Config};
use nrpos::error::CliError;
use nrpos_core::optimizer::homd::Scheme;

#[test]
fn empty_document_gives_defaults() {
    let c = Config::from_json("{}").unwrap();
    assert_eq!(c, Config::default());
    assert_eq!(c.schemes().unwrap(), Scheme::ALL.to_vec());
}

#[test]
fn unknown_fields_are_rejected() {
    let e = Config::from_json(r#"{"scenario": {"antennas": 4}}"#).unwrap_err();
    assert_eq!(e.exit_code(), 2);
    assert!(Config::from_json(r#"{"extra": 1}"#).is_err());
}

#[test]
fn overrides_parse_json_and_validate() {
    let c = Config::default();
    let d = c.with_override("scenario.bandwidth_hz", "2e6").unwrap();
    assert_eq!(d.scenario.bandwidth_hz, 2e6);
    let d = c.with_override("scenario.area_m", "[50, 50]").unwrap();
    assert_eq!(d.scenario.area_m, [50.0, 50.0]);
    let d = c.with_override("scenario.los_mode", "mixed").unwrap();
    assert_ne!(d.scenario.los_mode, c.scenario.los_mode);
    assert!(c.with_override("scenario.nothing", "1").is_err());
    assert!(c.with_override("scenario.delta_min", "0.9").is_err());
    assert!(c.with_override("experiment.realizations", "0").is_err());
}

#[test]
fn schemes_are_sorted_and_deduplicated() {
    let c = Config::from_json(r#"{"experiment": {"schemes": ["proposed", "bl1", "BL1"]}}"#).unwrap();
    assert_eq!(c.schemes().unwrap(), vec![Scheme::Bl1, Scheme::Proposed]);
    let r = Config::from_json(r#"{"experiment": {"schemes": ["BL9"]}}"#).and_then(|c| c.validate());
    assert!(matches!(r, Err(CliError::Config(_))));
}

#[test]
fn value_lists_respect_brackets() {
    assert_eq!(split_values("1,2, 3"), ["1", "2", "3"]);
    assert_eq!(split_values("[50,50],[100,100]"), ["[50,50]", "[100,100]"]);
    assert!(split_values(" , ").is_empty());
}

#[test]
fn checked_in_configs_load() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        Config::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display())).validate().unwrap();
        n += 1;
    }
    assert!(n >= 6);
}

#[test]
fn error_exit_codes() {
    assert_eq!(CliError::Config("x".into()).exit_code(), 2);
    assert_eq!(CliError::Numerical(nrpos_core::Error::Unassigned(0)).exit_code(), 3);
    assert_eq!(CliError::Io("x".into()).exit_code(), 1);
}
