use nrpos::output::{read_rows, write_rows, write_samples};
use nrpos::runner::{percentile, summarize, RealizationResult};
use nrpos_core::optimizer::homd::Scheme;

fn result(index: usize, objectives: [f64; 5]) -> RealizationResult {
    RealizationResult { index, seed: 100 + index as u64, objectives, outer_iterations: 1, reward_clips: 0 }
}

#[test]
fn percentiles_interpolate() {
    let v = [1.0, 2.0, 3.0, 4.0];
    assert_eq!(percentile(&v, 0.0), 1.0);
    assert_eq!(percentile(&v, 1.0), 4.0);
    assert_eq!(percentile(&v, 0.5), 2.5);
    assert_eq!(percentile(&[7.0], 0.9), 7.0);
}

#[test]
fn summary_round_trips_through_csv() {
    let res = vec![result(0, [4.0, 3.0, 2.0, 1.0, 0.5]), result(1, [8.0, 6.0, 4.0, 2.0, 1.5])];
    let schemes = [Scheme::Bl0, Scheme::Proposed];
    let mut rows = summarize("a", &schemes, &res, 9);
    rows.extend(summarize("b", &schemes, &res[..1], 9));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0].mean_max_err_m, 6.0);
    assert_eq!(rows[1].scheme, "proposed");
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.csv");
    write_rows(&rows, &p).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("sweep,scheme,mean_max_err_m,p50,p90,realizations,seed\n"));
    assert_eq!(read_rows(&p).unwrap(), rows);
}

#[test]
fn empty_summary_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.csv");
    write_rows(&[], &p).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap().lines().count(), 1);
    assert!(read_rows(&p).unwrap().is_empty());
}

#[test]
fn samples_list_every_realization() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cdf.csv");
    let res = vec![result(0, [1.0; 5]), result(1, [f64::INFINITY; 5])];
    write_samples(&[("x".into(), res)], &[Scheme::Bl3], &p).unwrap();
    let text = std::fs::read_to_string(&p).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["sweep,scheme,realization,seed,max_err_m", "x,BL3,0,100,1", "x,BL3,1,101,inf"]);
}
