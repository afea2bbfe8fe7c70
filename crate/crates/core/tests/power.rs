mod common;

use nrpos_core::model::LinkCache;
use nrpos_core::optimizer::homd::random_state;
use nrpos_core::optimizer::power::{solve_power_privacy, PowerParams};
use nrpos_core::oracles::grid::grid_power_solver;
use nrpos_core::rng::stream;

#[test]
fn barrier_solution_matches_grid_search() {
    let mut cfg = common::small_config(3, 2, 2, 2);
    // Quieter receivers so interference shapes the optimum.
    cfg.noise_psd_w_per_hz *= 1e-4;
    let (table, inst) = common::setup(&cfg, 0..3);
    for (i, x) in inst.iter().enumerate() {
        let ev = x.evaluator(&table);
        let s = random_state(&ev, &mut stream(i as u64, 2)).unwrap();
        let mut cache = LinkCache::new(&ev, s.beam).unwrap();
        let sol = solve_power_privacy(&ev, &mut cache, &s, &PowerParams::default()).unwrap();
        let (_, grid) = grid_power_solver(&ev, &mut cache, &s, 60).unwrap();
        assert!(sol.objective <= grid * 1.01, "seed {i}: {} vs {grid}", sol.objective);
        assert!(sol.kkt_residual <= 1e-6, "{}", sol.kkt_residual);
    }
}

#[test]
fn single_point_grid_is_the_full_power_corner() {
    let cfg = common::small_config(3, 1, 1, 2);
    let (table, inst) = common::setup(&cfg, [1]);
    let ev = inst[0].evaluator(&table);
    let s = random_state(&ev, &mut stream(1, 2)).unwrap();
    let mut cache = LinkCache::new(&ev, s.beam).unwrap();
    let (p, obj) = grid_power_solver(&ev, &mut cache, &s, 1).unwrap();
    assert_eq!(p, s.power_w);
    assert_eq!(obj, ev.evaluate(&s).unwrap().objective);
}

#[test]
fn grid_refinement_converges() {
    let mut cfg = common::small_config(3, 1, 1, 2);
    cfg.noise_psd_w_per_hz *= 1e-4;
    let (table, inst) = common::setup(&cfg, [8]);
    let ev = inst[0].evaluator(&table);
    let s = random_state(&ev, &mut stream(8, 2)).unwrap();
    let mut cache = LinkCache::new(&ev, s.beam).unwrap();
    let (_, a) = grid_power_solver(&ev, &mut cache, &s, 50).unwrap();
    let (_, b) = grid_power_solver(&ev, &mut cache, &s, 200).unwrap();
    assert!((a - b).abs() / b < 0.005);
}

#[test]
fn raising_the_privacy_floor_never_helps() {
    let mut last = 0.0;
    for floor in [0.005, 0.05, 0.5] {
        let mut cfg = common::small_config(3, 2, 1, 2);
        cfg.min_anchor_var_override_m2 = Some(floor);
        let (table, inst) = common::setup(&cfg, [6]);
        let ev = inst[0].evaluator(&table);
        let s = random_state(&ev, &mut stream(6, 2)).unwrap();
        let mut cache = LinkCache::new(&ev, s.beam).unwrap();
        let sol = solve_power_privacy(&ev, &mut cache, &s, &PowerParams::default()).unwrap();
        assert!(sol.anchor_var_m2.iter().all(|v| *v >= floor));
        assert!(sol.objective >= last);
        last = sol.objective;
    }
}
