mod common;

use nrpos_core::optimizer::dqn::DqnConfig;
use nrpos_core::optimizer::homd::{homd, random_state, run_schemes, HomdParams, Scheme};
use nrpos_core::rng::stream;

fn quick() -> HomdParams {
    HomdParams {
        max_outer: 10,
        dqn: DqnConfig { hidden: vec![16, 8, 8], batch_size: 8, ..Default::default() },
        ..Default::default()
    }
}

#[test]
fn same_seed_same_trajectory() {
    let cfg = common::small_config(4, 3, 2, 2);
    let (table, inst) = common::setup(&cfg, [9]);
    let ev = inst[0].evaluator(&table);
    let a = run_schemes(&ev, &quick(), &mut stream(9, 2)).unwrap();
    let b = run_schemes(&ev, &quick(), &mut stream(9, 2)).unwrap();
    assert_eq!(a.objectives, b.objectives);
    assert_eq!(a.solution.history, b.solution.history);
    assert_eq!(a.states, b.states);
}

#[test]
fn forced_instance_returns_the_forced_state() {
    let mut cfg = common::small_config(3, 1, 1, 1);
    cfg.irs.elements_h = 1;
    cfg.irs.elements_v = 1;
    let (table, inst) = common::setup(&cfg, [3]);
    let ev = inst[0].evaluator(&table);
    let init = random_state(&ev, &mut stream(3, 2)).unwrap();
    let sol = homd(&ev, &init, &quick(), &mut stream(3, 3)).unwrap();
    assert!(sol.state.assoc.iter().all(|r| r[0]));
    assert_eq!(sol.state.choice, init.choice);
    let direct = ev.evaluate(&sol.state).unwrap().objective;
    assert_eq!(sol.objective, direct);
    assert!(sol.objective <= ev.evaluate(&init).unwrap().objective);
}

#[test]
fn matchings_never_raise_the_objective_within_a_pass() {
    let cfg = common::small_config(4, 4, 2, 2);
    let (table, inst) = common::setup(&cfg, 0..4);
    for (i, x) in inst.iter().enumerate() {
        let ev = x.evaluator(&table);
        let r = run_schemes(&ev, &quick(), &mut stream(i as u64, 2)).unwrap();
        for d in &r.solution.diagnostics {
            assert!(d.after_association <= d.after_power);
            assert!(d.after_numerology <= d.after_association);
            assert!(d.association.strictly_decreasing() && d.numerology.strictly_decreasing());
        }
        let o = r.objectives;
        for w in o.windows(2) {
            assert!(w[1] <= w[0], "seed {i}: {o:?}");
        }
        assert!(r.objective(Scheme::Proposed) == r.solution.objective);
        assert!(r.solution.history.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn scheme_names_round_trip() {
    for s in Scheme::ALL {
        assert_eq!(Scheme::parse(s.name()), Some(s));
    }
    assert_eq!(Scheme::parse("bl2"), Some(Scheme::Bl2));
    assert_eq!(Scheme::parse("BL9"), None);
}
