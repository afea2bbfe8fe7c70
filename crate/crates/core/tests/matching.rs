mod common;

use nrpos_core::model::LinkCache;
use nrpos_core::optimizer::homd::random_state;
use nrpos_core::optimizer::matching::{numerology_offset_matching, user_anchor_matching};
use nrpos_core::oracles::exhaustive::{blocking_neighbour, exhaustive_matching, Family};
use nrpos_core::rng::stream;

#[test]
fn matchers_end_in_certified_stable_states() {
    let cfg = common::small_config(4, 3, 2, 2);
    let (table, inst) = common::setup(&cfg, 0..6);
    for (i, x) in inst.iter().enumerate() {
        let ev = x.evaluator(&table);
        let mut s = random_state(&ev, &mut stream(i as u64, 2)).unwrap();
        let mut cache = LinkCache::new(&ev, s.beam).unwrap();
        let a = user_anchor_matching(&ev, &mut cache, &mut s).unwrap();
        assert!(a.strictly_decreasing());
        assert!(blocking_neighbour(&ev, &mut cache, &s, Family::Association).unwrap().is_none(), "seed {i}");
        let n = numerology_offset_matching(&ev, &mut cache, &mut s).unwrap();
        assert!(n.strictly_decreasing());
        assert!(blocking_neighbour(&ev, &mut cache, &s, Family::Numerology).unwrap().is_none(), "seed {i}");
        assert!((0..3).all(|k| s.anchors_of(k).len() >= 3));
    }
}

#[test]
fn stable_output_is_in_the_enumerated_stable_set() {
    let cfg = common::small_config(3, 2, 2, 2);
    let (table, inst) = common::setup(&cfg, [11]);
    let ev = inst[0].evaluator(&table);
    let mut s = random_state(&ev, &mut stream(11, 2)).unwrap();
    let mut cache = LinkCache::new(&ev, s.beam).unwrap();
    numerology_offset_matching(&ev, &mut cache, &mut s).unwrap();
    let all = exhaustive_matching(&ev, &mut cache, &s, Family::Numerology).unwrap();
    assert_eq!(all.states, 64);
    let stable = all.stable.unwrap();
    assert!(stable.iter().any(|t| t.choice == s.choice));
    assert!(stable.iter().any(|t| t.choice == all.best.choice));
}

#[test]
fn stable_input_executes_no_moves() {
    let cfg = common::small_config(4, 2, 2, 2);
    let (table, inst) = common::setup(&cfg, [4]);
    let ev = inst[0].evaluator(&table);
    let mut s = random_state(&ev, &mut stream(4, 2)).unwrap();
    let mut cache = LinkCache::new(&ev, s.beam).unwrap();
    numerology_offset_matching(&ev, &mut cache, &mut s).unwrap();
    user_anchor_matching(&ev, &mut cache, &mut s).unwrap();
    let before = s.clone();
    assert!(user_anchor_matching(&ev, &mut cache, &mut s).unwrap().accepted.is_empty());
    assert_eq!(s, before);
}

#[test]
fn three_anchors_force_full_association() {
    let cfg = common::small_config(3, 1, 1, 2);
    let (table, inst) = common::setup(&cfg, [2]);
    let ev = inst[0].evaluator(&table);
    let mut s = random_state(&ev, &mut stream(2, 2)).unwrap();
    let mut cache = LinkCache::new(&ev, s.beam).unwrap();
    let t = user_anchor_matching(&ev, &mut cache, &mut s).unwrap();
    assert!(t.accepted.is_empty());
    assert!(s.assoc.iter().all(|r| r[0]));
}

#[test]
fn too_few_anchors_is_an_error() {
    let cfg = common::small_config(3, 1, 1, 2);
    let (table, inst) = common::setup(&cfg, [2]);
    let ev = inst[0].evaluator(&table);
    let mut s = random_state(&ev, &mut stream(2, 2)).unwrap();
    s.assoc[0][0] = false;
    let mut cache = LinkCache::new(&ev, s.beam).unwrap();
    assert!(user_anchor_matching(&ev, &mut cache, &mut s).is_err());
}
