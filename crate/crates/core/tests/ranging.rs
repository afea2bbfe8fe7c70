mod common;

use nrpos_core::optimizer::homd::random_state;
use nrpos_core::oracles::quadrature::integrate;
use nrpos_core::ranging::{psd_value, ranging_variance_a, ranging_variance_zeta};
use nrpos_core::rng::stream;
use rand::Rng;

#[test]
fn zeta_and_normalized_forms_agree() {
    let cfg = common::small_config(4, 3, 3, 2);
    let (table, inst) = common::setup(&cfg, 0..10);
    let mut worst = 0.0f64;
    for (i, x) in inst.iter().enumerate() {
        let ev = x.evaluator(&table);
        let mut rng = stream(i as u64, 7);
        for _ in 0..5 {
            let mut s = random_state(&ev, &mut rng).unwrap();
            for p in s.power_w.iter_mut() {
                *p *= rng.random_range(0.01..1.0);
            }
            let (j, k) = (rng.random_range(0..4), rng.random_range(0..3));
            let a = ranging_variance_a(&ev, &s, j, k, 0).unwrap();
            let z = ranging_variance_zeta(&ev, &s, j, k, 0).unwrap();
            worst = worst.max(((a - z) / z).abs());
        }
    }
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn cached_variance_matches_direct_form() {
    let cfg = common::small_config(4, 3, 2, 4);
    let (table, inst) = common::setup(&cfg, [3]);
    let ev = inst[0].evaluator(&table);
    let s = random_state(&ev, &mut stream(3, 1)).unwrap();
    let mut cache = nrpos_core::model::LinkCache::new(&ev, s.beam).unwrap();
    for j in 0..4 {
        for k in 0..3 {
            let a = cache.variance(&ev, &s, j, k).unwrap();
            let z = ranging_variance_zeta(&ev, &s, j, k, 0).unwrap();
            assert!(((a - z) / z).abs() < 1e-12);
        }
    }
}

#[test]
fn normalized_psd_has_unit_area() {
    let cfg = common::small_config(3, 1, 1, 4);
    let (table, inst) = common::setup(&cfg, [5]);
    let ev = inst[0].evaluator(&table);
    let s = random_state(&ev, &mut stream(5, 1)).unwrap();
    let n = &table.numerologies[0];
    let span = 3e8;
    let breaks: Vec<f64> = (0..=6000).map(|i| -span + 2.0 * span * i as f64 / 6000.0).collect();
    let area = integrate(|f| psd_value(f, &ev, &s, 0, 0, 0, true).unwrap(), &breaks, 1e-9, 0.0).unwrap().value;
    // Tails of sinc^2 beyond +-span hold about 2/(pi^2 span T) of the mass.
    let tail = 2.0 / (std::f64::consts::PI.powi(2) * span * n.symbol_s);
    assert!((area - 1.0).abs() < 2.0 * tail, "{area}");
}
