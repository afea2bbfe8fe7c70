use nrpos_core::optimizer::dqn::{DqnAgent, DqnConfig, Mlp, Transition};
use nrpos_core::oracles::finite_diff::finite_diff_gradient;
use nrpos_core::rng::stream;
use rand::Rng;

#[test]
fn backprop_matches_central_differences() {
    let mut rng = stream(5, 0);
    let net = Mlp::new(&[6, 8, 8, 8, 4], &mut rng).unwrap();
    let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let (_, g) = net.loss_gradient(&x, 2, 0.7).unwrap();
    let fd = finite_diff_gradient(&net, &x, 2, 0.7, 1e-5).unwrap();
    let num: f64 = g.iter().zip(&fd).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let den: f64 = fd.iter().map(|b| b * b).sum::<f64>().sqrt();
    assert!(num / den <= 1e-4, "{}", num / den);
}

#[test]
fn linear_net_gradient_is_exact() {
    let mut rng = stream(6, 0);
    let net = Mlp::new(&[3, 1], &mut rng).unwrap();
    let x = [0.2, -0.4, 0.9];
    let (_, g) = net.loss_gradient(&x, 0, 0.3).unwrap();
    let fd = finite_diff_gradient(&net, &x, 0, 0.3, 1e-6).unwrap();
    for (a, b) in g.iter().zip(&fd) {
        assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
    }
}

#[test]
fn oversized_step_is_rejected() {
    let net = Mlp::new(&[2, 2], &mut stream(0, 0)).unwrap();
    assert!(finite_diff_gradient(&net, &[0.0, 1.0], 0, 0.0, 1e-1).is_err());
}

/// One dominant arm pays about 0.9, the others about 0.2.
pub fn bandit(seed: u64, steps: usize) -> f64 {
    let mut rng = stream(seed, 0);
    let cfg = DqnConfig { hidden: vec![16, 16, 16], batch_size: 32, ..Default::default() };
    let mut agent = DqnAgent::new(4, 5, cfg, &mut rng).unwrap();
    let dominant = 3;
    let ctx = |r: &mut nrpos_core::rng::SimRng| -> Vec<f64> { (0..4).map(|_| r.random_range(0.0..1.0)).collect() };
    for _ in 0..steps {
        let s = ctx(&mut rng);
        let a = agent.select(&s, true, &mut rng).unwrap();
        let reward = if a == dominant { 0.9 } else { 0.2 } + rng.random_range(-0.05..0.05);
        agent.remember(Transition { state: s.clone(), action: a, reward, next_state: s, done: true });
        agent.learn(&mut rng).unwrap();
        agent.decay_epsilon();
    }
    let hits = (0..500).filter(|_| agent.select(&ctx(&mut rng), false, &mut rng).unwrap() == dominant).count();
    hits as f64 / 500.0
}

#[test]
fn bandit_learns_the_dominant_arm() {
    let share = bandit(17, 2000);
    assert!(share >= 0.9, "{share}");
}
