//! Deep Q-network for IRS beam selection.
//!
//! A small fully connected network with ReLU hidden layers and a logistic
//! output, trained with Adam against a periodically refreshed target copy.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::SimRng;

/// Fully connected network with parameters in one flat vector. Layer `i`
/// stores its `out x in` weights row-major followed by `out` biases.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mlp {
    pub sizes: Vec<usize>,
    pub params: Vec<f64>,
}

/// Activations of one forward pass; `pre[i]` and `post[i]` are layer `i`'s
/// input to and output of the nonlinearity. `post[0]` is the network input.
#[derive(Debug, Clone)]
struct Trace {
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

impl Mlp {
    /// He-initialized weights, zero biases.
    pub fn new(sizes: &[usize], rng: &mut SimRng) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(Error::InvalidArgument(alloc::format!("bad layer sizes {sizes:?}")));
        }
        let mut params = Vec::new();
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let std = libm::sqrt(2.0 / fan_in as f64);
            let normal = rand_distr::Normal::new(0.0, std).expect("positive std");
            for _ in 0..fan_in * fan_out {
                params.push(rng.sample(normal));
            }
            params.extend(core::iter::repeat_n(0.0, fan_out));
        }
        Ok(Self { sizes: sizes.to_vec(), params })
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("at least two layers")
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim() {
            return Err(Error::LengthMismatch { expected: self.input_dim(), got: x.len() });
        }
        Ok(())
    }

    fn run(&self, x: &[f64]) -> Trace {
        let layers = self.sizes.len() - 1;
        let mut pre = Vec::with_capacity(layers);
        let mut post = Vec::with_capacity(layers + 1);
        post.push(x.to_vec());
        let mut off = 0;
        for i in 0..layers {
            let (n_in, n_out) = (self.sizes[i], self.sizes[i + 1]);
            let w = &self.params[off..off + n_in * n_out];
            let b = &self.params[off + n_in * n_out..off + n_in * n_out + n_out];
            off += n_in * n_out + n_out;
            let input = &post[i];
            let z: Vec<f64> = (0..n_out)
                .map(|o| b[o] + w[o * n_in..(o + 1) * n_in].iter().zip(input).map(|(a, c)| a * c).sum::<f64>())
                .collect();
            let a = if i + 1 == layers {
                z.iter().map(|v| sigmoid(*v)).collect()
            } else {
                z.iter().map(|v| v.max(0.0)).collect()
            };
            pre.push(z);
            post.push(a);
        }
        Trace { pre, post }
    }

    /// Q-values for every action.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        Ok(self.run(x).post.pop().expect("output layer"))
    }

    /// Squared error `(y - Q(x, a))^2` and its gradient in the parameters.
    pub fn loss_gradient(&self, x: &[f64], action: usize, target: f64) -> Result<(f64, Vec<f64>)> {
        self.check_input(x)?;
        if action >= self.output_dim() {
            return Err(Error::InvalidArgument(alloc::format!("action {action} out of range")));
        }
        let t = self.run(x);
        let layers = self.sizes.len() - 1;
        let q = t.post[layers][action];
        let loss = (target - q) * (target - q);
        let mut grad = vec![0.0; self.params.len()];
        let mut delta = vec![0.0; self.output_dim()];
        delta[action] = -2.0 * (target - q) * q * (1.0 - q);
        let mut offsets = Vec::with_capacity(layers);
        let mut off = 0;
        for i in 0..layers {
            offsets.push(off);
            off += self.sizes[i] * self.sizes[i + 1] + self.sizes[i + 1];
        }
        for i in (0..layers).rev() {
            let (n_in, n_out) = (self.sizes[i], self.sizes[i + 1]);
            let off = offsets[i];
            let input = &t.post[i];
            for o in 0..n_out {
                if delta[o] == 0.0 {
                    continue;
                }
                for (g, a) in grad[off + o * n_in..off + (o + 1) * n_in].iter_mut().zip(input) {
                    *g += delta[o] * a;
                }
                grad[off + n_in * n_out + o] += delta[o];
            }
            if i > 0 {
                let w = &self.params[off..off + n_in * n_out];
                let mut next = vec![0.0; n_in];
                for (c, nx) in next.iter_mut().enumerate() {
                    if t.pre[i - 1][c] > 0.0 {
                        *nx = (0..n_out).map(|o| w[o * n_in + c] * delta[o]).sum();
                    }
                }
                delta = next;
            }
        }
        Ok((loss, grad))
    }
}

/// Adam optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(n: usize, lr: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - libm::pow(self.beta1, self.t as f64);
        let c2 = 1.0 - libm::pow(self.beta2, self.t as f64);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            params[i] -= self.lr * (self.m[i] / c1) / (libm::sqrt(self.v[i] / c2) + self.eps);
        }
    }
}

/// One experience tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_state: Vec<f64>,
    /// Episode ended; the target is the reward alone.
    pub done: bool,
}

/// DQN hyperparameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DqnConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub discount: f64,
    pub replay_capacity: usize,
    pub batch_size: usize,
    pub target_refresh: u64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay: f64,
    /// Beam trials per outer optimizer iteration.
    pub steps_per_iteration: usize,
}

impl Default for DqnConfig {
    fn default() -> Self {
        Self {
            hidden: vec![64, 32, 32],
            learning_rate: 1e-3,
            discount: 1.0,
            replay_capacity: 10_000,
            batch_size: 64,
            target_refresh: 100,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay: 0.995,
            steps_per_iteration: 16,
        }
    }
}

/// Online and target networks, replay memory and exploration schedule.
#[derive(Debug, Clone)]
pub struct DqnAgent {
    pub online: Mlp,
    pub target: Mlp,
    pub config: DqnConfig,
    pub epsilon: f64,
    pub steps: u64,
    adam: Adam,
    replay: VecDeque<Transition>,
}

impl DqnAgent {
    pub fn new(state_dim: usize, actions: usize, config: DqnConfig, rng: &mut SimRng) -> Result<Self> {
        let mut sizes = vec![state_dim];
        sizes.extend(&config.hidden);
        sizes.push(actions);
        let online = Mlp::new(&sizes, rng)?;
        let adam = Adam::new(online.params.len(), config.learning_rate);
        Ok(Self {
            target: online.clone(),
            online,
            epsilon: config.epsilon_start,
            steps: 0,
            adam,
            replay: VecDeque::with_capacity(config.replay_capacity.min(1 << 16)),
            config,
        })
    }

    pub fn actions(&self) -> usize {
        self.online.output_dim()
    }

    /// Greedy action, or epsilon-greedy when exploring. Ties go to the
    /// lowest index.
    pub fn select(&self, state: &[f64], explore: bool, rng: &mut SimRng) -> Result<usize> {
        let q = self.online.forward(state)?;
        if explore && rng.random::<f64>() < self.epsilon {
            return Ok(rng.random_range(0..q.len()));
        }
        Ok(argmax(&q))
    }

    pub fn remember(&mut self, t: Transition) {
        if self.replay.len() >= self.config.replay_capacity.max(1) {
            self.replay.pop_front();
        }
        self.replay.push_back(t);
    }

    pub fn replay_len(&self) -> usize {
        self.replay.len()
    }

    /// One Adam step on the mean loss of `batch`; returns that loss.
    pub fn train_step(&mut self, batch: &[Transition]) -> Result<f64> {
        if batch.is_empty() {
            return Ok(0.0);
        }
        let mut grad = vec![0.0; self.online.params.len()];
        let mut loss = 0.0;
        for t in batch {
            let y = if t.done {
                t.reward
            } else {
                t.reward
                    + self.config.discount * self.target.forward(&t.next_state)?.into_iter().fold(f64::MIN, f64::max)
            };
            let (l, g) = self.online.loss_gradient(&t.state, t.action, y)?;
            loss += l;
            for (a, b) in grad.iter_mut().zip(g) {
                *a += b;
            }
        }
        let n = batch.len() as f64;
        grad.iter_mut().for_each(|g| *g /= n);
        self.adam.step(&mut self.online.params, &grad);
        self.steps += 1;
        if self.steps.is_multiple_of(self.config.target_refresh.max(1)) {
            self.target = self.online.clone();
        }
        Ok(loss / n)
    }

    /// Sample a minibatch uniformly with replacement and train on it.
    /// Returns `None` until the buffer holds a full batch.
    pub fn learn(&mut self, rng: &mut SimRng) -> Result<Option<f64>> {
        let b = self.config.batch_size.max(1);
        if self.replay.len() < b {
            return Ok(None);
        }
        let batch: Vec<Transition> =
            (0..b).map(|_| self.replay[rng.random_range(0..self.replay.len())].clone()).collect();
        self.train_step(&batch).map(Some)
    }

    pub fn decay_epsilon(&mut self) {
        self.epsilon = (self.epsilon * self.config.epsilon_decay).max(self.config.epsilon_end);
    }
}

fn argmax(q: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in q.iter().enumerate() {
        if *v > q[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn hand_set_weights_pick_action_three() {
        let mut net = Mlp::new(&[2, 4], &mut stream(1, 0)).unwrap();
        net.params.iter_mut().for_each(|p| *p = 0.0);
        net.params[8 + 3] = 5.0;
        let agent = DqnAgent {
            target: net.clone(),
            adam: Adam::new(net.params.len(), 1e-3),
            online: net,
            config: DqnConfig::default(),
            epsilon: 0.0,
            steps: 0,
            replay: VecDeque::new(),
        };
        assert_eq!(agent.select(&[0.3, 0.1], false, &mut stream(1, 1)).unwrap(), 3);
    }

    #[test]
    fn full_exploration_is_uniform() {
        let mut rng = stream(7, 0);
        let agent = DqnAgent::new(3, 5, DqnConfig { hidden: vec![4], ..Default::default() }, &mut rng).unwrap();
        let mut counts = [0usize; 5];
        for _ in 0..10_000 {
            counts[agent.select(&[0.1, 0.2, 0.3], true, &mut rng).unwrap()] += 1;
        }
        let chi2: f64 = counts.iter().map(|c| (*c as f64 - 2000.0).powi(2) / 2000.0).sum();
        // 99.9% quantile of chi-square with 4 degrees of freedom.
        assert!(chi2 < 18.47, "{chi2}");
    }

    #[test]
    fn zero_reward_terminal_loss_is_q_squared() {
        let mut rng = stream(3, 0);
        let mut agent = DqnAgent::new(2, 2, DqnConfig { hidden: vec![3], ..Default::default() }, &mut rng).unwrap();
        agent.online.params.iter_mut().for_each(|p| *p = 0.0);
        agent.target = agent.online.clone();
        let t = Transition { state: vec![1.0, 2.0], action: 1, reward: 0.0, next_state: vec![0.0, 0.0], done: true };
        let loss = agent.train_step(&[t]).unwrap();
        assert!((loss - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_errors() {
        let agent =
            DqnAgent::new(3, 2, DqnConfig { hidden: vec![4], ..Default::default() }, &mut stream(0, 0)).unwrap();
        assert!(agent.select(&[1.0], false, &mut stream(0, 1)).is_err());
    }
}
