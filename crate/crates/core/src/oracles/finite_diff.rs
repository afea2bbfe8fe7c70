//! Central-difference gradients of a network's squared-error loss.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::optimizer::dqn::Mlp;

/// Gradient of `(target - Q(input, action))^2` in every parameter. The
/// step must lie in `[1e-6, 1e-3]`.
pub fn finite_diff_gradient(net: &Mlp, input: &[f64], action: usize, target: f64, h: f64) -> Result<Vec<f64>> {
    if !(1e-6..=1e-3).contains(&h) {
        return Err(Error::InvalidArgument(alloc::format!("step {h} outside [1e-6, 1e-3]")));
    }
    let loss = |n: &Mlp| -> Result<f64> {
        let q = n.forward(input)?;
        let v = q.get(action).ok_or_else(|| Error::InvalidArgument(alloc::format!("action {action} out of range")))?;
        Ok((target - v) * (target - v))
    };
    let mut work = net.clone();
    let mut grad = Vec::with_capacity(net.params.len());
    for i in 0..net.params.len() {
        let x = net.params[i];
        work.params[i] = x + h;
        let up = loss(&work)?;
        work.params[i] = x - h;
        let down = loss(&work)?;
        work.params[i] = x;
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}
