//! Transmit power and anchor-privacy subproblem.
//!
//! With `x = ln p` every user's squared error is a sum of exponentials of
//! affine functions of `x`,
//! `F_k(x) = const_k + sum_j N_kj e^{-x_j} + sum_{j,j'} I_kjj' e^{x_j' - x_j}`,
//! so minimizing `max_k F_k` over a box is convex. The location variance
//! only adds `lambda^2 xi^2` to `const_k`, so its optimum is the privacy
//! floor. The epigraph problem is solved by a log-barrier Newton method.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::{Evaluator, LinkCache};
use crate::state::AssignmentState;

/// Lowest admissible power relative to the cap, `ln(1e6)` below it.
pub const POWER_RANGE_LOG: f64 = 13.815_510_557_964_274;

/// Squared error of one user as a function of log-powers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UserTerms {
    pub constant: f64,
    /// `(j, c)`: `c e^{-x_j}`.
    pub noise: Vec<(usize, f64)>,
    /// `(j, j', c)`: `c e^{x_j' - x_j}`.
    pub cross: Vec<(usize, usize, f64)>,
}

impl UserTerms {
    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.constant;
        for &(j, c) in &self.noise {
            v += c * libm::exp(-x[j]);
        }
        for &(j, j2, c) in &self.cross {
            v += c * libm::exp(x[j2] - x[j]);
        }
        v
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            constant: self.constant * s,
            noise: self.noise.iter().map(|&(j, c)| (j, c * s)).collect(),
            cross: self.cross.iter().map(|&(j, j2, c)| (j, j2, c * s)).collect(),
        }
    }

    /// Value, gradient and Hessian (dense, row-major `n x n`).
    fn derivatives(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> f64 {
        let n = x.len();
        grad.iter_mut().for_each(|g| *g = 0.0);
        hess.iter_mut().for_each(|h| *h = 0.0);
        let mut v = self.constant;
        for &(j, c) in &self.noise {
            let w = c * libm::exp(-x[j]);
            v += w;
            grad[j] -= w;
            hess[j * n + j] += w;
        }
        for &(j, j2, c) in &self.cross {
            let w = c * libm::exp(x[j2] - x[j]);
            v += w;
            grad[j] -= w;
            grad[j2] += w;
            hess[j * n + j] += w;
            hess[j2 * n + j2] += w;
            hess[j * n + j2] -= w;
            hess[j2 * n + j] -= w;
        }
        v
    }
}

/// `min_x max_k F_k(x)` subject to `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProblem {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub users: Vec<UserTerms>,
}

/// Barrier-method settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PowerParams {
    /// Stop once the normalized duality gap falls below this.
    pub gap_tol: f64,
    pub barrier_growth: f64,
    pub max_newton: usize,
}

impl Default for PowerParams {
    fn default() -> Self {
        Self { gap_tol: 1e-8, barrier_growth: 20.0, max_newton: 200 }
    }
}

/// Solver output.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSolution {
    pub log_power: Vec<f64>,
    /// `max_k F_k` at `log_power`.
    pub objective: f64,
    /// KKT residual of the barrier iterate on the normalized problem.
    pub kkt_residual: f64,
    pub newton_steps: usize,
}

impl PowerProblem {
    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.users.iter().map(|u| u.value(x)).fold(0.0, f64::max)
    }

    /// Problem of a fixed discrete state: per user the sum over its anchors of
    /// `lambda^2 (xi^2 + sigma^2)`.
    pub fn from_state(ev: &Evaluator<'_>, cache: &mut LinkCache, state: &AssignmentState) -> Result<Self> {
        let jn = state.num_anchors();
        let mut upper = Vec::with_capacity(jn);
        for (j, a) in ev.scenario.anchors.iter().enumerate() {
            let c = state.choice[j].ok_or(Error::Unassigned(j))?;
            let na = ev.numerologies()[c.numerology as usize].active as f64;
            if !(a.p_max_w > 0.0) {
                return Err(Error::Power(alloc::format!("anchor {j} has a non-positive power cap {}", a.p_max_w)));
            }
            upper.push(libm::log(a.p_max_w / na));
        }
        let lower = upper.iter().map(|u| u - POWER_RANGE_LOG).collect();
        let sigma_free = cache.ranging(ev, state)?;
        let report = crate::model::positioning_report(ev.scenario, state, sigma_free);
        let mut users = Vec::with_capacity(state.num_users());
        for k in 0..state.num_users() {
            let mut t = UserTerms::default();
            for j in state.anchors_of(k) {
                let l2 = report.lambda[j][k] * report.lambda[j][k];
                if !l2.is_finite() {
                    return Err(Error::DegenerateGeometry { condition: f64::INFINITY });
                }
                let terms = cache.link_terms(ev, state, j, k)?;
                t.constant += l2 * state.anchor_var_m2[j];
                t.noise.push((j, l2 * terms.noise));
                for (j2, c) in terms.cross.iter().enumerate() {
                    if *c > 0.0 {
                        t.cross.push((j, j2, l2 * c));
                    }
                }
            }
            users.push(t);
        }
        Ok(Self { upper, lower, users })
    }

    /// Barrier Newton solve of the epigraph form.
    pub fn solve(&self, params: &PowerParams) -> Result<PowerSolution> {
        let n = self.dim();
        if self.lower.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: self.lower.len() });
        }
        for j in 0..n {
            if !(self.upper[j].is_finite() && self.lower[j] < self.upper[j]) {
                return Err(Error::Power(alloc::format!("anchor {j} has an empty power interval")));
            }
        }
        let scale0 = self.objective(&self.upper);
        if !(scale0 > 0.0 && scale0.is_finite()) {
            return Ok(PowerSolution {
                log_power: self.upper.clone(),
                objective: scale0,
                kkt_residual: 0.0,
                newton_steps: 0,
            });
        }
        let users: Vec<UserTerms> = self.users.iter().map(|u| u.scaled(1.0 / scale0)).collect();
        let mut z: Vec<f64> = self.upper.iter().map(|u| u - 0.5).collect();
        let f0 = users.iter().map(|u| u.value(&z[..n])).fold(0.0, f64::max);
        z.push(1.05 * f0 + 1e-3);
        let m = (users.len() + 2 * n) as f64;
        let mut t = 1.0;
        let mut steps = 0;
        loop {
            self.center(&users, &mut z, t, params.max_newton, &mut steps)?;
            if m / t < params.gap_tol {
                break;
            }
            t *= params.barrier_growth;
        }
        let mut best = z[..n].to_vec();
        let mut best_obj = self.objective(&best);
        let mut snapped = best.clone();
        for j in 0..n {
            if self.upper[j] - snapped[j] < 1e-6 {
                snapped[j] = self.upper[j];
            } else if snapped[j] - self.lower[j] < 1e-6 {
                snapped[j] = self.lower[j];
            }
        }
        let so = self.objective(&snapped);
        if so <= best_obj {
            best = snapped;
            best_obj = so;
        }
        let duals: Vec<f64> = users.iter().map(|u| 1.0 / (t * (z[n] - u.value(&z[..n])))).collect();
        let kkt = self.kkt_residual(&users, &best, &duals);
        Ok(PowerSolution { log_power: best, objective: best_obj, kkt_residual: kkt, newton_steps: steps })
    }

    /// Stationarity and complementarity residual of the normalized problem at
    /// `x`, with user multipliers taken from the barrier and rescaled to sum
    /// to one. Bound multipliers absorb gradient components of the right sign.
    fn kkt_residual(&self, users: &[UserTerms], x: &[f64], duals: &[f64]) -> f64 {
        let n = self.dim();
        let total: f64 = duals.iter().sum();
        let fmax = users.iter().map(|u| u.value(x)).fold(0.0, f64::max);
        let mut gk = vec![0.0; n];
        let mut hk = vec![0.0; n * n];
        let mut v = vec![0.0; n];
        let mut comp = 0.0;
        for (u, d) in users.iter().zip(duals) {
            let w = d / total;
            let f = u.derivatives(x, &mut gk, &mut hk);
            comp += w * (fmax - f);
            for a in 0..n {
                v[a] += w * gk[a];
            }
        }
        let mut stat: f64 = 0.0;
        for j in 0..n {
            let r = if x[j] >= self.upper[j] {
                v[j].max(0.0)
            } else if x[j] <= self.lower[j] {
                (-v[j]).max(0.0)
            } else {
                v[j].abs()
            };
            stat = stat.max(r);
        }
        stat.max(comp)
    }

    fn barrier(&self, users: &[UserTerms], z: &[f64], t: f64) -> f64 {
        let n = self.dim();
        let s = z[n];
        let mut v = t * s;
        for u in users {
            let r = s - u.value(&z[..n]);
            if !(r > 0.0) {
                return f64::INFINITY;
            }
            v -= libm::log(r);
        }
        for j in 0..n {
            let (a, b) = (self.upper[j] - z[j], z[j] - self.lower[j]);
            if !(a > 0.0 && b > 0.0) {
                return f64::INFINITY;
            }
            v -= libm::log(a) + libm::log(b);
        }
        v
    }

    /// Newton iterations on the barrier at parameter `t`.
    fn center(&self, users: &[UserTerms], z: &mut Vec<f64>, t: f64, max_iter: usize, steps: &mut usize) -> Result<()> {
        let n = self.dim();
        let d = n + 1;
        let mut gk = vec![0.0; n];
        let mut hk = vec![0.0; n * n];
        for _ in 0..max_iter {
            let mut g = DVector::<f64>::zeros(d);
            let mut h = DMatrix::<f64>::zeros(d, d);
            g[n] = t;
            let s = z[n];
            for u in users {
                let f = u.derivatives(&z[..n], &mut gk, &mut hk);
                let r = s - f;
                for a in 0..n {
                    g[a] += gk[a] / r;
                    for b in 0..n {
                        h[(a, b)] += hk[a * n + b] / r + gk[a] * gk[b] / (r * r);
                    }
                    h[(a, n)] -= gk[a] / (r * r);
                    h[(n, a)] -= gk[a] / (r * r);
                }
                g[n] -= 1.0 / r;
                h[(n, n)] += 1.0 / (r * r);
            }
            for j in 0..n {
                let (a, b) = (self.upper[j] - z[j], z[j] - self.lower[j]);
                g[j] += 1.0 / a - 1.0 / b;
                h[(j, j)] += 1.0 / (a * a) + 1.0 / (b * b);
            }
            let step = match h.clone().cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => h.lu().solve(&(-&g)).ok_or_else(|| Error::Power("singular Newton system".into()))?,
            };
            let dec = -g.dot(&step);
            *steps += 1;
            if dec / 2.0 <= 1e-12 {
                break;
            }
            let f0 = self.barrier(users, z, t);
            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..80 {
                let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(a, b)| a + alpha * b).collect();
                let ft = self.barrier(users, &trial, t);
                if ft.is_finite() && ft <= f0 - 0.25 * alpha * dec {
                    *z = trial;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }
        Ok(())
    }
}

/// Result of the power/privacy step.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPrivacyResult {
    pub power_w: Vec<f64>,
    pub anchor_var_m2: Vec<f64>,
    /// Maximum positioning error (m) at the returned point.
    pub objective: f64,
    pub kkt_residual: f64,
}

/// Optimize powers with the location variances at their privacy floors.
/// Falls back to the incoming powers when they are no worse.
pub fn solve_power_privacy(
    ev: &Evaluator<'_>,
    cache: &mut LinkCache,
    state: &AssignmentState,
    params: &PowerParams,
) -> Result<PowerPrivacyResult> {
    let mut base = state.clone();
    base.anchor_var_m2 = ev.scenario.anchors.iter().map(|a| a.min_var_m2).collect();
    let problem = PowerProblem::from_state(ev, cache, &base)?;
    let sol = problem.solve(params)?;
    let incoming: Vec<f64> = base
        .power_w
        .iter()
        .zip(problem.upper.iter().zip(&problem.lower))
        .map(|(p, (u, l))| libm::log(*p).clamp(*l, *u))
        .collect();
    let inc_obj = problem.objective(&incoming);
    let (x, obj) = if inc_obj < sol.objective { (incoming, inc_obj) } else { (sol.log_power, sol.objective) };
    Ok(PowerPrivacyResult {
        power_w: x.iter().map(|v| libm::exp(*v)).collect(),
        anchor_var_m2: base.anchor_var_m2,
        objective: libm::sqrt(obj),
        kkt_residual: sol.kkt_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_anchor_goes_to_cap() {
        let p = PowerProblem {
            upper: vec![0.0],
            lower: vec![-POWER_RANGE_LOG],
            users: vec![UserTerms { constant: 0.1, noise: vec![(0, 2.0)], cross: vec![] }],
        };
        let s = p.solve(&PowerParams::default()).unwrap();
        assert!((s.log_power[0]).abs() < 1e-9);
        assert!((s.objective - 2.1).abs() < 1e-9);
        assert!(s.kkt_residual <= 1e-6);
    }

    #[test]
    fn interference_tradeoff_is_interior() {
        // User 0 hears anchor 0 disturbed by anchor 1 and vice versa.
        let p = PowerProblem {
            upper: vec![0.0, 0.0],
            lower: vec![-POWER_RANGE_LOG; 2],
            users: vec![
                UserTerms { constant: 0.0, noise: vec![(0, 1.0)], cross: vec![(0, 1, 5.0)] },
                UserTerms { constant: 0.0, noise: vec![(1, 3.0)], cross: vec![(1, 0, 0.5)] },
            ],
        };
        let s = p.solve(&PowerParams::default()).unwrap();
        let mut grid_best = f64::INFINITY;
        for a in 0..400 {
            for b in 0..400 {
                let x = [-(a as f64) * 0.02, -(b as f64) * 0.02];
                grid_best = grid_best.min(p.objective(&x));
            }
        }
        assert!(s.objective <= grid_best * (1.0 + 1e-6), "{} {}", s.objective, grid_best);
        assert!(s.kkt_residual <= 1e-6, "{:?}", s);
    }
}
