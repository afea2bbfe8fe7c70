//! Brute-force power search.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{positioning_report, Evaluator, LinkCache};
use crate::state::AssignmentState;

/// Largest grid this oracle will walk.
pub const MAX_POINTS: usize = 10_000_000;

/// Best maximum error over `grid_n` log-spaced per-subcarrier powers per
/// anchor in `[1e-6, 1] * P_max / N_a`, with location variances at their
/// floors. `grid_n = 1` evaluates the full-power corner. Returns the powers
/// and the objective (m).
pub fn grid_power_solver(
    ev: &Evaluator<'_>,
    cache: &mut LinkCache,
    state: &AssignmentState,
    grid_n: usize,
) -> Result<(Vec<f64>, f64)> {
    let jn = state.num_anchors();
    let grid_n = grid_n.max(1);
    let total = (0..jn).try_fold(1usize, |acc, _| acc.checked_mul(grid_n)).filter(|n| *n <= MAX_POINTS);
    let total = total.ok_or_else(|| Error::InvalidArgument(alloc::format!("{grid_n}^{jn} grid points is too many")))?;
    let mut caps = Vec::with_capacity(jn);
    for (j, a) in ev.scenario.anchors.iter().enumerate() {
        let c = state.choice[j].ok_or(Error::Unassigned(j))?;
        caps.push(a.p_max_w / ev.numerologies()[c.numerology as usize].active as f64);
    }
    let levels: Vec<f64> = (0..grid_n)
        .map(|i| if grid_n == 1 { 1.0 } else { libm::pow(10.0, -6.0 + 6.0 * i as f64 / (grid_n - 1) as f64) })
        .collect();
    let mut s = state.clone();
    s.anchor_var_m2 = ev.scenario.anchors.iter().map(|a| a.min_var_m2).collect();
    let terms: Vec<Vec<_>> = (0..jn)
        .map(|j| (0..s.num_users()).map(|k| cache.link_terms(ev, &s, j, k)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut best = (vec![0.0; jn], f64::INFINITY);
    let mut idx = vec![0usize; jn];
    for _ in 0..total {
        for j in 0..jn {
            s.power_w[j] = caps[j] * levels[idx[j]];
        }
        let sigma2 =
            terms.iter().enumerate().map(|(j, row)| row.iter().map(|t| t.variance(&s.power_w, j)).collect()).collect();
        let obj = positioning_report(ev.scenario, &s, sigma2).objective;
        if obj < best.1 {
            best = (s.power_w.clone(), obj);
        }
        for d in idx.iter_mut() {
            *d += 1;
            if *d < grid_n {
                break;
            }
            *d = 0;
        }
    }
    Ok(best)
}
