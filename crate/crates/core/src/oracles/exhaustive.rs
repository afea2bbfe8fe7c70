//! Brute-force enumeration of the discrete decisions and a swap-blocking
//! certifier that checks every neighbouring state directly.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Evaluator, LinkCache, PositioningReport};
use crate::state::AssignmentState;

/// Largest decision space enumerated.
pub const MAX_STATES: usize = 1_000_000;
/// Quadratic stable-set listing is only done up to this many states.
pub const MAX_STABLE_LISTING: usize = 5_000;
const TOL: f64 = 1e-12;

/// Which decisions are enumerated; everything else stays as in the base state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Numerology and comb offset per anchor, total power per anchor kept.
    Numerology,
    /// User-anchor association with at least three anchors per user.
    Association,
}

#[derive(Debug, Clone)]
pub struct ExhaustiveResult {
    pub best: AssignmentState,
    pub best_objective: f64,
    pub states: usize,
    /// States with no blocking neighbour; `None` when the space is too large
    /// to list.
    pub stable: Option<Vec<AssignmentState>>,
}

struct Scored {
    state: AssignmentState,
    report: PositioningReport,
}

fn with_choices(ev: &Evaluator<'_>, base: &AssignmentState, code: &[usize]) -> AssignmentState {
    let nums = ev.numerologies();
    let mut s = base.clone();
    for (j, &c) in code.iter().enumerate() {
        let old = base.choice[j].expect("base state fully assigned");
        let new = ev.choice_at(c);
        let total = base.power_w[j] * nums[old.numerology as usize].active as f64;
        s.power_w[j] = total / nums[new.numerology as usize].active as f64;
        s.choice[j] = Some(new);
    }
    s
}

/// Every state of the family around `base`.
fn enumerate(ev: &Evaluator<'_>, base: &AssignmentState, family: Family) -> Result<Vec<AssignmentState>> {
    let (jn, kn) = (base.num_anchors(), base.num_users());
    if base.choice.iter().any(Option::is_none) {
        return Err(Error::InvalidArgument("base state must assign every anchor".into()));
    }
    match family {
        Family::Numerology => {
            let nc = ev.num_choices();
            let size = checked_pow(nc, jn)?;
            let mut out = Vec::with_capacity(size);
            for mut i in 0..size {
                let mut code = vec![0; jn];
                for c in code.iter_mut() {
                    *c = i % nc;
                    i /= nc;
                }
                out.push(with_choices(ev, base, &code));
            }
            Ok(out)
        }
        Family::Association => {
            let subsets: Vec<u32> = (0u32..1 << jn).filter(|m| m.count_ones() >= 3).collect();
            if subsets.is_empty() {
                return Err(Error::Matching("fewer than three anchors".into()));
            }
            let size = checked_pow(subsets.len(), kn)?;
            let mut out = Vec::with_capacity(size);
            for mut i in 0..size {
                let mut s = base.clone();
                for k in 0..kn {
                    let m = subsets[i % subsets.len()];
                    i /= subsets.len();
                    for j in 0..jn {
                        s.assoc[j][k] = m >> j & 1 == 1;
                    }
                }
                out.push(s);
            }
            Ok(out)
        }
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    (0..exp)
        .try_fold(1usize, |a, _| a.checked_mul(base))
        .filter(|n| *n <= MAX_STATES)
        .ok_or_else(|| Error::InvalidArgument(alloc::format!("{base}^{exp} states exceed {MAX_STATES}")))
}

fn le(a: f64, b: f64) -> bool {
    b == f64::INFINITY || a <= b + TOL * b.abs()
}

fn lt(a: f64, b: f64) -> bool {
    if b == f64::INFINITY {
        a < b
    } else {
        a < b - TOL * b.abs()
    }
}

/// Fewer degenerate users, or as many and a lower worst finite error.
fn lower_rank(a: &[f64], b: &[f64]) -> bool {
    let count = |v: &[f64]| v.iter().filter(|p| p.is_infinite()).count();
    let worst = |v: &[f64]| v.iter().copied().filter(|p| p.is_finite()).fold(0.0, f64::max);
    let (ca, cb) = (count(a), count(b));
    ca < cb || (ca == cb && lt(worst(a), worst(b)))
}

fn served_max(r: &PositioningReport, s: &AssignmentState, j: usize) -> f64 {
    (0..s.num_users()).filter(|&k| s.assoc[j][k]).map(|k| r.phi[k]).fold(0.0, f64::max)
}

fn user_sum(r: &PositioningReport, s: &AssignmentState, k: usize) -> f64 {
    if r.phi[k].is_infinite() {
        return f64::INFINITY;
    }
    (0..s.num_anchors()).filter(|&j| s.assoc[j][k]).map(|j| r.lambda[j][k] * libm::sqrt(r.sigma2[j][k])).sum()
}

/// Anchors whose choice moved if `b` is one swap or one relocation away from `a`.
fn numerology_move(a: &AssignmentState, b: &AssignmentState) -> Option<Vec<usize>> {
    let diff: Vec<usize> = (0..a.num_anchors()).filter(|&j| a.choice[j] != b.choice[j]).collect();
    match diff.len() {
        1 => Some(diff),
        2 if a.choice[diff[0]] == b.choice[diff[1]] && a.choice[diff[1]] == b.choice[diff[0]] => Some(diff),
        _ => None,
    }
}

/// Users whose anchor sets changed if `b` is one swap, transfer, reassign,
/// drop or add away from `a`.
fn association_move(a: &AssignmentState, b: &AssignmentState) -> Option<Vec<usize>> {
    let (jn, kn) = (a.num_anchors(), a.num_users());
    let mut removed = Vec::new();
    let mut added = Vec::new();
    for j in 0..jn {
        for k in 0..kn {
            match (a.assoc[j][k], b.assoc[j][k]) {
                (true, false) => removed.push((j, k)),
                (false, true) => added.push((j, k)),
                _ => {}
            }
        }
    }
    let ok = match (removed.len(), added.len()) {
        (1, 0) | (0, 1) => true,
        (1, 1) => removed[0].0 == added[0].0 || removed[0].1 == added[0].1,
        (2, 2) => {
            let (r0, r1) = (removed[0], removed[1]);
            r0.0 != r1.0 && r0.1 != r1.1 && added.contains(&(r0.0, r1.1)) && added.contains(&(r1.0, r0.1))
        }
        _ => false,
    };
    if !ok {
        return None;
    }
    let mut users: Vec<usize> = removed.iter().chain(&added).map(|p| p.1).collect();
    users.sort_unstable();
    users.dedup();
    Some(users)
}

fn blocks(family: Family, from: &Scored, to: &Scored) -> bool {
    if !lower_rank(&to.report.phi, &from.report.phi) {
        return false;
    }
    match family {
        Family::Numerology => match numerology_move(&from.state, &to.state) {
            Some(anchors) => anchors
                .iter()
                .all(|&j| le(served_max(&to.report, &to.state, j), served_max(&from.report, &from.state, j))),
            None => false,
        },
        Family::Association => match association_move(&from.state, &to.state) {
            Some(users) => users.iter().all(|&k| {
                to.state.anchors_of(k).len() >= 3
                    && le(user_sum(&to.report, &to.state, k), user_sum(&from.report, &from.state, k))
            }),
            None => false,
        },
    }
}

fn score(ev: &Evaluator<'_>, cache: &mut LinkCache, states: Vec<AssignmentState>) -> Result<Vec<Scored>> {
    states
        .into_iter()
        .map(|state| {
            let report = cache.report(ev, &state)?;
            Ok(Scored { state, report })
        })
        .collect()
}

/// Global optimum of the family around `base` and, for small spaces, every
/// state without a blocking neighbour.
pub fn exhaustive_matching(
    ev: &Evaluator<'_>,
    cache: &mut LinkCache,
    base: &AssignmentState,
    family: Family,
) -> Result<ExhaustiveResult> {
    let all = score(ev, cache, enumerate(ev, base, family)?)?;
    let best =
        all.iter().min_by(|a, b| a.report.objective.total_cmp(&b.report.objective)).expect("non-empty enumeration");
    let stable = (all.len() <= MAX_STABLE_LISTING)
        .then(|| all.iter().filter(|s| !all.iter().any(|t| blocks(family, s, t))).map(|s| s.state.clone()).collect());
    Ok(ExhaustiveResult { best: best.state.clone(), best_objective: best.report.objective, states: all.len(), stable })
}

/// First state of the family that blocks `state`, if any.
pub fn blocking_neighbour(
    ev: &Evaluator<'_>,
    cache: &mut LinkCache,
    state: &AssignmentState,
    family: Family,
) -> Result<Option<AssignmentState>> {
    let from = Scored { state: state.clone(), report: cache.report(ev, state)? };
    for cand in enumerate(ev, state, family)? {
        let to = Scored { report: cache.report(ev, &cand)?, state: cand };
        if blocks(family, &from, &to) {
            return Ok(Some(to.state));
        }
    }
    Ok(None)
}
