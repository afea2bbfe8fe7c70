//! Swap matchings for the numerology/offset selection and the user-anchor
//! association.
//!
//! Both matchers scan candidate moves in a fixed order (anchors ascending,
//! partners ascending, holes last), apply the first blocking move and
//! restart. A move blocks when every involved party is no worse off and the
//! state's [`Rank`] strictly falls, so the scan terminates. With every user
//! finite the rank is just the maximum positioning error.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{user_error, Evaluator, LinkCache, PositioningReport};
use crate::numerology::CombChoice;
use crate::scenario::Scenario;
use crate::state::AssignmentState;

/// Relative slack when comparing preference values.
pub const PREF_REL_TOL: f64 = 1e-12;

/// `new` is at most `old`, up to the relative slack.
pub fn no_worse(new: f64, old: f64) -> bool {
    if old == f64::INFINITY {
        return !new.is_nan();
    }
    new <= old + PREF_REL_TOL * old.abs()
}

/// `new` is below `old` by more than the relative slack.
pub fn strictly_better(new: f64, old: f64) -> bool {
    if old == f64::INFINITY {
        return new < f64::INFINITY;
    }
    new < old - PREF_REL_TOL * old.abs()
}

/// Degenerate-user count, then the worst finite error. Ordered
/// lexicographically, so fixing one of several degenerate users is progress.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rank {
    pub degenerate: usize,
    pub worst: f64,
}

impl Rank {
    pub fn of(phi: &[f64]) -> Self {
        let degenerate = phi.iter().filter(|p| !p.is_finite()).count();
        let worst = phi.iter().copied().filter(|p| p.is_finite()).fold(0.0, f64::max);
        Self { degenerate, worst }
    }

    /// `self` is strictly below `old`, up to the relative slack on `worst`.
    pub fn improves(&self, old: &Rank) -> bool {
        self.degenerate < old.degenerate
            || (self.degenerate == old.degenerate && strictly_better(self.worst, old.worst))
    }
}

/// Accepted moves of one matcher run.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MatchingTrace {
    /// `(rank before, rank after)` per accepted move.
    pub accepted: Vec<(Rank, Rank)>,
    pub evaluations: usize,
}

impl MatchingTrace {
    /// Every accepted move strictly lowered the rank, and each move started
    /// where the previous one ended.
    pub fn strictly_decreasing(&self) -> bool {
        self.accepted
            .iter()
            .all(|(a, b)| b.degenerate < a.degenerate || (b.degenerate == a.degenerate && b.worst < a.worst))
            && self.accepted.windows(2).all(|w| w[1].0 == w[0].1)
    }
}

/// Anchor preference in the numerology game: worst error over the users it
/// serves, zero when it serves none.
pub fn anchor_preference(report: &PositioningReport, state: &AssignmentState, j: usize) -> f64 {
    state.users_of(j).iter().map(|&k| report.phi[k]).fold(0.0, f64::max)
}

/// User preference in the association game: `sum_j lambda_jk sigma_jk`,
/// infinite when the user's geometry is degenerate.
pub fn user_preference(report: &PositioningReport, state: &AssignmentState, k: usize) -> f64 {
    if report.phi[k] == f64::INFINITY {
        return f64::INFINITY;
    }
    state.anchors_of(k).iter().map(|&j| report.lambda[j][k] * libm::sqrt(report.sigma2[j][k])).sum()
}

/// Put anchor `j` on `c`, keeping its total transmit power.
pub fn set_choice(ev: &Evaluator<'_>, state: &mut AssignmentState, j: usize, c: CombChoice) -> Result<()> {
    let old = state.choice[j].ok_or(Error::Unassigned(j))?;
    let nums = ev.numerologies();
    let n_old = nums[old.numerology as usize].active as f64;
    let n_new = nums
        .get(c.numerology as usize)
        .ok_or_else(|| Error::InvalidArgument(alloc::format!("numerology {} not configured", c.numerology)))?
        .active as f64;
    state.power_w[j] *= n_old / n_new;
    state.choice[j] = Some(c);
    Ok(())
}

fn numerology_blocks(
    old_state: &AssignmentState,
    old: &PositioningReport,
    new: &PositioningReport,
    anchors: &[usize],
) -> bool {
    Rank::of(&new.phi).improves(&Rank::of(&old.phi))
        && anchors.iter().all(|&j| no_worse(anchor_preference(new, old_state, j), anchor_preference(old, old_state, j)))
}

/// Numerology and comb-offset selection with association, powers, anchor
/// variances and beam fixed.
pub fn numerology_offset_matching(
    ev: &Evaluator<'_>,
    cache: &mut LinkCache,
    state: &mut AssignmentState,
) -> Result<MatchingTrace> {
    let jn = state.num_anchors();
    let nc = ev.num_choices();
    let mut report = cache.report(ev, state)?;
    let mut trace = MatchingTrace { evaluations: 1, ..Default::default() };
    'scan: loop {
        for j in 0..jn {
            let cj = state.choice[j].ok_or(Error::Unassigned(j))?;
            for j2 in 0..jn {
                let c2 = state.choice[j2].ok_or(Error::Unassigned(j2))?;
                if j2 == j || c2 == cj {
                    continue;
                }
                let mut cand = state.clone();
                set_choice(ev, &mut cand, j, c2)?;
                set_choice(ev, &mut cand, j2, cj)?;
                let r = cache.report(ev, &cand)?;
                trace.evaluations += 1;
                if numerology_blocks(state, &report, &r, &[j, j2]) {
                    trace.accepted.push((Rank::of(&report.phi), Rank::of(&r.phi)));
                    *state = cand;
                    report = r;
                    continue 'scan;
                }
            }
            for idx in 0..nc {
                let c = ev.choice_at(idx);
                if c == cj {
                    continue;
                }
                let mut cand = state.clone();
                set_choice(ev, &mut cand, j, c)?;
                let r = cache.report(ev, &cand)?;
                trace.evaluations += 1;
                if numerology_blocks(state, &report, &r, &[j]) {
                    trace.accepted.push((Rank::of(&report.phi), Rank::of(&r.phi)));
                    *state = cand;
                    report = r;
                    continue 'scan;
                }
            }
        }
        return Ok(trace);
    }
}

/// Per-user errors and preferences with the ranging variances held fixed.
struct AssocView<'a> {
    scenario: &'a Scenario,
    anchor_var: &'a [f64],
    sigma2: &'a [Vec<f64>],
}

impl AssocView<'_> {
    /// `(phi_k, U_k)` for user `k` under `assoc`.
    fn user(&self, assoc: &[Vec<bool>], k: usize) -> (f64, f64) {
        let set: Vec<usize> = (0..assoc.len()).filter(|&j| assoc[j][k]).collect();
        let (phi, lambda) = user_error(self.scenario, self.anchor_var, self.sigma2, &set, k);
        if phi == f64::INFINITY {
            return (phi, phi);
        }
        let pref = set.iter().zip(&lambda).map(|(&j, l)| l * libm::sqrt(self.sigma2[j][k])).sum();
        (phi, pref)
    }
}

/// `(user, phi, preference)` after a move.
type UserUpdate = (usize, f64, f64);
/// Edited `(anchor, user, associated)` cells and the users they touch.
type AssocMove = (Vec<(usize, usize, bool)>, Vec<usize>);

/// Outcome of one association move: per-user values and the new rank.
fn assoc_blocks(
    view: &AssocView<'_>,
    cand: &[Vec<bool>],
    users: &[usize],
    phi: &[f64],
    pref: &[f64],
) -> Option<(Rank, Vec<UserUpdate>)> {
    let mut changed = Vec::with_capacity(users.len());
    for &k in users {
        let (p, u) = view.user(cand, k);
        if !no_worse(u, pref[k]) {
            return None;
        }
        changed.push((k, p, u));
    }
    let new_phi: Vec<f64> =
        phi.iter().enumerate().map(|(k, &p)| changed.iter().find(|c| c.0 == k).map_or(p, |c| c.1)).collect();
    let new_rank = Rank::of(&new_phi);
    new_rank.improves(&Rank::of(phi)).then_some((new_rank, changed))
}

/// User-anchor association with numerologies, powers, anchor variances and
/// beam fixed. Every user keeps at least three anchors.
pub fn user_anchor_matching(
    ev: &Evaluator<'_>,
    cache: &mut LinkCache,
    state: &mut AssignmentState,
) -> Result<MatchingTrace> {
    let (jn, kn) = (state.num_anchors(), state.num_users());
    if jn < 3 {
        return Err(Error::Matching(alloc::format!("{jn} anchors cannot give every user three")));
    }
    if let Some(k) = (0..kn).find(|&k| state.anchors_of(k).len() < 3) {
        return Err(Error::Matching(alloc::format!("user {k} starts with fewer than three anchors")));
    }
    let sigma2 = cache.ranging(ev, state)?;
    let view = AssocView { scenario: ev.scenario, anchor_var: &state.anchor_var_m2, sigma2: &sigma2 };
    let mut assoc = state.assoc.clone();
    let mut phi = vec![0.0; kn];
    let mut pref = vec![0.0; kn];
    for k in 0..kn {
        (phi[k], pref[k]) = view.user(&assoc, k);
    }
    let mut trace = MatchingTrace { evaluations: 1, ..Default::default() };
    'scan: loop {
        let old_rank = Rank::of(&phi);
        let mut moves: Vec<AssocMove> = Vec::new();
        for j in 0..jn {
            for k in 0..kn {
                if !assoc[j][k] {
                    continue;
                }
                let count = (0..jn).filter(|&a| assoc[a][k]).count();
                for j2 in 0..jn {
                    for k2 in 0..kn {
                        if j2 != j && k2 != k && assoc[j2][k2] && !assoc[j][k2] && !assoc[j2][k] {
                            moves.push((
                                vec![(j, k, false), (j2, k2, false), (j, k2, true), (j2, k, true)],
                                vec![k, k2],
                            ));
                        }
                    }
                }
                for j2 in 0..jn {
                    if !assoc[j2][k] {
                        moves.push((vec![(j, k, false), (j2, k, true)], vec![k]));
                    }
                }
                if count > 3 {
                    for k2 in 0..kn {
                        if !assoc[j][k2] {
                            moves.push((vec![(j, k, false), (j, k2, true)], vec![k, k2]));
                        }
                    }
                    moves.push((vec![(j, k, false)], vec![k]));
                }
            }
        }
        for j in 0..jn {
            for k in 0..kn {
                if !assoc[j][k] {
                    moves.push((vec![(j, k, true)], vec![k]));
                }
            }
        }
        for (edits, users) in moves {
            let mut cand = assoc.clone();
            for &(j, k, v) in &edits {
                cand[j][k] = v;
            }
            trace.evaluations += 1;
            if let Some((new_rank, changed)) = assoc_blocks(&view, &cand, &users, &phi, &pref) {
                trace.accepted.push((old_rank, new_rank));
                assoc = cand;
                for (k, p, u) in changed {
                    phi[k] = p;
                    pref[k] = u;
                }
                continue 'scan;
            }
        }
        state.assoc = assoc;
        return Ok(trace);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_counts_degenerate_users_first() {
        let inf = f64::INFINITY;
        let two = Rank::of(&[inf, 3.0, inf]);
        assert_eq!(two, Rank { degenerate: 2, worst: 3.0 });
        assert!(Rank::of(&[9.0, 3.0, inf]).improves(&two));
        assert!(!Rank::of(&[inf, 4.0, inf]).improves(&two));
        assert!(Rank::of(&[1.0, 2.0]).improves(&Rank::of(&[1.0, 2.5])));
    }

    #[test]
    fn comparators_handle_infinity() {
        assert!(strictly_better(5.0, f64::INFINITY));
        assert!(!strictly_better(f64::INFINITY, f64::INFINITY));
        assert!(no_worse(f64::INFINITY, f64::INFINITY));
        assert!(!no_worse(f64::INFINITY, 1.0));
        assert!(!strictly_better(1.0, 1.0));
        assert!(no_worse(1.0 + 1e-14, 1.0));
        assert!(!no_worse(f64::NAN, 1.0));
    }
}
