//! Alternating optimizer: power/privacy solve, user-anchor matching,
//! numerology/offset matching and DQN beam selection, plus the ablation
//! baselines that stop after a prefix of the first pass.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::Rng;

use super::dqn::{DqnAgent, DqnConfig, Transition};
use super::matching::{numerology_offset_matching, user_anchor_matching, MatchingTrace, Rank};
use super::power::{solve_power_privacy, PowerParams};
use crate::error::{Error, Result};
use crate::model::{CachePool, Evaluator, PositioningReport};
use crate::rng::SimRng;
use crate::state::AssignmentState;

/// Outer-loop settings.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct HomdParams {
    pub max_outer: usize,
    /// Stop once an outer pass neither fixes a degenerate user nor improves
    /// the best objective by this fraction.
    pub rel_tol: f64,
    pub power: PowerParams,
    pub dqn: DqnConfig,
    /// Beams whose link coefficients stay cached.
    pub cache_beams: usize,
}

impl Default for HomdParams {
    fn default() -> Self {
        Self { max_outer: 50, rel_tol: 1e-4, power: PowerParams::default(), dqn: DqnConfig::default(), cache_beams: 64 }
    }
}

/// Objective after each stage of one outer pass.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IterationDiagnostics {
    pub start: f64,
    pub after_power: f64,
    pub after_association: f64,
    pub after_numerology: f64,
    pub after_beam: f64,
    pub kkt_residual: f64,
    pub association: MatchingTrace,
    pub numerology: MatchingTrace,
    pub beam: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomdSolution {
    /// Best state seen.
    pub state: AssignmentState,
    pub objective: f64,
    /// Best objective after each outer pass.
    pub history: Vec<f64>,
    pub diagnostics: Vec<IterationDiagnostics>,
    /// States after power, association and numerology of the first pass.
    pub first_pass: [AssignmentState; 3],
    /// Rewards that were negative and clipped to zero.
    pub reward_clips: usize,
}

/// Random association (every user gets a uniform number of at least three
/// anchors), numerology, offset and beam; full power and minimum variance.
pub fn random_state(ev: &Evaluator<'_>, rng: &mut SimRng) -> Result<AssignmentState> {
    let (jn, kn) = (ev.num_anchors(), ev.num_users());
    if jn < 3 {
        return Err(Error::Matching(alloc::format!("{jn} anchors cannot give every user three")));
    }
    let mut assoc = vec![vec![false; kn]; jn];
    for k in 0..kn {
        let size = rng.random_range(3..=jn);
        for j in sample(rng, jn, size) {
            assoc[j][k] = true;
        }
    }
    let nums = ev.numerologies();
    let choice: Vec<_> = (0..jn).map(|_| Some(ev.choice_at(rng.random_range(0..ev.num_choices())))).collect();
    let power_w = ev
        .scenario
        .anchors
        .iter()
        .zip(&choice)
        .map(|(a, c)| a.p_max_w / nums[c.expect("set above").numerology as usize].active as f64)
        .collect();
    Ok(AssignmentState {
        assoc,
        choice,
        power_w,
        anchor_var_m2: ev.scenario.anchors.iter().map(|a| a.min_var_m2).collect(),
        beam: rng.random_range(0..ev.codebook.len()),
    })
}

/// DQN input: channel norms of every link under the state's beam, user
/// major, scaled by the largest entry.
pub fn beam_state(ev: &Evaluator<'_>, pool: &mut CachePool, state: &AssignmentState) -> Result<Vec<f64>> {
    let cache = pool.get(ev, state.beam)?;
    let (jn, kn) = (ev.num_anchors(), ev.num_users());
    let mut v = Vec::with_capacity(jn * kn);
    for k in 0..kn {
        for j in 0..jn {
            let c = state.choice[j].ok_or(Error::Unassigned(j))?;
            let g = cache.gains.get(c.numerology as usize, j, k);
            v.push(libm::sqrt(g.iter().sum::<f64>()));
        }
    }
    let m = v.iter().copied().fold(0.0, f64::max);
    if m > 0.0 {
        v.iter_mut().for_each(|x| *x /= m);
    }
    Ok(v)
}

struct Best {
    state: AssignmentState,
    objective: f64,
    rank: Rank,
}

impl Best {
    fn new(state: &AssignmentState, report: &PositioningReport) -> Self {
        Self { state: state.clone(), objective: report.objective, rank: Rank::of(&report.phi) }
    }

    /// Keep `state` and return its objective if it ranks strictly lower.
    fn offer(&mut self, state: &AssignmentState, report: &PositioningReport) -> f64 {
        let rank = Rank::of(&report.phi);
        if rank.improves(&self.rank) {
            *self = Self { state: state.clone(), objective: report.objective, rank };
        }
        report.objective
    }
}

/// Run the alternating optimizer from `init`.
pub fn homd(ev: &Evaluator<'_>, init: &AssignmentState, params: &HomdParams, rng: &mut SimRng) -> Result<HomdSolution> {
    let mut pool = CachePool::new(params.cache_beams);
    let mut state = init.clone();
    let report = pool.get(ev, state.beam)?.report(ev, &state)?;
    let mut objective = report.objective;
    let mut best = Best::new(&state, &report);
    let mut agent = DqnAgent::new(ev.num_anchors() * ev.num_users(), ev.codebook.len(), params.dqn.clone(), rng)?;
    let mut history = Vec::new();
    let mut diagnostics = Vec::new();
    let mut first_pass = None;
    let mut reward_clips = 0;
    for _ in 0..params.max_outer.max(1) {
        let before = best.rank;
        let start = objective;

        let cache = pool.get(ev, state.beam)?;
        let pw = solve_power_privacy(ev, cache, &state, &params.power)?;
        state.power_w = pw.power_w;
        state.anchor_var_m2 = pw.anchor_var_m2;
        let after_power = best.offer(&state, &cache.report(ev, &state)?);
        let s_power = state.clone();

        let association = user_anchor_matching(ev, cache, &mut state)?;
        let after_association = best.offer(&state, &cache.report(ev, &state)?);
        let s_assoc = state.clone();

        let numerology = numerology_offset_matching(ev, cache, &mut state)?;
        let after_numerology = best.offer(&state, &cache.report(ev, &state)?);
        if first_pass.is_none() {
            first_pass = Some([s_power, s_assoc, state.clone()]);
        }

        let mut s = beam_state(ev, &mut pool, &state)?;
        for _ in 0..params.dqn.steps_per_iteration {
            let a = agent.select(&s, true, rng)?;
            let mut cand = state.clone();
            cand.beam = a;
            let obj = best.offer(&cand, &pool.get(ev, a)?.report(ev, &cand)?);
            let mut reward = 1.0 - obj;
            if !(reward >= 0.0) {
                reward = 0.0;
                reward_clips += 1;
            }
            let next = beam_state(ev, &mut pool, &cand)?;
            agent.remember(Transition { state: s, action: a, reward, next_state: next.clone(), done: true });
            agent.learn(rng)?;
            agent.decay_epsilon();
            s = next;
        }
        state.beam = agent.select(&s, false, rng)?;
        objective = best.offer(&state, &pool.get(ev, state.beam)?.report(ev, &state)?);

        diagnostics.push(IterationDiagnostics {
            start,
            after_power,
            after_association,
            after_numerology,
            after_beam: objective,
            kkt_residual: pw.kkt_residual,
            association,
            numerology,
            beam: state.beam,
        });
        history.push(best.objective);
        let fixed = best.rank.degenerate < before.degenerate;
        if !fixed && !(before.worst - best.rank.worst >= params.rel_tol * before.worst) {
            break;
        }
    }
    Ok(HomdSolution {
        state: best.state,
        objective: best.objective,
        history,
        diagnostics,
        first_pass: first_pass.expect("at least one pass"),
        reward_clips,
    })
}

/// Compared schemes: the random start, three ablations and the full method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Scheme {
    /// Random association, numerology, offset and beam at full power.
    Bl0,
    /// `Bl0` with optimized powers.
    Bl1,
    /// `Bl1` with matched association.
    Bl2,
    /// `Bl2` with matched numerologies and offsets.
    Bl3,
    Proposed,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Bl0, Scheme::Bl1, Scheme::Bl2, Scheme::Bl3, Scheme::Proposed];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Bl0 => "BL0",
            Scheme::Bl1 => "BL1",
            Scheme::Bl2 => "BL2",
            Scheme::Bl3 => "BL3",
            Scheme::Proposed => "proposed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name().eq_ignore_ascii_case(s))
    }
}

/// Objective of every scheme from one random start.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeResults {
    pub objectives: [f64; 5],
    pub states: [AssignmentState; 5],
    pub solution: HomdSolution,
}

impl SchemeResults {
    pub fn objective(&self, s: Scheme) -> f64 {
        self.objectives[s as usize]
    }
}

/// Draw a random start and run every scheme from it.
pub fn run_schemes(ev: &Evaluator<'_>, params: &HomdParams, rng: &mut SimRng) -> Result<SchemeResults> {
    let init = random_state(ev, rng)?;
    let sol = homd(ev, &init, params, rng)?;
    let states =
        [init, sol.first_pass[0].clone(), sol.first_pass[1].clone(), sol.first_pass[2].clone(), sol.state.clone()];
    let mut objectives = [0.0; 5];
    for (o, s) in objectives.iter_mut().zip(&states) {
        *o = ev.evaluate(s)?.objective;
    }
    Ok(SchemeResults { objectives, states, solution: sol })
}
