//! Evaluation context tying a scenario, its channels and the integral
//! table together, plus per-beam caches of link coefficients.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{ChannelRealization, Codebook};
use crate::error::{Error, Result};
use crate::numerology::{CombChoice, NumerologyConfig};
use crate::positioning::geometry_factors;
use crate::ranging::{self, LinkTerms};
use crate::scenario::Scenario;
use crate::state::AssignmentState;

/// Borrowed view of everything the analytic model needs.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator<'a> {
    pub scenario: &'a Scenario,
    pub channels: &'a ChannelRealization,
    pub codebook: &'a Codebook,
    pub table: &'a crate::integrals::IntegralTable,
}

/// `|h|^2` for one beam on every numerology grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamGains {
    pub beam: usize,
    users: usize,
    g: Vec<Vec<Vec<f64>>>,
}

impl BeamGains {
    /// Gains of link `(j, k)` on the grid of numerology `l`.
    pub fn get(&self, l: usize, j: usize, k: usize) -> &[f64] {
        &self.g[l][j * self.users + k]
    }
}

impl<'a> Evaluator<'a> {
    pub fn numerologies(&self) -> &'a [NumerologyConfig] {
        &self.table.numerologies
    }

    pub fn num_anchors(&self) -> usize {
        self.scenario.num_anchors()
    }

    pub fn num_users(&self) -> usize {
        self.scenario.num_users()
    }

    /// Number of (numerology, offset) choices.
    pub fn num_choices(&self) -> usize {
        self.numerologies().len() * self.table.comb()
    }

    pub fn choice_index(&self, c: CombChoice) -> usize {
        c.numerology as usize * self.table.comb() + c.offset
    }

    pub fn choice_at(&self, idx: usize) -> CombChoice {
        let comb = self.table.comb();
        CombChoice { numerology: (idx / comb) as u32, offset: idx % comb }
    }

    pub fn beam_gains(&self, beam: usize) -> Result<BeamGains> {
        let theta = self
            .codebook
            .entries
            .get(beam)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("beam {beam} not in codebook")))?;
        let (jn, kn) = (self.num_anchors(), self.num_users());
        let g = (0..self.numerologies().len())
            .map(|l| {
                let mut v = Vec::with_capacity(jn * kn);
                for j in 0..jn {
                    for k in 0..kn {
                        v.push(self.channels.gains(l, j, k, theta));
                    }
                }
                v
            })
            .collect();
        Ok(BeamGains { beam, users: kn, g })
    }

    /// Full evaluation of a state with a fresh cache.
    pub fn evaluate(&self, state: &AssignmentState) -> Result<PositioningReport> {
        LinkCache::new(self, state.beam)?.report(self, state)
    }
}

/// Lazily filled noise and cross coefficients for one beam.
#[derive(Debug, Clone)]
pub struct LinkCache {
    pub gains: BeamGains,
    anchors: usize,
    users: usize,
    choices: usize,
    noise: Vec<f64>,
    cross: Vec<f64>,
}

impl LinkCache {
    pub fn new(ev: &Evaluator<'_>, beam: usize) -> Result<Self> {
        let (jn, kn, nc) = (ev.num_anchors(), ev.num_users(), ev.num_choices());
        Ok(Self {
            gains: ev.beam_gains(beam)?,
            anchors: jn,
            users: kn,
            choices: nc,
            noise: vec![f64::NAN; jn * kn * nc],
            cross: vec![f64::NAN; jn * kn * jn * nc * nc],
        })
    }

    pub fn beam(&self) -> usize {
        self.gains.beam
    }

    /// Noise coefficient of link `(j, k)` with anchor `j` on `c`.
    pub fn noise(&mut self, ev: &Evaluator<'_>, j: usize, k: usize, c: CombChoice) -> Result<f64> {
        let i = (j * self.users + k) * self.choices + ev.choice_index(c);
        if self.noise[i].is_nan() {
            self.noise[i] = ranging::noise_coeff(ev, &self.gains, j, k, c, 0)?;
        }
        Ok(self.noise[i])
    }

    /// Cross coefficient of interferer `j2` on `c2` into link `(j, k)` on `c`.
    pub fn cross(
        &mut self,
        ev: &Evaluator<'_>,
        j: usize,
        k: usize,
        c: CombChoice,
        j2: usize,
        c2: CombChoice,
    ) -> Result<f64> {
        let i = (((j * self.users + k) * self.anchors + j2) * self.choices + ev.choice_index(c)) * self.choices
            + ev.choice_index(c2);
        if self.cross[i].is_nan() {
            self.cross[i] = ranging::cross_coeff(ev, &self.gains, j, k, c, j2, c2, 0)?;
        }
        Ok(self.cross[i])
    }

    /// Noise and per-interferer coefficients of link `(j, k)` under `state`.
    pub fn link_terms(&mut self, ev: &Evaluator<'_>, state: &AssignmentState, j: usize, k: usize) -> Result<LinkTerms> {
        let c = state.choice[j].ok_or(Error::Unassigned(j))?;
        let noise = self.noise(ev, j, k, c)?;
        let mut cross = vec![0.0; self.anchors];
        for (j2, slot) in cross.iter_mut().enumerate() {
            if j2 != j {
                let c2 = state.choice[j2].ok_or(Error::Unassigned(j2))?;
                *slot = self.cross(ev, j, k, c, j2, c2)?;
            }
        }
        Ok(LinkTerms { noise, cross })
    }

    /// Ranging variance `sigma^2_{j,k}` (m^2).
    pub fn variance(&mut self, ev: &Evaluator<'_>, state: &AssignmentState, j: usize, k: usize) -> Result<f64> {
        Ok(self.link_terms(ev, state, j, k)?.variance(&state.power_w, j))
    }

    /// `sigma2[j][k]` for every pair.
    pub fn ranging(&mut self, ev: &Evaluator<'_>, state: &AssignmentState) -> Result<Vec<Vec<f64>>> {
        (0..self.anchors).map(|j| (0..self.users).map(|k| self.variance(ev, state, j, k)).collect()).collect()
    }

    pub fn report(&mut self, ev: &Evaluator<'_>, state: &AssignmentState) -> Result<PositioningReport> {
        let sigma2 = self.ranging(ev, state)?;
        Ok(positioning_report(ev.scenario, state, sigma2))
    }
}

/// Per-beam caches with a bound on how many beams are kept.
#[derive(Debug, Clone)]
pub struct CachePool {
    caches: BTreeMap<usize, (u64, LinkCache)>,
    capacity: usize,
    tick: u64,
}

impl CachePool {
    pub fn new(capacity: usize) -> Self {
        Self { caches: BTreeMap::new(), capacity: capacity.max(1), tick: 0 }
    }

    pub fn get(&mut self, ev: &Evaluator<'_>, beam: usize) -> Result<&mut LinkCache> {
        self.tick += 1;
        let tick = self.tick;
        if !self.caches.contains_key(&beam) {
            if self.caches.len() >= self.capacity {
                let oldest = self.caches.iter().min_by_key(|(_, (t, _))| *t).map(|(b, _)| *b);
                if let Some(b) = oldest {
                    self.caches.remove(&b);
                }
            }
            self.caches.insert(beam, (tick, LinkCache::new(ev, beam)?));
        }
        let entry = self.caches.get_mut(&beam).expect("inserted above");
        entry.0 = tick;
        Ok(&mut entry.1)
    }
}

/// Ranging variances, geometry factors and per-user errors of one state.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PositioningReport {
    /// `sigma2[j][k]` (m^2) for every pair, associated or not.
    pub sigma2: Vec<Vec<f64>>,
    /// `lambda[j][k]`, zero where not associated.
    pub lambda: Vec<Vec<f64>>,
    /// Per-user error; infinite for degenerate geometry.
    pub phi: Vec<f64>,
    pub objective: f64,
}

/// Geometry factors and error of user `k` against an anchor set.
pub fn user_error(
    scenario: &Scenario,
    anchor_var: &[f64],
    sigma2: &[Vec<f64>],
    anchors: &[usize],
    k: usize,
) -> (f64, Vec<f64>) {
    let pos: Vec<[f64; 3]> = anchors.iter().map(|&j| scenario.anchors[j].broadcast_m).collect();
    match geometry_factors(scenario.users[k].position_m, &pos) {
        Ok(f) => {
            let s: f64 = anchors.iter().zip(&f.lambda).map(|(&j, l)| l * l * (anchor_var[j] + sigma2[j][k])).sum();
            (libm::sqrt(s), f.lambda)
        }
        Err(_) => (f64::INFINITY, vec![0.0; anchors.len()]),
    }
}

/// Assemble a report from ranging variances.
pub fn positioning_report(scenario: &Scenario, state: &AssignmentState, sigma2: Vec<Vec<f64>>) -> PositioningReport {
    let (jn, kn) = (state.num_anchors(), state.num_users());
    let mut lambda = vec![vec![0.0; kn]; jn];
    let mut phi = Vec::with_capacity(kn);
    for k in 0..kn {
        let set = state.anchors_of(k);
        let (p, l) = user_error(scenario, &state.anchor_var_m2, &sigma2, &set, k);
        for (&j, v) in set.iter().zip(l) {
            lambda[j][k] = v;
        }
        phi.push(p);
    }
    let objective = phi.iter().copied().fold(0.0, f64::max);
    PositioningReport { sigma2, lambda, phi, objective }
}

/// Numerologies and integral table of a scenario's band and comb.
pub fn build_table(scenario: &Scenario) -> Result<crate::integrals::IntegralTable> {
    let nums = crate::numerology::numerology_set(scenario.numerology_count, scenario.bandwidth_hz, scenario.comb_size)?;
    crate::integrals::IntegralTable::build(nums, 0.5 * scenario.dll.frontend_bw_hz)
}

/// One drawn deployment with its channels and IRS codebook.
#[derive(Debug, Clone)]
pub struct Instance {
    pub scenario: Scenario,
    pub channels: ChannelRealization,
    pub codebook: Codebook,
}

impl Instance {
    /// Positions from stream `SCENARIO`, fading from stream `CHANNELS`.
    pub fn generate(
        config: &crate::scenario::ScenarioConfig,
        seed: u64,
        numerologies: &[NumerologyConfig],
    ) -> Result<Self> {
        let scenario = crate::scenario::generate_scenario(config, seed)?;
        let mut rng = crate::rng::stream(seed, crate::rng::streams::CHANNELS);
        let channels = crate::channel::draw_channels(&scenario, numerologies, &mut rng)?;
        let codebook = crate::channel::kronecker_codebook(&scenario.irs);
        Ok(Self { scenario, channels, codebook })
    }

    pub fn evaluator<'a>(&'a self, table: &'a crate::integrals::IntegralTable) -> Evaluator<'a> {
        Evaluator { scenario: &self.scenario, channels: &self.channels, codebook: &self.codebook, table }
    }
}

/// Integral table for a configuration, without drawing a scenario.
pub fn table_for_config(config: &crate::scenario::ScenarioConfig) -> Result<crate::integrals::IntegralTable> {
    let nums = crate::numerology::numerology_set(config.numerology_count, config.bandwidth_hz, config.comb_size)?;
    let be = config.dll.frontend_bw_hz.unwrap_or(2.0 * config.bandwidth_hz);
    crate::integrals::IntegralTable::build(nums, 0.5 * be)
}
