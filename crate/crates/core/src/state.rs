//! Decision variables of the positioning problem.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::numerology::{CombChoice, NumerologyConfig};
use crate::scenario::Scenario;

/// Association, numerology/offset selection, powers, anchor location
/// variances and the IRS beam.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssignmentState {
    /// `assoc[j][k]`: user `k` ranges against anchor `j`.
    pub assoc: Vec<Vec<bool>>,
    /// Selected numerology and comb offset per anchor.
    pub choice: Vec<Option<CombChoice>>,
    /// Per-subcarrier transmit power (W).
    pub power_w: Vec<f64>,
    /// Total anchor location variance `xi^2` (m^2).
    pub anchor_var_m2: Vec<f64>,
    pub beam: usize,
}

impl AssignmentState {
    /// Every user associated with every anchor, all anchors on numerology 0
    /// offset 0 at full power and minimum location variance.
    pub fn full(scenario: &Scenario, numerologies: &[NumerologyConfig]) -> Self {
        let j = scenario.num_anchors();
        let k = scenario.num_users();
        let n0 = numerologies[0].active as f64;
        Self {
            assoc: vec![vec![true; k]; j],
            choice: vec![Some(CombChoice { numerology: 0, offset: 0 }); j],
            power_w: scenario.anchors.iter().map(|a| a.p_max_w / n0).collect(),
            anchor_var_m2: scenario.anchors.iter().map(|a| a.min_var_m2).collect(),
            beam: 0,
        }
    }

    pub fn num_anchors(&self) -> usize {
        self.assoc.len()
    }

    pub fn num_users(&self) -> usize {
        self.assoc.first().map_or(0, Vec::len)
    }

    /// Anchors serving user `k`, ascending.
    pub fn anchors_of(&self, k: usize) -> Vec<usize> {
        (0..self.num_anchors()).filter(|&j| self.assoc[j][k]).collect()
    }

    /// Users served by anchor `j`, ascending.
    pub fn users_of(&self, j: usize) -> Vec<usize> {
        (0..self.num_users()).filter(|&k| self.assoc[j][k]).collect()
    }

    /// Binary `u[j][l]`.
    pub fn numerology_matrix(&self, count: usize) -> Vec<Vec<bool>> {
        self.choice
            .iter()
            .map(|c| (0..count).map(|l| c.is_some_and(|c| c.numerology as usize == l)).collect())
            .collect()
    }

    /// Binary `v[j][i]`.
    pub fn offset_matrix(&self, comb: usize) -> Vec<Vec<bool>> {
        self.choice.iter().map(|c| (0..comb).map(|i| c.is_some_and(|c| c.offset == i)).collect()).collect()
    }

    /// Constraint violations against a scenario; empty when feasible.
    pub fn violations(&self, scenario: &Scenario, numerologies: &[NumerologyConfig]) -> Vec<String> {
        let mut out = Vec::new();
        let (jn, kn) = (scenario.num_anchors(), scenario.num_users());
        if self.assoc.len() != jn || self.assoc.iter().any(|r| r.len() != kn) {
            out.push(String::from("association matrix has the wrong shape"));
            return out;
        }
        if self.choice.len() != jn || self.power_w.len() != jn || self.anchor_var_m2.len() != jn {
            out.push(String::from("per-anchor vectors have the wrong length"));
            return out;
        }
        for k in 0..kn {
            if self.anchors_of(k).len() < 3 {
                out.push(alloc::format!("user {k} has fewer than 3 anchors"));
            }
        }
        for (j, a) in scenario.anchors.iter().enumerate() {
            match self.choice[j] {
                None => out.push(alloc::format!("anchor {j} has no numerology")),
                Some(c) => match numerologies.get(c.numerology as usize) {
                    None => out.push(alloc::format!("anchor {j} uses unknown numerology {}", c.numerology)),
                    Some(n) => {
                        if c.offset >= n.comb {
                            out.push(alloc::format!("anchor {j} offset {} out of range", c.offset));
                        }
                        if n.active as f64 * self.power_w[j] > a.p_max_w * (1.0 + 1e-9) {
                            out.push(alloc::format!("anchor {j} exceeds its power budget"));
                        }
                    }
                },
            }
            if !(self.power_w[j] > 0.0) {
                out.push(alloc::format!("anchor {j} power must be positive"));
            }
            if self.anchor_var_m2[j] < a.min_var_m2 * (1.0 - 1e-12) {
                out.push(alloc::format!("anchor {j} location variance below its privacy floor"));
            }
        }
        out
    }
}
