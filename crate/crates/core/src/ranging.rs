//! Received and interference PSDs and the DLL ranging error variance.
//!
//! Two algebraically equivalent forms are provided. The `A` form follows
//! the normalized-PSD integrals term by term; the `zeta` form factors the
//! transmit powers out so the power subproblem sees
//! `sigma^2 = (noise + sum_j' p_j' cross_j') / p_j`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{BeamGains, Evaluator};
use crate::numerology::{comb_residue, CombChoice, NumerologyConfig};
use crate::state::AssignmentState;
use crate::SPEED_OF_LIGHT;

const C2: f64 = SPEED_OF_LIGHT * SPEED_OF_LIGHT;

/// Power-free coefficients of one link.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinkTerms {
    /// Thermal-noise coefficient (m^2 W).
    pub noise: f64,
    /// Interference coefficient per anchor (zero for the link's own anchor).
    pub cross: Vec<f64>,
}

impl LinkTerms {
    /// Variance (m^2) for per-subcarrier powers `power`.
    pub fn variance(&self, power: &[f64], j: usize) -> f64 {
        let i: f64 = self.cross.iter().zip(power).map(|(c, p)| c * p).sum();
        (self.noise + i) / power[j]
    }
}

/// Symbol-alignment factor `max(2^(l_int - l_vic), 1)`.
pub fn alignment(l_int: u32, l_vic: u32) -> u64 {
    if l_int > l_vic {
        1u64 << (l_int - l_vic)
    } else {
        1
    }
}

fn num<'a>(ev: &Evaluator<'a>, c: CombChoice) -> Result<&'a NumerologyConfig> {
    ev.numerologies()
        .get(c.numerology as usize)
        .ok_or_else(|| Error::InvalidArgument(alloc::format!("numerology {} not configured", c.numerology)))
}

fn symbols(n: &NumerologyConfig, slot: u64) -> core::ops::Range<u64> {
    let w = n.symbols_per_slot();
    slot * w..(slot + 1) * w
}

/// `sum_n g_n Q_n` over the PRS subcarriers of symbol `m`.
fn weighted_q(ev: &Evaluator<'_>, g: &[f64], n: &NumerologyConfig, c: CombChoice, m: u64) -> f64 {
    let q = ev.table.q_row(c.numerology as usize);
    n.positions(m, c.offset).map(|p| g[p] * q[p]).sum()
}

/// `sum_n' sum_n g'_n' g_n C_{n',n}` for interferer symbol `m2` and victim symbol `m`.
#[allow(clippy::too_many_arguments)]
fn cross_sum(
    ev: &Evaluator<'_>,
    g_vic: &[f64],
    nv: &NumerologyConfig,
    c: CombChoice,
    m: u64,
    g_int: &[f64],
    ni: &NumerologyConfig,
    c2: CombChoice,
    m2: u64,
) -> f64 {
    let rv = comb_residue(m, c.offset, nv.comb);
    let ri = comb_residue(m2, c2.offset, ni.comb);
    let block = ev.table.block(c2.numerology as usize, ri, c.numerology as usize, rv);
    let v: Vec<f64> = (0..nv.active).map(|n| g_vic[nv.comb * n + rv]).collect();
    let mut total = 0.0;
    for (row, n2) in block.chunks_exact(nv.active).zip(0..ni.active) {
        let w = g_int[ni.comb * n2 + ri];
        if w != 0.0 {
            total += w * row.iter().zip(&v).map(|(a, b)| a * b).sum::<f64>();
        }
    }
    total
}

/// Per-symbol zeta terms of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaTerms {
    pub m: u64,
    pub zeta0: f64,
    pub zeta2: f64,
    /// `(interferer, interferer symbol, 1/l_jj', zeta_cross)`.
    pub cross: Vec<(usize, u64, f64, f64)>,
}

fn zeta_terms_with(
    ev: &Evaluator<'_>,
    gains: &BeamGains,
    choices: &[Option<CombChoice>],
    j: usize,
    k: usize,
    m: u64,
) -> Result<ZetaTerms> {
    let c = choices[j].ok_or(Error::Unassigned(j))?;
    let nv = num(ev, c)?;
    let s = ev.scenario;
    let g = gains.get(c.numerology as usize, j, k);
    let t = nv.symbol_s;
    let a = s.dll.loop_factor();
    let w = weighted_q(ev, g, nv, c, m);
    let zeta0 = a * s.bandwidth_hz * s.noise_psd_w_per_hz * PI * t * t * t * w;
    let zeta2 = libm::sqrt(4.0 * s.symbol_variance * PI * PI * PI) * t * t * w;
    let mut cross = Vec::new();
    for (j2, c2) in choices.iter().enumerate() {
        if j2 == j {
            continue;
        }
        let c2 = c2.ok_or(Error::Unassigned(j2))?;
        let ni = num(ev, c2)?;
        let lj = alignment(c2.numerology, c.numerology);
        let g2 = gains.get(c2.numerology as usize, j2, k);
        for m2 in m * lj..(m + 1) * lj {
            let x = cross_sum(ev, g, nv, c, m, g2, ni, c2, m2);
            let z = a * PI * t * t * t * ni.symbol_s * s.symbol_variance * x;
            cross.push((j2, m2, 1.0 / lj as f64, z));
        }
    }
    Ok(ZetaTerms { m, zeta0, zeta2, cross })
}

/// Zeta terms of link `(j, k)` on symbol `m` under `state`.
pub fn zeta_terms(ev: &Evaluator<'_>, state: &AssignmentState, j: usize, k: usize, m: u64) -> Result<ZetaTerms> {
    let gains = ev.beam_gains(state.beam)?;
    zeta_terms_with(ev, &gains, &state.choice, j, k, m)
}

/// Noise coefficient: `c^2 / 2^l sum_m zeta0 / zeta2^2`.
pub fn noise_coeff(ev: &Evaluator<'_>, gains: &BeamGains, j: usize, k: usize, c: CombChoice, slot: u64) -> Result<f64> {
    let nv = num(ev, c)?;
    let s = ev.scenario;
    let g = gains.get(c.numerology as usize, j, k);
    let t = nv.symbol_s;
    let a = s.dll.loop_factor();
    let mut total = 0.0;
    for m in symbols(nv, slot) {
        let w = weighted_q(ev, g, nv, c, m);
        if !(w > 0.0) {
            return Err(Error::DegenerateSpectrum { anchor: j, user: k });
        }
        let z0 = a * s.bandwidth_hz * s.noise_psd_w_per_hz * PI * t * t * t * w;
        let z2 = libm::sqrt(4.0 * s.symbol_variance * PI * PI * PI) * t * t * w;
        total += z0 / (z2 * z2);
    }
    Ok(C2 * total / nv.symbols_per_slot() as f64)
}

/// Interference coefficient of anchor `j2` on `c2` into link `(j, k)` on `c`.
#[allow(clippy::too_many_arguments)]
pub fn cross_coeff(
    ev: &Evaluator<'_>,
    gains: &BeamGains,
    j: usize,
    k: usize,
    c: CombChoice,
    j2: usize,
    c2: CombChoice,
    slot: u64,
) -> Result<f64> {
    let (nv, ni) = (num(ev, c)?, num(ev, c2)?);
    let s = ev.scenario;
    let g = gains.get(c.numerology as usize, j, k);
    let g2 = gains.get(c2.numerology as usize, j2, k);
    let t = nv.symbol_s;
    let a = s.dll.loop_factor();
    let lj = alignment(c2.numerology, c.numerology);
    let mut total = 0.0;
    for m in symbols(nv, slot) {
        let w = weighted_q(ev, g, nv, c, m);
        if !(w > 0.0) {
            return Err(Error::DegenerateSpectrum { anchor: j, user: k });
        }
        let z2 = libm::sqrt(4.0 * s.symbol_variance * PI * PI * PI) * t * t * w;
        let mut inner = 0.0;
        for m2 in m * lj..(m + 1) * lj {
            inner += a * PI * t * t * t * ni.symbol_s * s.symbol_variance * cross_sum(ev, g, nv, c, m, g2, ni, c2, m2);
        }
        total += inner / lj as f64 / (z2 * z2);
    }
    Ok(C2 * total / nv.symbols_per_slot() as f64)
}

/// Ranging variance (m^2) of link `(j, k)` from the zeta terms.
pub fn ranging_variance_zeta(
    ev: &Evaluator<'_>,
    state: &AssignmentState,
    j: usize,
    k: usize,
    slot: u64,
) -> Result<f64> {
    let c = state.choice[j].ok_or(Error::Unassigned(j))?;
    let nv = num(ev, c)?;
    let gains = ev.beam_gains(state.beam)?;
    let p = &state.power_w;
    let mut total = 0.0;
    for m in symbols(nv, slot) {
        let z = zeta_terms_with(ev, &gains, &state.choice, j, k, m)?;
        if !(z.zeta2 > 0.0) {
            return Err(Error::DegenerateSpectrum { anchor: j, user: k });
        }
        let num: f64 = z.zeta0 + z.cross.iter().map(|&(j2, _, w, x)| w * p[j2] * x).sum::<f64>();
        total += num / (p[j] * z.zeta2 * z.zeta2);
    }
    Ok(C2 * total / nv.symbols_per_slot() as f64)
}

/// Ranging variance (m^2) of link `(j, k)` from the normalized-PSD terms
/// `a (A0 + A1) / (4 pi^2 C A2^2)`.
pub fn ranging_variance_a(ev: &Evaluator<'_>, state: &AssignmentState, j: usize, k: usize, slot: u64) -> Result<f64> {
    let s = ev.scenario;
    let c = state.choice[j].ok_or(Error::Unassigned(j))?;
    let nv = num(ev, c)?;
    let theta = &ev.codebook.entries[state.beam];
    let lv = c.numerology as usize;
    let h = |l: usize, jj: usize| ev.channels.gains(l, jj, k, theta);
    let g = h(lv, j);
    let q = ev.table.q_row(lv);
    let t = nv.symbol_s;
    let d = s.dll.early_late_spacing_chips;
    let sig2 = s.symbol_variance;
    let p = state.power_w[j];
    let mut total = 0.0;
    for m in symbols(nv, slot) {
        let pos: Vec<usize> = nv.positions(m, c.offset).collect();
        let mass: f64 = pos.iter().map(|&n| p * g[n]).sum();
        if !(mass > 0.0) {
            return Err(Error::DegenerateSpectrum { anchor: j, user: k });
        }
        let alpha_bar = 1.0 / mass;
        let c_norm = PI * sig2 * mass;
        let pq: f64 = pos.iter().map(|&n| p * g[n] * q[n]).sum();
        let a0 = s.bandwidth_hz * s.noise_psd_w_per_hz * alpha_bar * PI * d * d * t * t * t * pq;
        let a2 = alpha_bar * d * t * t * pq;
        let mut a1 = 0.0;
        for (j2, c2) in state.choice.iter().enumerate() {
            if j2 == j {
                continue;
            }
            let c2 = c2.ok_or(Error::Unassigned(j2))?;
            let ni = num(ev, c2)?;
            let li = c2.numerology as usize;
            let g2 = h(li, j2);
            let p2 = state.power_w[j2];
            let lj = alignment(c2.numerology, c.numerology);
            for m2 in m * lj..(m + 1) * lj {
                let mut inner = 0.0;
                for n2 in ni.positions(m2, c2.offset) {
                    let mut v = 0.0;
                    for &n in &pos {
                        v += p * g[n] * ev.table.c(li, n2, lv, n);
                    }
                    inner += p2 * g2[n2] * v;
                }
                a1 += ni.symbol_s * sig2 * alpha_bar * PI * d * d * t * t * t * inner / lj as f64;
            }
        }
        total += s.dll.loop_factor() * (a0 + a1) / (4.0 * PI * PI * c_norm * a2 * a2);
    }
    Ok(C2 * total / nv.symbols_per_slot() as f64)
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        libm::sin(PI * x) / (PI * x)
    }
}

fn psd_sum(n: &NumerologyConfig, c: CombChoice, m: u64, g: &[f64], f: f64) -> f64 {
    n.positions(m, c.offset)
        .map(|p| {
            let s = sinc((f - n.frequency(p)) * n.symbol_s);
            g[p] * s * s
        })
        .sum()
}

/// Received PSD of anchor `j` at user `k` on symbol `m`; `normalized`
/// scales it to unit area.
pub fn psd_value(
    f: f64,
    ev: &Evaluator<'_>,
    state: &AssignmentState,
    j: usize,
    k: usize,
    m: u64,
    normalized: bool,
) -> Result<f64> {
    let c = state.choice[j].ok_or(Error::Unassigned(j))?;
    let n = num(ev, c)?;
    let g = ev.channels.gains(c.numerology as usize, j, k, &ev.codebook.entries[state.beam]);
    let sig2 = ev.scenario.symbol_variance;
    let p = state.power_w[j];
    let raw = n.symbol_s * sig2 * p * psd_sum(n, c, m, &g, f);
    if !normalized {
        return Ok(raw);
    }
    let mass: f64 = sig2 * p * n.positions(m, c.offset).map(|x| g[x]).sum::<f64>();
    if !(mass > 0.0) {
        return Err(Error::DegenerateSpectrum { anchor: j, user: k });
    }
    Ok(raw / mass)
}

/// PSD at user `k` from every anchor except `j`, aligned to symbol `m` of
/// anchor `j`'s numerology.
pub fn interference_psd(
    f: f64,
    ev: &Evaluator<'_>,
    state: &AssignmentState,
    j: usize,
    k: usize,
    m: u64,
) -> Result<f64> {
    let c = state.choice[j].ok_or(Error::Unassigned(j))?;
    let theta = &ev.codebook.entries[state.beam];
    let mut total = 0.0;
    for (j2, c2) in state.choice.iter().enumerate() {
        if j2 == j {
            continue;
        }
        let c2 = c2.ok_or(Error::Unassigned(j2))?;
        let n2 = num(ev, c2)?;
        let g2 = ev.channels.gains(c2.numerology as usize, j2, k, theta);
        let lj = alignment(c2.numerology, c.numerology);
        for m2 in m * lj..(m + 1) * lj {
            total +=
                n2.symbol_s * ev.scenario.symbol_variance * state.power_w[j2] * psd_sum(n2, c2, m2, &g2, f) / lj as f64;
        }
    }
    Ok(total)
}
