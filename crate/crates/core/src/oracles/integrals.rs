//! Randomized closed-form versus quadrature suite.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::quadrature::{c_quadrature, q_quadrature};
use super::report::OracleReport;
use crate::error::Result;
use crate::numerology::numerology_params;
use crate::rng::stream;
use crate::specfun::{c_closed, q_closed, SincPair};

pub const Q_TOL: f64 = 1e-6;
pub const C_TOL: f64 = 1e-5;

/// Random parameters of case `index`: comb in {2, 4}, bandwidth 1-6 MHz,
/// front end 1.1-3 times wider, numerologies 0-3 and every fifth case with
/// coinciding subcarriers when the numerologies agree.
pub fn integral_case(seed: u64, index: u64) -> Result<SincPair> {
    let mut r = stream(seed, 0x1_0000 + index);
    let comb = if r.random::<bool>() { 2 } else { 4 };
    let bw = r.random_range(1.0e6..6.0e6);
    let be = bw * r.random_range(1.1..3.0);
    let l1 = r.random_range(0..4u32);
    let l2 = r.random_range(0..4u32);
    let (n1, n2) = (numerology_params(l1, bw, comb)?, numerology_params(l2, bw, comb)?);
    let p1 = r.random_range(0..n1.subcarriers);
    let p2 = if index.is_multiple_of(5) && l1 == l2 { p1 } else { r.random_range(0..n2.subcarriers) };
    Ok(SincPair {
        center_a: n1.frequency(p1),
        center_b: n2.frequency(p2),
        period_a: n1.symbol_s,
        period_b: n2.symbol_s,
        halfband: be / 2.0,
    })
}

/// Two reports per case, `Q` then `C`.
pub fn validate_case(seed: u64, index: u64) -> Result<[OracleReport; 2]> {
    let p = integral_case(seed, index)?;
    let q = q_closed(p.center_a, p.period_a, p.halfband)?;
    let qq = q_quadrature(p.center_a, p.period_a, p.halfband, 1e-11)?.value;
    let c = c_closed(&p)?;
    let cq = c_quadrature(&p, 1e-11)?.value;
    Ok([OracleReport::new(format!("Q#{index}"), q, qq, Q_TOL), OracleReport::new(format!("C#{index}"), c, cq, C_TOL)])
}

/// Cases `0..count` in order.
pub fn validate_integrals(seed: u64, count: u64) -> Result<Vec<OracleReport>> {
    let mut out = Vec::with_capacity(2 * count as usize);
    for i in 0..count {
        out.extend(validate_case(seed, i)?);
    }
    Ok(out)
}
