use core::f64::consts::PI;

use super::special::si_cin;
use super::SincPair;
use crate::error::{Error, Result};

/// `Q = int_{-h}^{h} f^2 sinc^2((f - center) T) df` with `sinc(x) = sin(pi x)/(pi x)`.
pub fn q_closed(center: f64, period: f64, halfband: f64) -> Result<f64> {
    check_positive(period, "period")?;
    check_positive(halfband, "halfband")?;
    let t = period;
    let q1 = (-halfband - center) * t;
    let q2 = (halfband - center) * t;
    let (si1, cin1) = si_cin(2.0 * PI * q1);
    let (si2, cin2) = si_cin(2.0 * PI * q2);
    let b0 = halfband * t - (libm::sin(2.0 * PI * q2) - libm::sin(2.0 * PI * q1)) / (4.0 * PI);
    let b1 = center * t * (cin2 - cin1);
    let ct = center * t;
    let b2 = ct * ct * (PI * (si2 - si1) - sin2_over(q2) + sin2_over(q1));
    Ok((b0 + b1 + b2) / (t * t * t * PI * PI))
}

fn sin2_over(q: f64) -> f64 {
    if q == 0.0 {
        0.0
    } else {
        let s = libm::sin(PI * q);
        s * s / q
    }
}

fn check_positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(alloc::format!("{what} must be positive, got {x}")))
    }
}

/// Partial-fraction coefficients of `f^2 / ((f-a)^2 (f-b)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartialFractions {
    /// `d0/(f-a) + d1/(f-a)^2 + d2/(f-b) + d3/(f-b)^2`.
    Distinct([f64; 4]),
    /// `a = b`: `d4/(f-a)^2 + d5/(f-a)^3 + d6/(f-a)^4`.
    Equal([f64; 3]),
}

/// Relative gap below which two poles are treated as one.
pub const EQUAL_POLE_TOL: f64 = 1e-9;

/// Coefficients for poles `a` and `b`. The distinct branch is the exact
/// solution of the 4x4 coefficient-matching system.
pub fn partial_fractions(a: f64, b: f64) -> PartialFractions {
    let scale = libm::fmax(libm::fmax(libm::fabs(a), libm::fabs(b)), 1.0);
    if libm::fabs(a - b) < EQUAL_POLE_TOL * scale {
        let m = 0.5 * (a + b);
        return PartialFractions::Equal([1.0, 2.0 * m, m * m]);
    }
    let g = a - b;
    let d0 = -2.0 * a * b / (g * g * g);
    PartialFractions::Distinct([d0, a * a / (g * g), -d0, b * b / (g * g)])
}

/// Endpoint data for finite-part integrals of `cos(alpha x + beta)/(x - c)^p`
/// over `[-h, h]`, reused across every `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleAux {
    pub center: f64,
    pub alpha: f64,
    pub halfband: f64,
    inv_lo: f64,
    inv_hi: f64,
    log_ratio: f64,
    dsi: f64,
    dcin: f64,
}

impl PoleAux {
    /// Fails only when the pole sits on a band edge.
    pub fn new(alpha: f64, center: f64, halfband: f64) -> Result<Self> {
        let lo = -halfband - center;
        let hi = halfband - center;
        let edge_tol = 1e-12 * libm::fmax(halfband, 1.0);
        if libm::fabs(lo) <= edge_tol || libm::fabs(hi) <= edge_tol {
            return Err(Error::PoleOnBandEdge { pole_hz: center, halfband_hz: halfband });
        }
        let (si_lo, cin_lo) = si_cin(alpha * lo);
        let (si_hi, cin_hi) = si_cin(alpha * hi);
        Ok(Self {
            center,
            alpha,
            halfband,
            inv_lo: 1.0 / lo,
            inv_hi: 1.0 / hi,
            log_ratio: libm::log(libm::fabs(hi / lo)),
            dsi: si_hi - si_lo,
            dcin: cin_hi - cin_lo,
        })
    }

    /// Finite-part values `[E0, E1, E2, E3, E4]` where `E0` integrates
    /// `sin(alpha x + beta)/(x-c)` and `Ep` integrates `cos(alpha x + beta)/(x-c)^p`.
    /// For a pole outside the band these are ordinary integrals.
    pub fn values(&self, beta: f64) -> [f64; 5] {
        let a = self.alpha;
        let (sp, cp) = libm::sincos(a * self.center + beta);
        let l = self.log_ratio - self.dcin;
        let e1 = cp * l - sp * self.dsi;
        let e0 = cp * self.dsi + sp * l;
        let (s_hi, c_hi) = libm::sincos(a * self.halfband + beta);
        let (s_lo, c_lo) = libm::sincos(-a * self.halfband + beta);
        let (u, v) = (self.inv_hi, self.inv_lo);
        let (u2, v2) = (u * u, v * v);
        let e2 = (-c_hi * u + c_lo * v) - a * e0;
        let e3 = 0.5 * (-c_hi * u2 + c_lo * v2) + 0.5 * a * (s_hi * u - s_lo * v) - 0.5 * a * a * e1;
        let e4 = (-c_hi * u2 * u + c_lo * v2 * v) / 3.0
            + a / 6.0 * (s_hi * u2 - s_lo * v2)
            + a * a / 6.0 * (c_hi * u - c_lo * v)
            + a * a * a / 6.0 * e0;
        [e0, e1, e2, e3, e4]
    }
}

/// Which primitive [`e_primitive`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EKind {
    /// `sin(alpha x + beta)/(x - c)`.
    Sin1,
    /// `cos(alpha x + beta)/(x - c)^p`, `p` in 1..=4.
    Cos(u8),
}

/// Ordinary integral over `[-h, h]` of the primitive selected by `kind`.
/// The pole must lie strictly outside the band.
pub fn e_primitive(kind: EKind, halfband: f64, alpha: f64, beta: f64, pole: f64) -> Result<f64> {
    check_positive(halfband, "halfband")?;
    let aux = PoleAux::new(alpha, pole, halfband)?;
    if libm::fabs(pole) < halfband {
        return Err(Error::PoleInsideBand { pole_hz: pole, halfband_hz: halfband });
    }
    let v = aux.values(beta);
    match kind {
        EKind::Sin1 => Ok(v[0]),
        EKind::Cos(p @ 1..=4) => Ok(v[p as usize]),
        EKind::Cos(p) => Err(Error::InvalidArgument(alloc::format!("order {p} not in 1..=4"))),
    }
}

/// Hadamard finite part of `int_{-h}^{h} cos(alpha x + beta)/(x - c)^p dx`.
pub fn fp_cos_power(p: u8, halfband: f64, alpha: f64, beta: f64, pole: f64) -> Result<f64> {
    if !(1..=4).contains(&p) {
        return Err(Error::InvalidArgument(alloc::format!("order {p} not in 1..=4")));
    }
    Ok(PoleAux::new(alpha, pole, halfband)?.values(beta)[p as usize])
}

/// Frequencies `alpha_k` of the five cosine terms for periods `(t1, t2)`.
pub(crate) fn term_alphas(t1: f64, t2: f64) -> [f64; 5] {
    [0.0, 2.0 * PI * t1, 2.0 * PI * t2, 2.0 * PI * (t1 - t2), 2.0 * PI * (t1 + t2)]
}

const TERM_WEIGHTS: [f64; 5] = [1.0, -1.0, -1.0, 0.5, 0.5];

/// Assemble `C` from per-term pole data. `aux_a[k]`/`aux_b[k]` hold the
/// endpoint data of pole `a`/`b` at frequency `term_alphas(t1, t2)[k]`.
pub(crate) fn c_from_aux(
    pf: &PartialFractions,
    a: f64,
    b: f64,
    t1: f64,
    t2: f64,
    aux_a: [&PoleAux; 5],
    aux_b: [&PoleAux; 5],
) -> f64 {
    let pa = 2.0 * PI * a * t1;
    let pb = 2.0 * PI * b * t2;
    let betas = [0.0, -pa, -pb, -pa + pb, -pa - pb];
    let mut sum = 0.0;
    for k in 0..5 {
        let ea = aux_a[k].values(betas[k]);
        let term = match pf {
            PartialFractions::Distinct(d) => {
                let eb = aux_b[k].values(betas[k]);
                d[0] * ea[1] + d[1] * ea[2] + d[2] * eb[1] + d[3] * eb[2]
            }
            PartialFractions::Equal(d) => d[0] * ea[2] + d[1] * ea[3] + d[2] * ea[4],
        };
        sum += TERM_WEIGHTS[k] * term;
    }
    let pi2 = PI * PI;
    sum / (4.0 * pi2 * pi2 * t1 * t1 * t2 * t2)
}

/// `C = int_{-h}^{h} f^2 sinc^2((f-a)T1) sinc^2((f-b)T2) df` in closed form.
pub fn c_closed(pair: &SincPair) -> Result<f64> {
    check_positive(pair.period_a, "period_a")?;
    check_positive(pair.period_b, "period_b")?;
    check_positive(pair.halfband, "halfband")?;
    let (a, b, t1, t2, h) = (pair.center_a, pair.center_b, pair.period_a, pair.period_b, pair.halfband);
    let alphas = term_alphas(t1, t2);
    let pf = partial_fractions(a, b);
    let mut aa = [None; 5];
    let mut ab = [None; 5];
    for k in 0..5 {
        aa[k] = Some(PoleAux::new(alphas[k], a, h)?);
        ab[k] = Some(PoleAux::new(alphas[k], b, h)?);
    }
    let ra: [&PoleAux; 5] = core::array::from_fn(|k| aa[k].as_ref().unwrap());
    let rb: [&PoleAux; 5] = core::array::from_fn(|k| ab[k].as_ref().unwrap());
    Ok(c_from_aux(&pf, a, b, t1, t2, ra, rb))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_fractions_reconstruct() {
        for &(a, b) in &[(1.0, 2.0), (-3e5, 1.2e6), (2.0, -2.0), (0.0, 5.0)] {
            let pf = partial_fractions(a, b);
            let PartialFractions::Distinct(d) = pf else { panic!() };
            for &f in &[0.37, 11.0, -7.5e5] {
                let direct = f * f / ((f - a) * (f - a) * (f - b) * (f - b));
                let t = [d[0] / (f - a), d[1] / ((f - a) * (f - a)), d[2] / (f - b), d[3] / ((f - b) * (f - b))];
                let scale: f64 = t.iter().map(|x| x.abs()).sum();
                assert!((direct - t.iter().sum::<f64>()).abs() <= 1e-12 * scale, "{a} {b} {f}");
            }
        }
    }

    #[test]
    fn partial_fractions_solve_matching_system() {
        // Coefficient matching of f^3..f^0 after clearing denominators.
        let (a, b) = (1.3, -0.4);
        let PartialFractions::Distinct(d) = partial_fractions(a, b) else { panic!() };
        let rows = [
            [1.0, 0.0, 1.0, 0.0],
            [-(a + 2.0 * b), 1.0, -(2.0 * a + b), 1.0],
            [2.0 * a * b + b * b, -2.0 * b, 2.0 * a * b + a * a, -2.0 * a],
            [-a * b * b, b * b, -a * a * b, a * a],
        ];
        let rhs = [0.0, 1.0, 0.0, 0.0];
        for (row, r) in rows.iter().zip(rhs) {
            let lhs: f64 = row.iter().zip(d).map(|(x, y)| x * y).sum();
            assert!((lhs - r).abs() < 1e-12);
        }
        assert_eq!(partial_fractions(2.0, 2.0), PartialFractions::Equal([1.0, 4.0, 4.0]));
    }

    #[test]
    fn e_primitive_rejects_interior_pole() {
        assert!(matches!(e_primitive(EKind::Cos(1), 1.0, 1.0, 0.0, 0.5), Err(Error::PoleInsideBand { .. })));
        assert!(matches!(e_primitive(EKind::Cos(1), 1.0, 1.0, 0.0, 1.0), Err(Error::PoleOnBandEdge { .. })));
    }

    #[test]
    fn e_primitive_zero_frequency_is_log() {
        let v = e_primitive(EKind::Cos(1), 1.0, 0.0, 0.0, 3.0).unwrap();
        assert!((v - libm::log(2.0 / 4.0)).abs() < 1e-14);
        let v2 = e_primitive(EKind::Cos(2), 1.0, 0.0, 0.0, 3.0).unwrap();
        assert!((v2 - (1.0 / 2.0 - 1.0 / 4.0)).abs() < 1e-14);
    }

    #[test]
    fn q_rejects_bad_arguments() {
        assert!(q_closed(0.0, 0.0, 1.0).is_err());
        assert!(q_closed(0.0, 1.0, -1.0).is_err());
    }
}
