//! Pathloss, small-scale fading, IRS steering vectors and the composite
//! per-subcarrier channel.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numerology::NumerologyConfig;
use crate::scenario::{IrsPanel, LosMode, Scenario};

/// LoS probability at horizontal distance `d2d_m` (breakpoints belong to
/// the nearer branch).
pub fn los_probability(d2d_m: f64, mode: LosMode) -> Result<f64> {
    if !(d2d_m >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("distance {d2d_m} must be non-negative")));
    }
    let p = match mode {
        LosMode::Mixed => {
            if d2d_m <= 1.2 {
                1.0
            } else if d2d_m <= 6.5 {
                libm::exp(-(d2d_m - 1.2) / 4.7)
            } else {
                libm::exp(-(d2d_m - 6.5) / 32.6) * 0.32
            }
        }
        LosMode::Open => {
            if d2d_m <= 5.0 {
                1.0
            } else if d2d_m <= 49.0 {
                libm::exp(-(d2d_m - 5.0) / 70.8)
            } else {
                libm::exp(-(d2d_m - 49.0) / 211.7) * 0.54
            }
        }
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Indoor-hotspot pathloss in dB; the carrier is given in Hz and enters
/// the formula in GHz.
pub fn pathloss_db(d3d_m: f64, carrier_hz: f64, los: bool) -> Result<f64> {
    if !(d3d_m > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("3D distance {d3d_m} must be positive")));
    }
    let fc = carrier_hz / 1e9;
    let pl_los = 32.4 + 17.3 * libm::log10(d3d_m) + 20.0 * libm::log10(fc);
    if los {
        Ok(pl_los)
    } else {
        Ok(libm::fmax(pl_los, 17.3 + 38.3 * libm::log10(d3d_m) + 24.9 * libm::log10(fc)))
    }
}

fn distances(a: [f64; 3], b: [f64; 3]) -> (f64, f64) {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    let d2 = libm::sqrt(dx * dx + dy * dy);
    (d2, libm::sqrt(d2 * d2 + dz * dz))
}

/// Linear gain `10^(-PL/10)` with LoS and NLoS pathloss blended in dB.
pub fn expected_pathloss_gain(tx: [f64; 3], rx: [f64; 3], carrier_hz: f64, mode: LosMode) -> Result<f64> {
    let (d2, d3) = distances(tx, rx);
    let p = los_probability(d2, mode)?;
    let pl = p * pathloss_db(d3, carrier_hz, true)? + (1.0 - p) * pathloss_db(d3, carrier_hz, false)?;
    Ok(libm::pow(10.0, -pl / 10.0))
}

/// Linear LoS gain between two points.
pub fn los_pathloss_gain(tx: [f64; 3], rx: [f64; 3], carrier_hz: f64) -> Result<f64> {
    let (_, d3) = distances(tx, rx);
    Ok(libm::pow(10.0, -pathloss_db(d3, carrier_hz, true)? / 10.0))
}

/// Half-wavelength UPA response, element `(h, v)` at index `h * V + v`.
pub fn steering_vector(azimuth: f64, elevation: f64, panel: &IrsPanel) -> Vec<Complex64> {
    let sh = libm::sin(azimuth) * libm::cos(elevation);
    let sv = libm::sin(elevation);
    let mut out = Vec::with_capacity(panel.elements());
    for h in 0..panel.elements_h {
        for v in 0..panel.elements_v {
            out.push(Complex64::cis(PI * (h as f64 * sh + v as f64 * sv)));
        }
    }
    out
}

/// Steering vector of the panel towards `node`.
pub fn steering_towards(panel: &IrsPanel, node: [f64; 3]) -> Vec<Complex64> {
    let d = [node[0] - panel.position_m[0], node[1] - panel.position_m[1], node[2] - panel.position_m[2]];
    let az = libm::atan2(d[1], d[0]);
    let el = libm::atan2(d[2], libm::sqrt(d[0] * d[0] + d[1] * d[1]));
    steering_vector(az, el, panel)
}

/// Candidate IRS phase profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    pub entries: Vec<Vec<Complex64>>,
}

impl Codebook {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Kronecker products of (optionally oversampled) DFT columns. Codeword
/// `c` pairs horizontal column `c / (V o)` with vertical column `c % (V o)`.
pub fn kronecker_codebook(panel: &IrsPanel) -> Codebook {
    let o = panel.oversampling.max(1);
    let (nh, nv) = (panel.elements_h, panel.elements_v);
    let (ch, cv) = (nh * o, nv * o);
    let count = panel.codebook_size.min(ch * cv);
    let entries = (0..count)
        .map(|c| {
            let (a, b) = (c / cv, c % cv);
            let mut w = Vec::with_capacity(nh * nv);
            for h in 0..nh {
                for v in 0..nv {
                    let ph = TAU * ((a * h) as f64 / ch as f64 + (b * v) as f64 / cv as f64);
                    w.push(Complex64::cis(ph));
                }
            }
            w
        })
        .collect();
    Codebook { entries }
}

/// `h_direct + sum_m g_user[m] theta[m] conj(g_anchor[m])`.
pub fn composite_channel(
    direct: Complex64,
    g_user: &[Complex64],
    theta: &[Complex64],
    g_anchor: &[Complex64],
) -> Result<Complex64> {
    if g_user.len() != theta.len() {
        return Err(Error::LengthMismatch { expected: theta.len(), got: g_user.len() });
    }
    if g_anchor.len() != theta.len() {
        return Err(Error::LengthMismatch { expected: theta.len(), got: g_anchor.len() });
    }
    Ok(direct + irs_term(g_user, theta, g_anchor))
}

fn irs_term(g_user: &[Complex64], theta: &[Complex64], g_anchor: &[Complex64]) -> Complex64 {
    g_user.iter().zip(theta).zip(g_anchor).map(|((u, t), a)| u * t * a.conj()).sum()
}

/// Fading and IRS vectors for one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `direct[l][j * K + k][pos]` on the grid of numerology `l`.
    pub direct: Vec<Vec<Vec<Complex64>>>,
    /// IRS-to-anchor vectors, scaled by the LoS amplitude.
    pub irs_anchor: Vec<Vec<Complex64>>,
    /// IRS-to-user vectors, scaled by the LoS amplitude.
    pub irs_user: Vec<Vec<Complex64>>,
    /// Blended pathloss gain per `j * K + k`.
    pub beta: Vec<f64>,
    pub users: usize,
}

impl ChannelRealization {
    pub fn direct(&self, l: usize, j: usize, k: usize) -> &[Complex64] {
        &self.direct[l][j * self.users + k]
    }

    /// IRS contribution between anchor `j` and user `k` for profile `theta`.
    pub fn reflected(&self, j: usize, k: usize, theta: &[Complex64]) -> Complex64 {
        irs_term(&self.irs_user[k], theta, &self.irs_anchor[j])
    }

    /// `|h|^2` per grid position of numerology `l`.
    pub fn gains(&self, l: usize, j: usize, k: usize, theta: &[Complex64]) -> Vec<f64> {
        let r = self.reflected(j, k, theta);
        self.direct(l, j, k).iter().map(|h| (h + r).norm_sqr()).collect()
    }
}

/// Standard circularly symmetric complex normal draw.
pub fn cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
}

/// Per-link pathloss gains, `j * K + k`.
pub fn link_gains(scenario: &Scenario) -> Result<Vec<f64>> {
    let mut beta = Vec::with_capacity(scenario.num_anchors() * scenario.num_users());
    for a in &scenario.anchors {
        for u in &scenario.users {
            beta.push(expected_pathloss_gain(a.position_m, u.position_m, scenario.carrier_hz, scenario.los_mode)?);
        }
    }
    Ok(beta)
}

/// Draw `u ~ CN(0,1)` per (numerology, anchor, user, subcarrier) scaled by
/// the link amplitude, plus the deterministic IRS vectors.
pub fn draw_channels<R: Rng + ?Sized>(
    scenario: &Scenario,
    numerologies: &[NumerologyConfig],
    rng: &mut R,
) -> Result<ChannelRealization> {
    let beta = link_gains(scenario)?;
    let direct = numerologies
        .iter()
        .map(|num| {
            beta.iter()
                .map(|b| {
                    let s = libm::sqrt(*b);
                    (0..num.subcarriers).map(|_| cn01(rng) * s).collect()
                })
                .collect()
        })
        .collect();
    let panel = &scenario.irs;
    let node = |p: [f64; 3]| -> Result<Vec<Complex64>> {
        let amp = libm::sqrt(los_pathloss_gain(panel.position_m, p, scenario.carrier_hz)?);
        Ok(steering_towards(panel, p).into_iter().map(|x| x * amp).collect())
    };
    let irs_anchor = scenario.anchors.iter().map(|a| node(a.position_m)).collect::<Result<_>>()?;
    let irs_user = scenario.users.iter().map(|u| node(u.position_m)).collect::<Result<_>>()?;
    Ok(ChannelRealization { direct, irs_anchor, irs_user, beta, users: scenario.num_users() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(h: usize, v: usize) -> IrsPanel {
        IrsPanel { position_m: [0.0; 3], elements_h: h, elements_v: v, codebook_size: h * v, oversampling: 1 }
    }

    #[test]
    fn los_probability_values() {
        assert_eq!(los_probability(1.0, LosMode::Mixed).unwrap(), 1.0);
        assert!((los_probability(6.5, LosMode::Mixed).unwrap() - libm::exp(-5.3 / 4.7)).abs() < 1e-15);
        assert!((los_probability(49.0, LosMode::Open).unwrap() - 0.537_1).abs() < 1e-4);
        assert!(los_probability(-1.0, LosMode::Open).is_err());
    }

    #[test]
    fn pathloss_values() {
        assert!((pathloss_db(10.0, 3.5e9, true).unwrap() - 60.581).abs() < 1e-3);
        assert!((pathloss_db(1.0, 3.5e9, true).unwrap() - 43.281).abs() < 1e-3);
        assert!(pathloss_db(0.0, 3.5e9, true).is_err());
    }

    #[test]
    fn codebook_is_orthogonal() {
        let cb = kronecker_codebook(&panel(5, 5));
        assert_eq!(cb.len(), 25);
        assert!(cb.entries[0].iter().all(|x| (x - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        for a in 0..25 {
            for b in 0..25 {
                let ip: Complex64 = cb.entries[a].iter().zip(&cb.entries[b]).map(|(x, y)| x * y.conj()).sum();
                let e = if a == b { 25.0 } else { 0.0 };
                assert!((ip - e).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn steering_phase_law() {
        let s = steering_vector(PI / 2.0, 0.0, &panel(5, 5));
        for h in 0..5 {
            let z = s[h * 5];
            assert!((z - Complex64::cis(PI * h as f64)).norm() < 1e-12);
        }
        assert!(steering_vector(0.0, 0.0, &panel(5, 5)).iter().all(|x| (x.re - 1.0).abs() < 1e-15));
    }

    #[test]
    fn composite_single_element() {
        let e1 = [Complex64::new(0.3, -0.2)];
        let ga = [Complex64::new(0.1, 0.4)];
        let h = composite_channel(Complex64::new(1.0, 1.0), &e1, &[Complex64::new(1.0, 0.0)], &ga).unwrap();
        assert!((h - (Complex64::new(1.0, 1.0) + e1[0] * ga[0].conj())).norm() < 1e-15);
        assert!(composite_channel(Complex64::new(0.0, 0.0), &e1, &[], &ga).is_err());
    }
}
