//! Sine integral and the entire cosine integral.

use core::f64::consts::FRAC_PI_2;
use num_complex::Complex64;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 4.0;
const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 200;

/// Sine integral `Si(x) = int_0^x sin(t)/t dt`.
pub fn si(x: f64) -> f64 {
    si_cin(x).0
}

/// Entire cosine integral `Cin(x) = int_0^x (1 - cos t)/t dt`.
///
/// Unlike `Ci`, `Cin` is finite at zero and even in `x`, which keeps the
/// closed-form integrals free of `ln 0`.
pub fn cin(x: f64) -> f64 {
    si_cin(x).1
}

/// `Ci(x)` for `x > 0`.
pub fn ci(x: f64) -> f64 {
    let t = libm::fabs(x);
    EULER_GAMMA + libm::log(t) - cin(t)
}

/// `(Si(x), Cin(x))` computed together.
pub fn si_cin(x: f64) -> (f64, f64) {
    let t = libm::fabs(x);
    if t == 0.0 {
        return (0.0, 0.0);
    }
    let (s, c) = if t <= SERIES_LIMIT { series(t) } else { continued_fraction(t) };
    (if x < 0.0 { -s } else { s }, c)
}

fn series(t: f64) -> (f64, f64) {
    // Si = sum (-1)^k t^(2k+1) / ((2k+1)(2k+1)!)
    // Cin = sum (-1)^(k+1) t^(2k) / ((2k)(2k)!)
    let t2 = t * t;
    let mut si = 0.0;
    let mut cin = 0.0;
    // term_odd = (-1)^k t^(2k+1)/(2k+1)!, term_even = (-1)^(k+1) t^(2k)/(2k)!
    let mut odd = t;
    let mut even = t2 / 2.0;
    for k in 0..MAX_TERMS {
        let n_odd = (2 * k + 1) as f64;
        let n_even = (2 * k + 2) as f64;
        let a = odd / n_odd;
        let b = even / n_even;
        si += a;
        cin += b;
        if libm::fabs(a) < EPS * libm::fabs(si) && libm::fabs(b) < EPS * libm::fabs(cin) {
            break;
        }
        odd *= -t2 / ((n_odd + 1.0) * (n_odd + 2.0));
        even *= -t2 / ((n_even + 1.0) * (n_even + 2.0));
    }
    (si, cin)
}

fn continued_fraction(t: f64) -> (f64, f64) {
    // E1(i t) by modified Lentz; E1(it) = -Ci(t) + i(Si(t) - pi/2).
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, t);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = Complex64::new(1.0, 0.0) / b;
    let mut h = d;
    for i in 2..=MAX_TERMS * 10 {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += Complex64::new(2.0, 0.0);
        d = Complex64::new(1.0, 0.0) / (d * a + b);
        c = b + Complex64::new(a, 0.0) / c;
        let del = c * d;
        h *= del;
        if libm::fabs(del.re - 1.0) + libm::fabs(del.im) < EPS {
            break;
        }
    }
    h *= Complex64::new(libm::cos(t), -libm::sin(t));
    let ci = -h.re;
    let si = FRAC_PI_2 + h.im;
    (si, EULER_GAMMA + libm::log(t) - ci)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn reference_values() {
        assert!((si(PI) - 1.851_937_052_0).abs() < 1e-9);
        assert!((cin(1.0) - 0.239_811_742_0).abs() < 1e-9);
        assert!((si(0.0)).abs() == 0.0 && cin(0.0) == 0.0);
        assert!((si(1e6) - FRAC_PI_2).abs() < 1e-5);
    }

    #[test]
    fn parity() {
        for &x in &[0.3, 2.0, 4.0, 4.1, 17.0, 1234.5] {
            assert_eq!(si(-x), -si(x));
            assert_eq!(cin(-x), cin(x));
        }
    }

    #[test]
    fn branches_agree_at_switch() {
        let (s1, c1) = series(SERIES_LIMIT);
        let (s2, c2) = continued_fraction(SERIES_LIMIT);
        assert!((s1 - s2).abs() < 2e-14, "{s1} {s2}");
        assert!((c1 - c2).abs() < 2e-14, "{c1} {c2}");
    }
}
