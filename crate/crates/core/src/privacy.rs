//! Gaussian-mechanism calibration of broadcast anchor locations.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Privacy budget of one anchor and the noise it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
    pub sensitivity: f64,
    pub noise_var_m2: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64, sensitivity: f64) -> Result<Self> {
        Ok(Self { epsilon, delta, sensitivity, noise_var_m2: dp_noise_variance(epsilon, delta, sensitivity)? })
    }
}

/// Smallest noise variance giving `(epsilon, delta)`-DP for the given
/// sensitivity: `xi1^2 = -2 s^2 / eps^2 * ln(5 delta / 4)`.
pub fn dp_noise_variance(epsilon: f64, delta: f64, sensitivity: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.8) {
        return Err(Error::InvalidArgument(alloc::format!("delta must lie in (0, 4/5), got {delta}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("epsilon must be positive, got {epsilon}")));
    }
    if !(sensitivity >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("sensitivity must be non-negative, got {sensitivity}")));
    }
    Ok(-2.0 * sensitivity * sensitivity / (epsilon * epsilon) * libm::log(1.25 * delta))
}

/// `delta - 4/5 exp(-(xi1 eps)^2 / (2 s^2))`; zero when the mechanism is tight.
pub fn dp_residual(epsilon: f64, delta: f64, sensitivity: f64, noise_var_m2: f64) -> f64 {
    delta - 0.8 * libm::exp(-noise_var_m2 * epsilon * epsilon / (2.0 * sensitivity * sensitivity))
}

/// Sensor variance plus the DP noise at the loosest admissible budget.
pub fn min_anchor_variance(sensor_var_m2: f64, eps_min: f64, delta_min: f64, sensitivity: f64) -> Result<f64> {
    Ok(sensor_var_m2 + dp_noise_variance(eps_min, delta_min, sensitivity)?)
}

/// `epsilon` achieved at `delta` by a total variance `anchor_var_m2`.
pub fn epsilon_for_variance(anchor_var_m2: f64, sensor_var_m2: f64, delta: f64, sensitivity: f64) -> f64 {
    let xi1 = anchor_var_m2 - sensor_var_m2;
    if xi1 <= 0.0 {
        return f64::INFINITY;
    }
    libm::sqrt(-2.0 * sensitivity * sensitivity * libm::log(1.25 * delta) / xi1)
}

/// Add i.i.d. `N(0, var)` noise to each coordinate.
pub fn perturb_location<R: Rng + ?Sized>(position: [f64; 3], var: f64, rng: &mut R) -> Result<[f64; 3]> {
    if !(var >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("variance must be non-negative, got {var}")));
    }
    if var == 0.0 {
        return Ok(position);
    }
    let n = Normal::new(0.0, libm::sqrt(var)).map_err(|e| Error::InvalidArgument(alloc::format!("{e}")))?;
    Ok([position[0] + n.sample(rng), position[1] + n.sample(rng), position[2] + n.sample(rng)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let v = dp_noise_variance(1.0, 0.05, 1.0).unwrap();
        assert!((v - 5.545_177_444_479_562).abs() < 1e-12);
        let v2 = dp_noise_variance(2.0, 0.05, 1.0).unwrap();
        assert!((v2 - v / 4.0).abs() < 1e-12);
        assert!(dp_noise_variance(1.0, 0.8, 1.0).is_err());
        assert!(dp_noise_variance(1.0, 0.799_999_999, 1.0).unwrap() < 1e-8);
        assert_eq!(min_anchor_variance(0.2, 1.0, 0.3, 0.0).unwrap(), 0.2);
    }

    #[test]
    fn round_trip_is_tight() {
        for &(e, d, s) in &[(1.0, 0.05, 1.0), (0.3, 0.5, 2.5), (4.0, 1e-6, 0.1)] {
            let v = dp_noise_variance(e, d, s).unwrap();
            assert!(dp_residual(e, d, s, v).abs() < 1e-12);
            assert!((epsilon_for_variance(v, 0.0, d, s) - e).abs() < 1e-9 * e);
        }
    }
}
