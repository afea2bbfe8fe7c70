//! Case-level comparison record.

use alloc::string::String;

/// One main-versus-oracle comparison.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleReport {
    pub case: String,
    pub value: f64,
    pub oracle: f64,
    pub rel_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(case: String, value: f64, oracle: f64, tolerance: f64) -> Self {
        let rel_error = if value == oracle { 0.0 } else { libm::fabs(value - oracle) / libm::fabs(oracle) };
        Self { case, value, oracle, rel_error, tolerance, pass: rel_error <= tolerance }
    }
}
