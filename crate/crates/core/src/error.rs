//! Error type shared by every module.

use alloc::string::String;

/// Everything that can go wrong inside the model or the optimizer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerology {numerology} does not fit a single comb group into {bandwidth_hz} Hz")]
    BandTooNarrow { numerology: u32, bandwidth_hz: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("pole {pole_hz} Hz sits on the band edge +/-{halfband_hz} Hz")]
    PoleOnBandEdge { pole_hz: f64, halfband_hz: f64 },
    #[error("pole {pole_hz} Hz lies inside the integration band +/-{halfband_hz} Hz")]
    PoleInsideBand { pole_hz: f64, halfband_hz: f64 },
    #[error("quadrature stopped at estimated error {achieved:e}, requested {requested:e}")]
    QuadratureNoConvergence { achieved: f64, requested: f64 },
    #[error("degenerate anchor geometry (condition number {condition:e})")]
    DegenerateGeometry { condition: f64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("anchor {0} has no numerology/comb offset selected")]
    Unassigned(usize),
    #[error("anchor {anchor} has zero received power towards user {user}")]
    DegenerateSpectrum { anchor: usize, user: usize },
    #[error("power subproblem: {0}")]
    Power(String),
    #[error("matching: {0}")]
    Matching(String),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
