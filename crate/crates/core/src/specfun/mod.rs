//! Special functions and the closed-form band-limited integrals.
//!
//! `Q` is the squared-frequency weighted `sinc^2` integral behind the
//! received-signal energy, `C` the `f^2` weighted product of two `sinc^2`
//! spectra behind the inter-anchor interference.

pub(crate) mod closed;
mod special;

pub use closed::{c_closed, e_primitive, fp_cos_power, partial_fractions, q_closed, EKind, PartialFractions, PoleAux};
pub use special::{ci, cin, si, si_cin, EULER_GAMMA};

/// Parameters of one interference integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincPair {
    /// Center of the interfering subcarrier (Hz).
    pub center_a: f64,
    /// Center of the victim subcarrier (Hz).
    pub center_b: f64,
    /// Symbol duration of the interferer (s).
    pub period_a: f64,
    /// Symbol duration of the victim (s).
    pub period_b: f64,
    /// Half of the effective bandwidth (Hz).
    pub halfband: f64,
}
