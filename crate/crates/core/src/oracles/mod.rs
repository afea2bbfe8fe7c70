//! Independent reference computations used to certify the main code paths.

pub mod exhaustive;
pub mod finite_diff;
pub mod grid;
pub mod integrals;
pub mod pinv;
pub mod quadrature;
pub mod report;

pub use report::OracleReport;
