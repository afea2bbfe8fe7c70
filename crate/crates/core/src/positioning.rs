//! Geometric dilution of precision and the per-user positioning error.

use alloc::vec::Vec;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest condition number of `G^T G` accepted as non-degenerate.
pub const MAX_CONDITION: f64 = 1e8;

/// Direction matrix, its pseudo-inverse and the column norms `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryFactors {
    /// Rows are unit vectors from each anchor towards the user.
    pub g_check: Vec<[f64; 3]>,
    /// Columns of `(G^T G)^-1 G^T`, one per anchor.
    pub g_pinv: Vec<[f64; 3]>,
    pub lambda: Vec<f64>,
}

/// Geometry factors of a user against a set of (broadcast) anchor positions.
pub fn geometry_factors(user: [f64; 3], anchors: &[[f64; 3]]) -> Result<GeometryFactors> {
    if anchors.len() < 3 {
        return Err(Error::DegenerateGeometry { condition: f64::INFINITY });
    }
    let mut g_check = Vec::with_capacity(anchors.len());
    for a in anchors {
        let d = [user[0] - a[0], user[1] - a[1], user[2] - a[2]];
        let n = libm::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        if n == 0.0 {
            return Err(Error::DegenerateGeometry { condition: f64::INFINITY });
        }
        g_check.push([d[0] / n, d[1] / n, d[2] / n]);
    }
    let mut gram = Matrix3::<f64>::zeros();
    for r in &g_check {
        for i in 0..3 {
            for j in 0..3 {
                gram[(i, j)] += r[i] * r[j];
            }
        }
    }
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::DegenerateGeometry { condition });
    }
    let inv = gram.try_inverse().ok_or(Error::DegenerateGeometry { condition })?;
    let mut g_pinv = Vec::with_capacity(g_check.len());
    let mut lambda = Vec::with_capacity(g_check.len());
    for r in &g_check {
        let col = inv * nalgebra::Vector3::new(r[0], r[1], r[2]);
        lambda.push(col.norm());
        g_pinv.push([col[0], col[1], col[2]]);
    }
    Ok(GeometryFactors { g_check, g_pinv, lambda })
}

/// `sqrt(sum_j lambda_j^2 var_j)` where `var_j` already includes the anchor
/// location variance.
pub fn positioning_error(lambda: &[f64], total_var: &[f64]) -> Result<f64> {
    if lambda.len() != total_var.len() {
        return Err(Error::LengthMismatch { expected: lambda.len(), got: total_var.len() });
    }
    let mut s = 0.0;
    for (l, v) in lambda.iter().zip(total_var) {
        if !(*v >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("variance {v} must be non-negative")));
        }
        s += l * l * v;
    }
    Ok(libm::sqrt(s))
}

/// The direction matrix as a dense `n x 3` matrix.
pub fn direction_matrix(f: &GeometryFactors) -> DMatrix<f64> {
    DMatrix::from_fn(f.g_check.len(), 3, |i, j| f.g_check[i][j])
}
