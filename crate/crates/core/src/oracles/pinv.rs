//! Geometry factors through an SVD pseudo-inverse.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Column norms of `pinv(G)` where the rows of `G` point from each anchor
/// to the user.
pub fn pinv_lambda(user: [f64; 3], anchors: &[[f64; 3]]) -> Result<Vec<f64>> {
    let g = DMatrix::from_fn(anchors.len(), 3, |i, c| {
        let d: Vec<f64> = (0..3).map(|x| user[x] - anchors[i][x]).collect();
        let n = libm::sqrt(d.iter().map(|v| v * v).sum::<f64>());
        d[c] / n
    });
    let p =
        g.pseudo_inverse(1e-12).map_err(|e| Error::InvalidArgument(alloc::format!("pseudo-inverse failed: {e}")))?;
    Ok((0..anchors.len()).map(|j| p.column(j).norm()).collect())
}
