//! One-sided (Hestenes) Jacobi SVD, used for numerical rank and null spaces.
//!
//! Working on the columns of `B` directly keeps small singular values accurate;
//! going through `B†B` squares them and loses everything below ~1e-8.

use super::{norm, ComplexMatrix, C64};
use crate::error::{Error, Result};

pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;

/// Singular values (descending) with the right singular vectors as columns of
/// `v`, in the same order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct NullSpace {
    pub rank: usize,
    /// Orthonormal kernel basis, one vector per column (`cols x nullity`).
    pub null_basis: ComplexMatrix,
    pub singular_values: Vec<f64>,
    /// Absolute threshold a singular value had to exceed to count toward the rank.
    pub threshold: f64,
}

impl NullSpace {
    pub fn nullity(&self) -> usize {
        self.null_basis.cols()
    }
}

pub fn svd(b: &ComplexMatrix) -> Svd {
    let (m, n) = (b.rows(), b.cols());
    let mut u = b.clone();
    let mut v = ComplexMatrix::identity(n);
    if m == 0 || n == 0 {
        return Svd {
            singular_values: vec![0.0; n],
            v,
        };
    }

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::new(0.0, 0.0));
                for k in 0..m {
                    let (up, uq) = (u[(k, p)], u[(k, q)]);
                    alpha += up.norm_sqr();
                    beta += uq.norm_sqr();
                    gamma += up.conj() * uq;
                }
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let phase_conj = (gamma / g).conj();
                for mat in [&mut u, &mut v] {
                    for k in 0..mat.rows() {
                        let xp = mat[(k, p)];
                        let xq = mat[(k, q)] * phase_conj;
                        mat[(k, p)] = xp * c - xq * s;
                        mat[(k, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = (0..n).map(|j| norm(&u.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));
    Svd {
        singular_values: order.iter().map(|&j| sigma[j]).collect(),
        v: v.select_columns(&order),
    }
}

/// Numerical rank and orthonormal kernel of `b`.
///
/// A singular value counts toward the rank when it exceeds `rel_tol·σ_max`. An
/// all-zero or empty matrix has rank 0 and the identity as null basis.
pub fn rank_and_nullspace(b: &ComplexMatrix, rel_tol: f64) -> Result<NullSpace> {
    rank_and_nullspace_with_reference(b, rel_tol, 0.0)
}

/// Like [`rank_and_nullspace`], but the threshold is
/// `rel_tol·max(σ_max, reference)`.
///
/// Use this when `b` is a slice of a larger matrix whose scale should decide
/// what counts as zero: a block that vanishes exactly in theory carries only
/// roundoff, and measuring it against itself would promote that noise to rank.
pub fn rank_and_nullspace_with_reference(
    b: &ComplexMatrix,
    rel_tol: f64,
    reference: f64,
) -> Result<NullSpace> {
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "rank tolerance must lie in (0, 1), got {rel_tol}"
        )));
    }
    if !reference.is_finite() || reference < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "reference scale must be finite and non-negative, got {reference}"
        )));
    }
    let Svd { singular_values, v } = svd(b);
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let threshold = rel_tol * sigma_max.max(reference);
    let rank = if sigma_max == 0.0 {
        0
    } else {
        singular_values.iter().filter(|&&s| s > threshold).count()
    };
    let null_cols: Vec<usize> = (rank..v.cols()).collect();
    Ok(NullSpace {
        rank,
        null_basis: v.select_columns(&null_cols),
        singular_values,
        threshold,
    })
}

/// Largest principal angle between the column spans of two matrices with
/// orthonormal columns. `None` when the dimensions differ.
pub fn max_principal_angle(a: &ComplexMatrix, b: &ComplexMatrix) -> Option<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return None;
    }
    if a.cols() == 0 {
        return Some(0.0);
    }
    // sin of the largest angle is the largest singular value of (I - AA†)B.
    let residual = b - &(a * &(&a.adjoint() * b));
    let sigma = svd(&residual).singular_values[0];
    Some(sigma.min(1.0).asin())
}
