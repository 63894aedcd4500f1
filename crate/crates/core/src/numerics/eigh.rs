//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use super::{fix_phase, inner, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Largest tolerated `|a_ij - conj(a_ji)|`, relative to `max(1, ‖A‖_max)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching unitary eigenvector matrix
/// (one eigenvector per column).
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `Q Λ Q†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let q = &self.eigenvectors;
        let lambda = ComplexMatrix::diagonal(&self.eigenvalues);
        &(q * &lambda) * &q.adjoint()
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending. Each eigenvector has its first entry of
/// magnitude above 1e-10 made real and positive, and eigenvectors sharing an
/// eigenvalue are re-orthonormalized after the sweeps.
pub fn eigh(a: &ComplexMatrix) -> Result<EigDecomposition> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "eigh requires a square matrix",
            expected: a.rows(),
            found: a.cols(),
        });
    }
    let asym = a.max_asymmetry();
    if asym > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian {
            max_asymmetry: asym,
        });
    }
    let n = a.rows();
    if n == 0 {
        return Ok(EigDecomposition {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }

    // Work on the exactly Hermitian part.
    let mut m = ComplexMatrix::from_fn(n, n, |r, c| 0.5 * (a[(r, c)] + a[(c, r)].conj()));
    for i in 0..n {
        m[(i, i)] = C64::new(m[(i, i)].re, 0.0);
    }
    let mut q = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| m[(r, c)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n - 1 {
            for r in p + 1..n {
                rotate(&mut m, &mut q, p, r);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.total_cmp(&m[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors: Vec<Vec<C64>> = order.iter().map(|&i| q.column(i)).collect();

    // Explicit re-orthonormalization inside numerically degenerate groups.
    let degeneracy_tol = 1e-10 * a.max_abs().max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eigenvalues[end] - eigenvalues[end - 1] <= degeneracy_tol {
            end += 1;
        }
        if end - start > 1 {
            for k in start..end {
                for _pass in 0..2 {
                    for j in start..k {
                        let proj = inner(&vectors[j], &vectors[k]);
                        let (head, tail) = vectors.split_at_mut(k);
                        for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                            *x -= proj * y;
                        }
                    }
                }
                let nrm = super::norm(&vectors[k]);
                vectors[k].iter_mut().for_each(|z| *z /= nrm);
            }
        }
        start = end;
    }

    for v in &mut vectors {
        fix_phase(v, 1e-10);
    }

    Ok(EigDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_columns(n, &vectors),
    })
}

/// One Jacobi rotation annihilating `m[(p, r)]`, accumulated into `q`.
///
/// The unitary is `U = D·J`, where `D` rotates the phase of index `r` so that the
/// pivot becomes real and `J` is the real plane rotation with `J_pr = s`,
/// `J_rp = -s`.
fn rotate(m: &mut ComplexMatrix, q: &mut ComplexMatrix, p: usize, r: usize) {
    let apr = m[(p, r)];
    let mag = apr.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let app = m[(p, p)].re;
    let arr = m[(r, r)].re;
    let tau = (arr - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let phase = apr / mag; // e^{i phi}
    let phase_conj = phase.conj();
    let n = m.rows();

    // Columns: M <- M U
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkr = m[(k, r)];
        m[(k, p)] = mkp * c - mkr * phase_conj * s;
        m[(k, r)] = mkp * s + mkr * phase_conj * c;
        let qkp = q[(k, p)];
        let qkr = q[(k, r)];
        q[(k, p)] = qkp * c - qkr * phase_conj * s;
        q[(k, r)] = qkp * s + qkr * phase_conj * c;
    }
    // Rows: M <- U† M
    for k in 0..n {
        let mpk = m[(p, k)];
        let mrk = m[(r, k)];
        m[(p, k)] = mpk * c - mrk * phase * s;
        m[(r, k)] = mpk * s + mrk * phase * c;
    }
    m[(p, r)] = C64::new(0.0, 0.0);
    m[(r, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(r, r)] = C64::new(m[(r, r)].re, 0.0);
}
