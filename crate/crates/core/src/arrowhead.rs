//! Arrowhead form of a subspace Hamiltonian: the lower block is diagonalized,
//! the upper block left as is.
//!
//! With `S_l` the unitary that diagonalizes the lower block,
//!
//! ```text
//! | U    C̃ |      L̃ = S_l L S_l†  (diagonal)
//! | C̃†   L̃ |      C̃ = C S_l†
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SubspaceHamiltonian;
use crate::numerics::{eigh, ComplexMatrix, C64};

#[derive(Debug, Clone)]
pub struct ArrowheadForm {
    pub u: ComplexMatrix,
    /// Lower-block eigenvalues, ascending.
    pub l_tilde: Vec<f64>,
    /// `N_u x N_l` couplings between upper states and dressed lower states.
    pub c_tilde: ComplexMatrix,
    /// Rows are the dressed lower states (as bras) in bare-lower coordinates.
    pub s_l: ComplexMatrix,
}

impl ArrowheadForm {
    pub fn n_upper(&self) -> usize {
        self.u.rows()
    }

    pub fn n_lower(&self) -> usize {
        self.l_tilde.len()
    }

    /// Ket of dressed lower state `k` in bare-lower coordinates.
    pub fn dressed_state(&self, k: usize) -> Vec<C64> {
        self.s_l.row(k).iter().map(|z| z.conj()).collect()
    }

    /// The full transformed matrix `diag(I, S_l) H diag(I, S_l)†`.
    pub fn matrix(&self) -> ComplexMatrix {
        let (nu, nl) = (self.n_upper(), self.n_lower());
        let mut m = ComplexMatrix::zeros(nu + nl, nu + nl);
        for r in 0..nu {
            for c in 0..nu {
                m[(r, c)] = self.u[(r, c)];
            }
            for c in 0..nl {
                m[(r, nu + c)] = self.c_tilde[(r, c)];
                m[(nu + c, r)] = self.c_tilde[(r, c)].conj();
            }
        }
        for (k, &x) in self.l_tilde.iter().enumerate() {
            m[(nu + k, nu + k)] = C64::new(x, 0.0);
        }
        m
    }
}

/// Diagonalizes the lower block of `h`. Fails with [`Error::NoLowerStates`]
/// when the subspace has none (more excitations than atoms).
pub fn to_arrowhead(h: &SubspaceHamiltonian) -> Result<ArrowheadForm> {
    if h.basis.n_lower() == 0 {
        return Err(Error::NoLowerStates {
            atoms: h.basis.n_atoms(),
            excitation: h.basis.excitation(),
        });
    }
    let eig = eigh(&h.l())?;
    let q = &eig.eigenvectors;
    Ok(ArrowheadForm {
        u: h.u(),
        c_tilde: &h.c() * q,
        s_l: q.adjoint(),
        l_tilde: eig.eigenvalues,
    })
}

/// Analytic unitary that diagonalizes the single-excitation lower block when
/// all exchange strengths are equal. Row 1 is the symmetric state; row `s`
/// carries `-1/√(s(s-1))` on atoms `1..s-1` and `(s-1)/√(s(s-1))` on atom `s`.
pub fn collective_basis(n_atoms: usize) -> Result<ComplexMatrix> {
    if n_atoms == 0 {
        return Err(Error::InvalidParameter(
            "collective basis needs at least one atom".into(),
        ));
    }
    let n = n_atoms as f64;
    Ok(ComplexMatrix::from_fn(n_atoms, n_atoms, |r, c| {
        let x = if r == 0 {
            1.0 / n.sqrt()
        } else {
            let s = (r + 1) as f64;
            let norm = (s * (s - 1.0)).sqrt();
            match c.cmp(&r) {
                std::cmp::Ordering::Less => -1.0 / norm,
                std::cmp::Ordering::Equal => (s - 1.0) / norm,
                std::cmp::Ordering::Greater => 0.0,
            }
        };
        C64::new(x, 0.0)
    }))
}

/// Couplings of the cavity state to the collective single-excitation states and
/// their energies at uniform exchange `v_dd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectiveCouplings {
    /// `G_1..G_N`.
    pub g: Vec<f64>,
    /// Energy of the symmetric state.
    pub lambda0: f64,
    /// Energy shared by the other `N - 1` collective states.
    pub lambda1: f64,
}

pub fn collective_couplings(g: &[f64], delta_a: f64, v_dd: f64) -> Result<CollectiveCouplings> {
    let n_atoms = g.len();
    if n_atoms == 0 {
        return Err(Error::InvalidParameter("need at least one coupling".into()));
    }
    let n = n_atoms as f64;
    let mut out = Vec::with_capacity(n_atoms);
    out.push(g.iter().sum::<f64>() / n.sqrt());
    let mut prefix = g[0];
    for (idx, &gs) in g.iter().enumerate().skip(1) {
        let s = (idx + 1) as f64;
        out.push((-prefix + (s - 1.0) * gs) / (s * (s - 1.0)).sqrt());
        prefix += gs;
    }
    let base = -(n - 2.0) * delta_a / 2.0;
    Ok(CollectiveCouplings {
        g: out,
        lambda0: base + (n - 1.0) * v_dd,
        lambda1: base - v_dd,
    })
}
