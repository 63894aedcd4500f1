//! Dense complex linear algebra: Hermitian eigensolver, SVD-based rank and null
//! space, and a fixed-step RK4 integrator.

mod eigh;
mod matrix;
mod rk4;
mod svd;

pub use num_complex::Complex64 as C64;

pub use eigh::{eigh, EigDecomposition, HERMITIAN_TOL};
pub use matrix::{fix_phase, inner, norm, ComplexMatrix};
pub use rk4::{rk4_step, Rk4};
pub use svd::{
    max_principal_angle, rank_and_nullspace, rank_and_nullspace_with_reference, svd, NullSpace,
    Svd, DEFAULT_RANK_TOL,
};

/// Projector `Σ_k v_k v_k†` onto the span of the given orthonormal columns.
pub fn projector(columns: &ComplexMatrix) -> ComplexMatrix {
    columns * &columns.adjoint()
}
