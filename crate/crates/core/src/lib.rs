//! Dark states of a single cavity mode coupled to dipole-interacting two-level
//! atoms.
//!
//! The pipeline: enumerate an excitation subspace ([`hilbert`]), build its
//! Hamiltonian ([`model`]), bring it to arrowhead form ([`arrowhead`]), read off
//! the dark states ([`darkstate`]), and check them under cavity loss
//! ([`dynamics`]). [`geometry`] turns atom positions into couplings.

pub mod arrowhead;
pub mod darkstate;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod model;
pub mod numerics;

pub use arrowhead::{
    collective_basis, collective_couplings, to_arrowhead, ArrowheadForm, CollectiveCouplings,
};
pub use darkstate::{
    analyze, compare, detect, oracle, orthogonalize, Agreement, DarkStateReport, DegenerateCluster,
    ReportDocument,
};
pub use dynamics::{
    liouvillian_apply, population, simulate, Lindbladian, SimulationConfig, Trajectory, WatchState,
};
pub use error::{Error, Result};
pub use geometry::{
    cardano_discriminant, cavity_coupling, dipole_matrix, params_from_geometry, AtomGeometry,
    DiscriminantResult, ModeConvention,
};
pub use hilbert::{enumerate_subspace, ladder_spaces, BasisState, LadderBasis, SubspaceBasis};
pub use model::{build_hamiltonian, excitation_operator_check, SubspaceHamiltonian, SystemParams};
pub use numerics::{eigh, rank_and_nullspace, rk4_step, ComplexMatrix, EigDecomposition, C64};
