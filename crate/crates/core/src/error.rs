use thiserror::Error;

/// Errors raised by the numerical kernels and the physics layers built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A^dagger| = {max_asymmetry:e}")]
    NotHermitian { max_asymmetry: f64 },

    #[error("dimension mismatch: {context} (expected {expected}, found {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value encountered at integration step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error("basis state {0} is not in this subspace")]
    StateNotFound(String),

    #[error("the {excitation}-excitation subspace of {atoms} atoms has no lower states")]
    NoLowerStates { atoms: usize, excitation: u32 },

    #[error("state vector is not normalized: |psi|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("time step {dt} violates the stability bound dt * {rate} <= {bound}")]
    StepTooLarge { dt: f64, rate: f64, bound: f64 },

    #[error("integration did not converge under step halving: max deviation {deviation:e} > {tolerance:e}")]
    NotConverged { deviation: f64, tolerance: f64 },

    #[error("atoms {first} and {second} are coincident (distance {distance:e})")]
    CoincidentAtoms {
        first: usize,
        second: usize,
        distance: f64,
    },

    #[error("mode width undefined for atom {atom}: 1 + z/z_R = {value} <= 0")]
    ModeWidthUndefined { atom: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
