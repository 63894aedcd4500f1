//! Fixtures shared by the benchmarks.

use darkstate_core::numerics::{ComplexMatrix, C64};
use darkstate_core::{ladder_spaces, BasisState, SimulationConfig, SystemParams};

/// Uniform-exchange system with `n` atoms and distinct couplings.
pub fn system(n: usize) -> SystemParams {
    let g = (0..n)
        .map(|j| 1.0 + 0.37 * j as f64 - 0.11 * (j * j) as f64)
        .collect();
    SystemParams::uniform(g, 0.5, 0.1, 0.3).unwrap()
}

/// Deterministic dense Hermitian matrix.
pub fn hermitian(n: usize) -> ComplexMatrix {
    let h = ComplexMatrix::from_fn(n, n, |r, c| {
        let x = ((r * 31 + c * 17) % 13) as f64 / 13.0 - 0.5;
        let y = ((r * 7 + c * 29) % 11) as f64 / 11.0 - 0.5;
        C64::new(x, y)
    });
    ComplexMatrix::from_fn(n, n, |r, c| 0.5 * (h[(r, c)] + h[(c, r)].conj()))
}

/// A short master-equation run from `|0,e g…g⟩`.
pub fn short_run(n_atoms: usize, n0: u32, t_max: f64) -> SimulationConfig {
    let params = system(n_atoms);
    let ladder = ladder_spaces(n_atoms, n0).unwrap();
    let mut psi = vec![C64::new(0.0, 0.0); ladder.dim()];
    psi[ladder.global_index(&BasisState::from_mask(0, 1)).unwrap()] = C64::new(1.0, 0.0);
    let mut cfg = SimulationConfig::new(params, n0, psi, vec![], t_max, 0.0025).unwrap();
    cfg.convergence_check = false;
    cfg
}
