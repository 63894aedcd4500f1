//! Lindblad evolution with cavity loss over the ladder of subspaces `0..=n0`.
//!
//! ```text
//! dρ/dt = -i[H, ρ] + κ (a ρ a† - {a†a, ρ}/2)
//! ```
//!
//! Loss only lowers the excitation number, so the ladder below the initial
//! excitation is closed and nothing is truncated.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::LadderBasis;
use crate::model::{hamiltonian_entries, SystemParams};
use crate::numerics::{eigh, inner, norm, ComplexMatrix, Rk4, C64};

/// Stability bound on `dt · max(κ, ‖H‖_max)`.
pub const STEP_BOUND: f64 = 0.05;
pub const CONVERGENCE_TOL: f64 = 1e-6;
const NORMALIZATION_TOL: f64 = 1e-12;
const CLIP_TOL: f64 = 1e-9;

type Triplets = Vec<(usize, usize, f64)>;

/// Sparse generator of the master equation on a ladder basis.
///
/// Written with the non-Hermitian `H_eff = H - (iκ/2) a†a`:
/// `dρ/dt = -i(H_eff ρ - ρ H_eff†) + κ a ρ a†`.
#[derive(Debug, Clone)]
pub struct Lindbladian {
    dim: usize,
    h: Triplets,
    /// Annihilation operator, `(row, col, √m)`.
    a: Triplets,
    photons: Vec<f64>,
    excitations: Vec<f64>,
    kappa: f64,
}

impl Lindbladian {
    pub fn new(params: &SystemParams, ladder: &LadderBasis) -> Result<Self> {
        params.validate()?;
        if params.n_atoms() != ladder.n_atoms() {
            return Err(Error::DimensionMismatch {
                context: "atom count of parameters vs ladder",
                expected: ladder.n_atoms(),
                found: params.n_atoms(),
            });
        }
        let mut h = Vec::new();
        for (n, space) in ladder.spaces().iter().enumerate() {
            let off = ladder.offsets()[n];
            h.extend(
                hamiltonian_entries(params, space)
                    .into_iter()
                    .map(|(r, c, x)| (r + off, c + off, x)),
            );
        }
        let mut a = Vec::new();
        for (col, s) in ladder.states().enumerate() {
            if s.photons > 0 {
                let lowered = crate::hilbert::BasisState::from_mask(s.photons - 1, s.excited);
                a.push((
                    ladder.global_index(&lowered)?,
                    col,
                    f64::from(s.photons).sqrt(),
                ));
            }
        }
        Ok(Self {
            dim: ladder.dim(),
            h,
            a,
            photons: ladder.states().map(|s| f64::from(s.photons)).collect(),
            excitations: ladder.states().map(|s| f64::from(s.excitation())).collect(),
            kappa: params.kappa,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dense Hamiltonian on the ladder.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for &(r, c, x) in &self.h {
            m[(r, c)] = C64::new(x, 0.0);
        }
        m
    }

    /// `‖H‖_max` on the ladder.
    pub fn h_max(&self) -> f64 {
        self.h.iter().map(|t| t.2.abs()).fold(0.0, f64::max)
    }

    /// `⟨a†a⟩`.
    pub fn photon_number(&self, rho: &ComplexMatrix) -> f64 {
        (0..self.dim)
            .map(|i| self.photons[i] * rho[(i, i)].re)
            .sum()
    }

    /// `⟨N̂⟩`, photons plus excited atoms.
    pub fn excitation_number(&self, rho: &ComplexMatrix) -> f64 {
        (0..self.dim)
            .map(|i| self.excitations[i] * rho[(i, i)].re)
            .sum()
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = self.dim;
        let mi = C64::new(0.0, -1.0);
        let src = rho.as_slice();
        let mut out = ComplexMatrix::zeros(d, d);
        let dst = out.as_mut_slice();
        // -i H_eff ρ, row by row
        for &(r, k, x) in &self.h {
            let w = mi * x;
            for (o, v) in dst[r * d..(r + 1) * d]
                .iter_mut()
                .zip(&src[k * d..(k + 1) * d])
            {
                *o += w * v;
            }
        }
        // +i ρ H_eff†; H is real symmetric so H† entries are the same triplets
        for &(k, c, x) in &self.h {
            let w = -mi * x;
            for (o, v) in dst[c..]
                .iter_mut()
                .step_by(d)
                .zip(src[k..].iter().step_by(d))
            {
                *o += w * v;
            }
        }
        if self.kappa != 0.0 {
            // -i(-iκ/2)(m_r + m_c) ρ = -(κ/2)(m_r + m_c) ρ
            let half = 0.5 * self.kappa;
            for (r, (orow, srow)) in dst.chunks_exact_mut(d).zip(src.chunks_exact(d)).enumerate() {
                for ((o, v), m) in orow.iter_mut().zip(srow).zip(&self.photons) {
                    *o -= half * (self.photons[r] + m) * v;
                }
            }
            for &(r1, c1, x1) in &self.a {
                for &(r2, c2, x2) in &self.a {
                    dst[r1 * d + r2] += self.kappa * x1 * x2 * src[c1 * d + c2];
                }
            }
        }
        out
    }
}

/// One evaluation of the master-equation right-hand side.
pub fn liouvillian_apply(
    params: &SystemParams,
    ladder: &LadderBasis,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if rho.rows() != ladder.dim() || rho.cols() != ladder.dim() {
        return Err(Error::DimensionMismatch {
            context: "density matrix vs ladder dimension",
            expected: ladder.dim(),
            found: rho.rows().max(rho.cols()),
        });
    }
    Ok(Lindbladian::new(params, ladder)?.apply(rho))
}

/// `|ψ⟩⟨ψ|`.
pub fn pure_state(psi: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(psi.len(), psi.len(), |r, c| psi[r] * psi[c].conj())
}

fn check_normalized(psi: &[C64]) -> Result<()> {
    let n2 = norm(psi).powi(2);
    if (n2 - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { norm_sqr: n2 });
    }
    Ok(())
}

/// `⟨ψ|ρ|ψ⟩`; values in `[-1e-9, 0)` are clipped to zero.
pub fn population(rho: &ComplexMatrix, psi: &[C64]) -> Result<f64> {
    if rho.rows() != psi.len() || rho.cols() != psi.len() {
        return Err(Error::DimensionMismatch {
            context: "state vector vs density matrix",
            expected: rho.rows(),
            found: psi.len(),
        });
    }
    check_normalized(psi)?;
    let p = raw_population(rho, psi);
    Ok(if (-CLIP_TOL..0.0).contains(&p) {
        0.0
    } else {
        p
    })
}

fn raw_population(rho: &ComplexMatrix, psi: &[C64]) -> f64 {
    inner(psi, &rho.mul_vec(psi)).re
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WatchState {
    pub name: String,
    pub vector: Vec<C64>,
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    pub params: SystemParams,
    pub ladder: LadderBasis,
    pub initial: Vec<C64>,
    pub watch: Vec<WatchState>,
    pub t_max: f64,
    pub dt: f64,
    /// Rerun at `dt/2` and require the watched populations to agree to
    /// [`CONVERGENCE_TOL`].
    pub convergence_check: bool,
    /// Steps between eigenvalue checks of `ρ`; the final state is always checked.
    pub checkpoint_every: usize,
}

impl SimulationConfig {
    pub fn new(
        params: SystemParams,
        n0: u32,
        initial: Vec<C64>,
        watch: Vec<WatchState>,
        t_max: f64,
        dt: f64,
    ) -> Result<Self> {
        let ladder = crate::hilbert::ladder_spaces(params.n_atoms(), n0)?;
        let cfg = Self {
            params,
            ladder,
            initial,
            watch,
            t_max,
            dt,
            convergence_check: true,
            checkpoint_every: 10,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let dim = self.ladder.dim();
        if self.initial.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "initial state vs ladder dimension",
                expected: dim,
                found: self.initial.len(),
            });
        }
        check_normalized(&self.initial)?;
        for w in &self.watch {
            if w.vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    context: "watch state vs ladder dimension",
                    expected: dim,
                    found: w.vector.len(),
                });
            }
            check_normalized(&w.vector)
                .map_err(|e| Error::InvalidParameter(format!("watch state {:?}: {e}", w.name)))?;
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "t_max must be non-negative, got {}",
                self.t_max
            )));
        }
        let ratio = self.t_max / self.dt;
        if (ratio - ratio.round()).abs() > 1e-6 * ratio.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "t_max = {} is not a whole number of steps dt = {}",
                self.t_max, self.dt
            )));
        }
        let rate = Lindbladian::new(&self.params, &self.ladder)?
            .h_max()
            .max(self.params.kappa);
        if self.dt * rate > STEP_BOUND {
            return Err(Error::StepTooLarge {
                dt: self.dt,
                rate,
                bound: STEP_BOUND,
            });
        }
        if self.checkpoint_every == 0 {
            return Err(Error::InvalidParameter(
                "checkpoint_every must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    /// `populations[k][step]` for watch state `k`.
    pub populations: Vec<Vec<f64>>,
    /// `⟨N̂⟩` at every step.
    pub excitation: Vec<f64>,
    pub trace_drift: f64,
    /// Largest `|ρ_ij - conj(ρ_ji)|` seen.
    pub hermiticity_error: f64,
    /// Smallest eigenvalue of `ρ` over the checkpoints.
    pub min_eigenvalue: f64,
    /// Largest deviation of the watched populations under step halving.
    pub convergence_deviation: Option<f64>,
    pub final_rho: ComplexMatrix,
}

impl Trajectory {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.populations[k].as_slice())
    }

    /// CSV with header `t,<names>`, one row per step, LF line endings and
    /// shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::InvalidParameter(format!("csv output failed: {e}"));
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header).map_err(io)?;
        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(self.populations.iter().map(|p| p[i].to_string()));
            w.write_record(&row).map_err(io)?;
        }
        w.flush()
            .map_err(|e| Error::InvalidParameter(format!("csv output failed: {e}")))?;
        Ok(())
    }
}

/// Fixed-step RK4 integration from the pure initial state to `t_max`.
pub fn simulate(config: &SimulationConfig) -> Result<Trajectory> {
    config.validate()?;
    if !config.convergence_check {
        return integrate(config, config.dt);
    }
    // The two runs are independent; run them side by side.
    let (traj, fine) = std::thread::scope(|s| {
        let fine = s.spawn(|| integrate(config, config.dt / 2.0));
        let traj = integrate(config, config.dt);
        (traj, fine.join().expect("integration thread panicked"))
    });
    let (traj, fine) = (traj?, fine?);
    let deviation = traj
        .populations
        .iter()
        .zip(&fine.populations)
        .flat_map(|(coarse, fine)| {
            coarse
                .iter()
                .zip(fine.iter().step_by(2))
                .map(|(a, b)| (a - b).abs())
        })
        .fold(0.0, f64::max);
    if deviation > CONVERGENCE_TOL {
        return Err(Error::NotConverged {
            deviation,
            tolerance: CONVERGENCE_TOL,
        });
    }
    Ok(Trajectory {
        convergence_deviation: Some(deviation),
        ..traj
    })
}

fn integrate(config: &SimulationConfig, dt: f64) -> Result<Trajectory> {
    let generator = Lindbladian::new(&config.params, &config.ladder)?;
    let n_steps = (config.t_max / dt).round() as usize;
    let checkpoint_every = config.checkpoint_every * (config.dt / dt).round() as usize;
    let mut rk = Rk4::new(dt)?;
    let mut rho = pure_state(&config.initial);

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut populations = vec![Vec::with_capacity(n_steps + 1); config.watch.len()];
    let mut excitation = Vec::with_capacity(n_steps + 1);
    let (mut trace_drift, mut herm, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);

    for step in 0..=n_steps {
        times.push(step as f64 * dt);
        for (series, w) in populations.iter_mut().zip(&config.watch) {
            let p = raw_population(&rho, &w.vector);
            series.push(if (-CLIP_TOL..0.0).contains(&p) {
                0.0
            } else {
                p
            });
        }
        excitation.push(generator.excitation_number(&rho));
        trace_drift = trace_drift.max((rho.trace().re - 1.0).abs());
        herm = herm.max(rho.max_asymmetry());
        if step % checkpoint_every == 0 || step == n_steps {
            let hermitian = ComplexMatrix::from_fn(rho.rows(), rho.cols(), |r, c| {
                0.5 * (rho[(r, c)] + rho[(c, r)].conj())
            });
            min_eig = min_eig.min(eigh(&hermitian)?.eigenvalues[0]);
        }
        if step < n_steps {
            rho = rk.step(|m| generator.apply(m), &rho)?;
        }
    }

    Ok(Trajectory {
        times,
        names: config.watch.iter().map(|w| w.name.clone()).collect(),
        populations,
        excitation,
        trace_drift,
        hermiticity_error: herm,
        min_eigenvalue: min_eig,
        convergence_deviation: None,
        final_rho: rho,
    })
}
