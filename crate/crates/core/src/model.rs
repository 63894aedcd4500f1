//! Rotating-frame Tavis-Cummings Hamiltonian with dipole-dipole exchange,
//! restricted to one excitation subspace.
//!
//! Matrix elements are computed directly from pairs of basis states; no spin or
//! ladder operators are ever formed.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{BasisState, SubspaceBasis, MAX_ATOMS};
use crate::numerics::{ComplexMatrix, C64};

/// Physical parameters, all rates in units of a reference coupling.
///
/// `v` is the symmetric, zero-diagonal exchange matrix `V_jj'`. When the bare
/// frequencies `omega_a`, `omega_c` are present, `delta_a = omega_a - omega_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct SystemParams {
    pub g: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub delta_a: f64,
    pub kappa: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    g: Vec<f64>,
    v: Vec<Vec<f64>>,
    #[serde(default)]
    delta_a: Option<f64>,
    #[serde(default)]
    kappa: f64,
    #[serde(default)]
    omega_a: Option<f64>,
    #[serde(default)]
    omega_c: Option<f64>,
}

impl TryFrom<RawParams> for SystemParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        let derived = match (raw.omega_a, raw.omega_c) {
            (Some(a), Some(c)) => Some(a - c),
            (None, None) => None,
            _ => {
                return Err(Error::InvalidParameter(
                    "omega_a and omega_c must be given together".into(),
                ))
            }
        };
        let delta_a = match (raw.delta_a, derived) {
            (Some(d), _) => d,
            (None, Some(d)) => d,
            (None, None) => 0.0,
        };
        let p = SystemParams {
            g: raw.g,
            v: raw.v,
            delta_a,
            kappa: raw.kappa,
            omega_a: raw.omega_a,
            omega_c: raw.omega_c,
        };
        p.validate()?;
        Ok(p)
    }
}

impl SystemParams {
    pub fn new(g: Vec<f64>, v: Vec<Vec<f64>>, delta_a: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            g,
            v,
            delta_a,
            kappa,
            omega_a: None,
            omega_c: None,
        };
        p.validate()?;
        Ok(p)
    }

    /// Every pair of atoms exchanges with the same strength `v_dd`.
    pub fn uniform(g: Vec<f64>, v_dd: f64, delta_a: f64, kappa: f64) -> Result<Self> {
        let n = g.len();
        let v = (0..n)
            .map(|j| (0..n).map(|k| if j == k { 0.0 } else { v_dd }).collect())
            .collect();
        Self::new(g, v, delta_a, kappa)
    }

    pub fn from_frequencies(
        g: Vec<f64>,
        v: Vec<Vec<f64>>,
        omega_a: f64,
        omega_c: f64,
        kappa: f64,
    ) -> Result<Self> {
        let p = Self {
            g,
            v,
            delta_a: omega_a - omega_c,
            kappa,
            omega_a: Some(omega_a),
            omega_c: Some(omega_c),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn n_atoms(&self) -> usize {
        self.g.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.g.len();
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if n == 0 || n > MAX_ATOMS {
            return bad(format!("atom count must be in 1..={MAX_ATOMS}, got {n}"));
        }
        if self.g.iter().any(|x| !x.is_finite()) {
            return bad("couplings g must be finite".into());
        }
        if self.v.len() != n || self.v.iter().any(|row| row.len() != n) {
            return bad(format!("V must be {n}x{n}"));
        }
        for j in 0..n {
            if self.v[j][j] != 0.0 {
                return bad(format!("V[{j}][{j}] must be zero, got {}", self.v[j][j]));
            }
            for k in 0..n {
                if !self.v[j][k].is_finite() {
                    return bad("V entries must be finite".into());
                }
                if self.v[j][k] != self.v[k][j] {
                    return bad(format!(
                        "V must be symmetric: V[{j}][{k}] = {} but V[{k}][{j}] = {}",
                        self.v[j][k], self.v[k][j]
                    ));
                }
            }
        }
        if !self.delta_a.is_finite() {
            return bad("delta_a must be finite".into());
        }
        if !(self.kappa >= 0.0 && self.kappa.is_finite()) {
            return bad(format!("kappa must be finite and >= 0, got {}", self.kappa));
        }
        if let (Some(a), Some(c)) = (self.omega_a, self.omega_c) {
            let scale = a.abs().max(c.abs()).max(1.0);
            if (a - c - self.delta_a).abs() > 1e-12 * scale {
                return bad(format!(
                    "delta_a = {} disagrees with omega_a - omega_c = {}",
                    self.delta_a,
                    a - c
                ));
            }
        } else if self.omega_a.is_some() || self.omega_c.is_some() {
            return bad("omega_a and omega_c must be given together".into());
        }
        Ok(())
    }

    /// The common off-diagonal value of `V` if all pairs share it.
    pub fn uniform_v(&self) -> Option<f64> {
        let n = self.n_atoms();
        if n < 2 {
            return Some(0.0);
        }
        let first = self.v[0][1];
        let all_equal = (0..n).all(|j| (0..n).all(|k| j == k || self.v[j][k] == first));
        all_equal.then_some(first)
    }

    /// Largest rate in the problem, `max(|g_j|, |V_jk|, |Δ_a|)`.
    pub fn max_rate(&self) -> f64 {
        let g = self.g.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let v = self.v.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max);
        g.max(v).max(self.delta_a.abs())
    }
}

/// `H` on one excitation subspace, with the upper/lower block layout
///
/// ```text
/// H = | U   C |
///     | C†  L |
/// ```
#[derive(Debug, Clone)]
pub struct SubspaceHamiltonian {
    pub basis: SubspaceBasis,
    pub h: ComplexMatrix,
}

impl SubspaceHamiltonian {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn upper_range(&self) -> Range<usize> {
        self.basis.upper_range()
    }

    pub fn lower_range(&self) -> Range<usize> {
        self.basis.lower_range()
    }

    pub fn u(&self) -> ComplexMatrix {
        self.h.block(self.upper_range(), self.upper_range())
    }

    pub fn c(&self) -> ComplexMatrix {
        self.h.block(self.upper_range(), self.lower_range())
    }

    pub fn l(&self) -> ComplexMatrix {
        self.h.block(self.lower_range(), self.lower_range())
    }
}

/// Nonzero matrix elements `(row, col, value)` of the rotating-frame Hamiltonian
/// on `basis`. Elements leading outside a hand-built basis are dropped.
pub fn hamiltonian_entries(
    params: &SystemParams,
    basis: &SubspaceBasis,
) -> Vec<(usize, usize, f64)> {
    let n_atoms = params.n_atoms();
    let mut out = Vec::new();
    for (i, s) in basis.states().iter().enumerate() {
        let k = s.num_excited() as f64;
        let diag = params.delta_a * (2.0 * k - n_atoms as f64) / 2.0;
        if diag != 0.0 {
            out.push((i, i, diag));
        }
        for j in 0..n_atoms {
            let bit = 1u16 << j;
            if s.is_excited(j) {
                // hop the excitation from j to any ground atom j'
                for jp in (0..n_atoms).filter(|&jp| !s.is_excited(jp)) {
                    let v = params.v[j][jp];
                    if v == 0.0 {
                        continue;
                    }
                    let target = BasisState::from_mask(s.photons, (s.excited & !bit) | (1 << jp));
                    if let Ok(t) = basis.index_of(&target) {
                        out.push((i, t, v));
                    }
                }
                // emission into the cavity: |m, e_j> -> |m+1, g_j>
                let target = BasisState::from_mask(s.photons + 1, s.excited & !bit);
                push_coupling(
                    &mut out,
                    basis,
                    i,
                    target,
                    params.g[j] * f64::from(s.photons + 1).sqrt(),
                );
            } else if s.photons > 0 {
                // absorption: |m, g_j> -> |m-1, e_j>
                let target = BasisState::from_mask(s.photons - 1, s.excited | bit);
                push_coupling(
                    &mut out,
                    basis,
                    i,
                    target,
                    params.g[j] * f64::from(s.photons).sqrt(),
                );
            }
        }
    }
    out
}

fn push_coupling(
    out: &mut Vec<(usize, usize, f64)>,
    basis: &SubspaceBasis,
    i: usize,
    target: BasisState,
    value: f64,
) {
    if value == 0.0 {
        return;
    }
    if let Ok(t) = basis.index_of(&target) {
        out.push((i, t, value));
    }
}

fn check_atoms(params: &SystemParams, basis: &SubspaceBasis) -> Result<()> {
    if params.n_atoms() != basis.n_atoms() {
        return Err(Error::DimensionMismatch {
            context: "atom count of parameters vs basis",
            expected: basis.n_atoms(),
            found: params.n_atoms(),
        });
    }
    Ok(())
}

/// Rotating-frame Hamiltonian on `basis`: diagonal `Δ_a(2k - N)/2` for `k`
/// excited atoms, `V_jj'` between configurations that differ by one hop at
/// fixed photon number, and `g_j √m` between `|m, g_j⟩` and `|m-1, e_j⟩`.
pub fn build_hamiltonian(
    params: &SystemParams,
    basis: &SubspaceBasis,
) -> Result<SubspaceHamiltonian> {
    check_atoms(params, basis)?;
    params.validate()?;
    let dim = basis.len();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for (r, c, x) in hamiltonian_entries(params, basis) {
        h[(r, c)] = C64::new(x, 0.0);
    }
    Ok(SubspaceHamiltonian {
        basis: basis.clone(),
        h,
    })
}

/// Lab-frame Hamiltonian `ω_c a†a + ω_a Σσᶻ/2 + interactions` on `basis`.
/// Requires `omega_a` and `omega_c`.
pub fn build_lab_hamiltonian(
    params: &SystemParams,
    basis: &SubspaceBasis,
) -> Result<SubspaceHamiltonian> {
    let (Some(omega_a), Some(omega_c)) = (params.omega_a, params.omega_c) else {
        return Err(Error::InvalidParameter(
            "lab-frame Hamiltonian needs omega_a and omega_c".into(),
        ));
    };
    let rotating = SystemParams {
        delta_a: 0.0,
        omega_a: None,
        omega_c: None,
        ..params.clone()
    };
    let mut out = build_hamiltonian(&rotating, basis)?;
    let n_atoms = params.n_atoms() as f64;
    for (i, s) in basis.states().iter().enumerate() {
        let k = s.num_excited() as f64;
        out.h[(i, i)] = C64::new(
            omega_c * f64::from(s.photons) + omega_a * (2.0 * k - n_atoms) / 2.0,
            0.0,
        );
    }
    Ok(out)
}

/// Constant by which the lab-frame diagonal exceeds the rotating-frame one on
/// the `n`-excitation subspace: `ω_c (n - N/2)`.
pub fn lab_frame_offset(omega_c: f64, n_atoms: usize, excitation: u32) -> f64 {
    omega_c * (f64::from(excitation) - n_atoms as f64 / 2.0)
}

/// True iff every state of `basis` carries exactly `basis.excitation()` quanta.
pub fn excitation_operator_check(basis: &SubspaceBasis) -> bool {
    basis
        .states()
        .iter()
        .all(|s| s.excitation() == basis.excitation())
}
