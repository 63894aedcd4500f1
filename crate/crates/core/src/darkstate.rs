//! Dark states: eigenstates with no amplitude on any photon-carrying basis state.
//!
//! [`detect`] reads them off the arrowhead form. A cluster of `d` degenerate
//! dressed lower states whose coupling block `C̃` has rank `R` hosts `d - R` dark
//! states; a single dressed state with a vanishing coupling column is the
//! `d = 1, R = 0` case. [`oracle`] finds the same subspace by brute force from
//! the eigenvectors of the full matrix.

use serde::{Deserialize, Serialize};

use crate::arrowhead::{collective_basis, collective_couplings, to_arrowhead, ArrowheadForm};
use crate::error::{Error, Result};
use crate::hilbert::{enumerate_subspace, SubspaceBasis};
use crate::model::{build_hamiltonian, SubspaceHamiltonian, SystemParams};
use crate::numerics::{
    eigh, fix_phase, inner, max_principal_angle, norm, rank_and_nullspace_with_reference, svd,
    ComplexMatrix, C64, DEFAULT_RANK_TOL,
};

pub const DEFAULT_AMP_TOL: f64 = 1e-8;
pub const DEFAULT_ANGLE_TOL: f64 = 1e-7;

/// Dressed lower states (or, for the oracle, eigenstates of the full matrix)
/// sharing one eigenvalue.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegenerateCluster {
    /// Mean of the member eigenvalues.
    pub eigenvalue: f64,
    pub member_indices: Vec<usize>,
    /// Coupling of the members to the upper states, one column per member.
    pub coupling_submatrix: ComplexMatrix,
    pub rank: usize,
    pub dark_dim: usize,
    /// Largest minus smallest member eigenvalue; nonzero means near-degenerate
    /// values were merged.
    pub spread: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Arrowhead,
    Oracle,
}

#[derive(Debug, Clone)]
pub struct DarkStateReport {
    pub method: Method,
    pub basis: SubspaceBasis,
    pub clusters: Vec<DegenerateCluster>,
    /// Orthonormal dark states in the bare subspace basis.
    pub dark_vectors: Vec<Vec<C64>>,
    /// `⟨v|H|v⟩` for each dark vector.
    pub eigenvalues: Vec<f64>,
    pub total_dark: usize,
    pub tolerance: f64,
}

impl DarkStateReport {
    fn empty(method: Method, basis: &SubspaceBasis, tolerance: f64) -> Self {
        Self {
            method,
            basis: basis.clone(),
            clusters: vec![],
            dark_vectors: vec![],
            eigenvalues: vec![],
            total_dark: 0,
            tolerance,
        }
    }

    /// Dark vectors as the columns of a `dim x total_dark` matrix.
    pub fn dark_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(self.basis.len(), &self.dark_vectors)
    }

    /// Orthogonal projector onto the dark subspace.
    pub fn projector(&self) -> ComplexMatrix {
        let d = self.dark_matrix();
        &d * &d.adjoint()
    }

    pub fn to_document(&self) -> ReportDocument {
        let labels = self.basis.labels();
        ReportDocument {
            method: self.method,
            n_atoms: self.basis.n_atoms(),
            excitation: self.basis.excitation(),
            n_upper: self.basis.n_upper(),
            n_lower: self.basis.n_lower(),
            tolerance: self.tolerance,
            basis: labels.clone(),
            clusters: self
                .clusters
                .iter()
                .map(|c| ClusterEntry {
                    eigenvalue: c.eigenvalue,
                    members: c.member_indices.clone(),
                    size: c.member_indices.len(),
                    rank: c.rank,
                    dark_dim: c.dark_dim,
                    spread: c.spread,
                })
                .collect(),
            total_dark: self.total_dark,
            dark_states: self
                .dark_vectors
                .iter()
                .zip(&self.eigenvalues)
                .map(|(v, &e)| DarkEntry {
                    eigenvalue: e,
                    amplitudes: v
                        .iter()
                        .zip(&labels)
                        .filter(|(z, _)| z.norm() > 1e-14)
                        .map(|(z, l)| Amplitude {
                            state: l.clone(),
                            re: z.re,
                            im: z.im,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Serializable view of a [`DarkStateReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub method: Method,
    pub n_atoms: usize,
    pub excitation: u32,
    pub n_upper: usize,
    pub n_lower: usize,
    pub tolerance: f64,
    pub basis: Vec<String>,
    pub clusters: Vec<ClusterEntry>,
    pub total_dark: usize,
    pub dark_states: Vec<DarkEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterEntry {
    pub eigenvalue: f64,
    pub members: Vec<usize>,
    pub size: usize,
    pub rank: usize,
    pub dark_dim: usize,
    pub spread: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarkEntry {
    pub eigenvalue: f64,
    /// Nonzero amplitudes only.
    pub amplitudes: Vec<Amplitude>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub state: String,
    pub re: f64,
    pub im: f64,
}

/// `1e-8 · max(1, max - min)` over the given eigenvalues.
pub fn default_cluster_tol(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let spread = if values.is_empty() { 0.0 } else { hi - lo };
    1e-8 * spread.max(1.0)
}

/// Groups ascending values into chains whose consecutive gaps are `<= tol`.
fn chain_clusters(sorted: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        match out.last_mut() {
            Some(c) if x - sorted[*c.last().unwrap()] <= tol => c.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn check_tol(tol: f64, what: &str) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{what} must be positive, got {tol}"
        )))
    }
}

fn rayleigh(h: &ComplexMatrix, v: &[C64]) -> f64 {
    inner(v, &h.mul_vec(v)).re
}

/// Dark states from the arrowhead form.
///
/// `cluster_tol` defaults to [`default_cluster_tol`] of `L̃`. Ranks are taken
/// with tolerance 1e-10 relative to the largest singular value of the whole
/// `C̃`, so a coupling block that vanishes up to roundoff counts as zero.
/// Clusters and dark vectors are listed by descending eigenvalue.
pub fn detect(
    a: &ArrowheadForm,
    basis: &SubspaceBasis,
    cluster_tol: Option<f64>,
) -> Result<DarkStateReport> {
    if a.n_lower() != basis.n_lower() || a.n_upper() != basis.n_upper() {
        return Err(Error::DimensionMismatch {
            context: "arrowhead form vs basis (lower states)",
            expected: basis.n_lower(),
            found: a.n_lower(),
        });
    }
    let tol = cluster_tol.unwrap_or_else(|| default_cluster_tol(&a.l_tilde));
    check_tol(tol, "cluster tolerance")?;
    if a.n_lower() == 0 {
        return Ok(DarkStateReport::empty(Method::Arrowhead, basis, tol));
    }

    let mut order: Vec<usize> = (0..a.n_lower()).collect();
    order.sort_by(|&i, &j| a.l_tilde[i].total_cmp(&a.l_tilde[j]));
    let sorted: Vec<f64> = order.iter().map(|&i| a.l_tilde[i]).collect();
    let reference = svd(&a.c_tilde)
        .singular_values
        .first()
        .copied()
        .unwrap_or(0.0);

    let nu = a.n_upper();
    let mut clusters = Vec::new();
    let mut found: Vec<(f64, Vec<C64>)> = Vec::new();
    for chain in chain_clusters(&sorted, tol).into_iter().rev() {
        let members: Vec<usize> = chain.iter().map(|&k| order[k]).collect();
        let values: Vec<f64> = members.iter().map(|&k| a.l_tilde[k]).collect();
        let block = a.c_tilde.select_columns(&members);
        let ns = rank_and_nullspace_with_reference(&block, DEFAULT_RANK_TOL, reference)?;
        for y in ns.null_basis.columns() {
            let mut v = vec![C64::new(0.0, 0.0); basis.len()];
            for (&k, &yk) in members.iter().zip(&y) {
                for (b, x) in a.dressed_state(k).into_iter().enumerate() {
                    v[nu + b] += yk * x;
                }
            }
            let energy: f64 = y.iter().zip(&values).map(|(z, &l)| z.norm_sqr() * l).sum();
            fix_phase(&mut v, 1e-10);
            found.push((energy, v));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        clusters.push(DegenerateCluster {
            eigenvalue: values.iter().sum::<f64>() / values.len() as f64,
            member_indices: members,
            coupling_submatrix: block,
            rank: ns.rank,
            dark_dim: ns.nullity(),
            spread: hi - lo,
        });
    }

    Ok(DarkStateReport {
        method: Method::Arrowhead,
        basis: basis.clone(),
        clusters,
        total_dark: found.len(),
        eigenvalues: found.iter().map(|(e, _)| *e).collect(),
        dark_vectors: found.into_iter().map(|(_, v)| v).collect(),
        tolerance: tol,
    })
}

/// Brute-force dark states: within each eigenspace of the full matrix, the
/// combinations whose upper-state amplitudes vanish to `amp_tol`.
pub fn oracle(h: &SubspaceHamiltonian, amp_tol: Option<f64>) -> Result<DarkStateReport> {
    let amp_tol = amp_tol.unwrap_or(DEFAULT_AMP_TOL);
    check_tol(amp_tol, "amplitude tolerance")?;
    let basis = &h.basis;
    if basis.n_lower() == 0 {
        return Ok(DarkStateReport::empty(Method::Oracle, basis, amp_tol));
    }
    let eig = eigh(&h.h)?;
    let tol = default_cluster_tol(&eig.eigenvalues);
    let upper = h.upper_range();

    let mut clusters = Vec::new();
    let mut found: Vec<(f64, Vec<C64>)> = Vec::new();
    for members in chain_clusters(&eig.eigenvalues, tol).into_iter().rev() {
        let q = eig.eigenvectors.select_columns(&members);
        let q_upper = q.block(upper.clone(), 0..members.len());
        let decomposition = svd(&q_upper);
        let rank = decomposition
            .singular_values
            .iter()
            .filter(|&&s| s > amp_tol)
            .count();
        let null: Vec<usize> = (rank..members.len()).collect();
        let combos = decomposition.v.select_columns(&null);
        for y in combos.columns() {
            let mut v = q.mul_vec(&y);
            for z in &mut v[upper.clone()] {
                *z = C64::new(0.0, 0.0);
            }
            let nrm = norm(&v);
            v.iter_mut().for_each(|z| *z /= nrm);
            fix_phase(&mut v, 1e-10);
            found.push((rayleigh(&h.h, &v), v));
        }
        let values: Vec<f64> = members.iter().map(|&k| eig.eigenvalues[k]).collect();
        clusters.push(DegenerateCluster {
            eigenvalue: values.iter().sum::<f64>() / values.len() as f64,
            spread: values.last().unwrap() - values[0],
            member_indices: members,
            coupling_submatrix: q_upper,
            rank,
            dark_dim: null.len(),
        });
    }

    Ok(DarkStateReport {
        method: Method::Oracle,
        basis: basis.clone(),
        clusters,
        total_dark: found.len(),
        eigenvalues: found.iter().map(|(e, _)| *e).collect(),
        dark_vectors: found.into_iter().map(|(_, v)| v).collect(),
        tolerance: amp_tol,
    })
}

/// Builds the subspace, its Hamiltonian and arrowhead form, and runs
/// [`detect`] with default tolerances. A subspace without lower states gives
/// an empty report.
pub fn analyze(
    params: &SystemParams,
    excitation: u32,
) -> Result<(SubspaceHamiltonian, DarkStateReport)> {
    let basis = enumerate_subspace(params.n_atoms(), excitation)?;
    let h = build_hamiltonian(params, &basis)?;
    if basis.n_lower() == 0 {
        let report = DarkStateReport::empty(Method::Arrowhead, &basis, default_cluster_tol(&[]));
        return Ok((h, report));
    }
    let a = to_arrowhead(&h)?;
    let report = detect(&a, &basis, None)?;
    Ok((h, report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub counts_match: bool,
    /// Largest principal angle between the two dark subspaces; `None` when the
    /// counts differ.
    pub max_angle: Option<f64>,
    pub agree: bool,
}

/// Compares two reports on dark count and dark subspace.
pub fn compare(a: &DarkStateReport, b: &DarkStateReport, angle_tol: f64) -> Agreement {
    let counts_match = a.total_dark == b.total_dark;
    let max_angle = counts_match
        .then(|| max_principal_angle(&a.dark_matrix(), &b.dark_matrix()))
        .flatten();
    Agreement {
        counts_match,
        max_angle,
        agree: max_angle.is_some_and(|x| x <= angle_tol),
    }
}

#[derive(Debug, Clone)]
pub struct Orthogonalized {
    pub vectors: Vec<Vec<C64>>,
    /// Input positions dropped as linearly dependent on earlier vectors.
    pub dropped: Vec<usize>,
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. A vector whose
/// residual norm is at most `tol` times its original norm is dropped and
/// reported.
pub fn orthogonalize(vectors: &[Vec<C64>], tol: f64) -> Orthogonalized {
    let mut out: Vec<Vec<C64>> = Vec::new();
    let mut dropped = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        let original = norm(v);
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let proj = inner(q, &w);
                for (x, y) in w.iter_mut().zip(q) {
                    *x -= proj * y;
                }
            }
        }
        let residual = norm(&w);
        if original == 0.0 || residual <= tol * original {
            dropped.push(i);
            continue;
        }
        w.iter_mut().for_each(|z| *z /= residual);
        out.push(w);
    }
    Orthogonalized {
        vectors: out,
        dropped,
    }
}

/// `|L(s)⟩` (1-based `s`) of the collective single-excitation basis, embedded in
/// the single-excitation subspace of `n_atoms` atoms.
pub fn collective_state(n_atoms: usize, s: usize) -> Result<Vec<C64>> {
    if s == 0 || s > n_atoms {
        return Err(Error::InvalidParameter(format!(
            "collective index must be in 1..={n_atoms}, got {s}"
        )));
    }
    let rows = collective_basis(n_atoms)?;
    let mut v = vec![C64::new(0.0, 0.0); n_atoms + 1];
    v[1..].copy_from_slice(rows.row(s - 1));
    Ok(v)
}

fn combine(n_atoms: usize, terms: &[(f64, usize)]) -> Result<Vec<C64>> {
    let mut v = vec![C64::new(0.0, 0.0); n_atoms + 1];
    for &(w, s) in terms {
        for (x, y) in v.iter_mut().zip(collective_state(n_atoms, s)?) {
            *x += y * w;
        }
    }
    Ok(v)
}

/// The unnormalized single-excitation dark family `G_{l+2}|L(2)⟩ - G_2|L(l+2)⟩`,
/// `l = 1..N-2`, valid at uniform exchange. The members are dark but not
/// mutually orthogonal.
pub fn collective_dark_family(g: &[f64]) -> Result<Vec<Vec<C64>>> {
    let n_atoms = g.len();
    let big_g = collective_couplings(g, 0.0, 0.0)?.g;
    (1..n_atoms.saturating_sub(1))
        .map(|l| combine(n_atoms, &[(big_g[l + 1], 2), (-big_g[1], l + 2)]))
        .collect()
}

/// Normalized bright combination `Σ_{s≥2} G_s |L(s)⟩` of the non-symmetric
/// collective states.
pub fn collective_bright_state(g: &[f64]) -> Result<Vec<C64>> {
    let n_atoms = g.len();
    let big_g = collective_couplings(g, 0.0, 0.0)?.g;
    let terms: Vec<(f64, usize)> = (2..=n_atoms).map(|s| (big_g[s - 1], s)).collect();
    let mut v = combine(n_atoms, &terms)?;
    let nrm = norm(&v);
    if nrm == 0.0 {
        return Err(Error::InvalidParameter(
            "bright state undefined: G_s vanish for all s >= 2".into(),
        ));
    }
    v.iter_mut().for_each(|z| *z /= nrm);
    Ok(v)
}
