//! The JSON run configuration. One document can carry sections for every
//! command; each command reads only the sections it needs.

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use darkstate_core::darkstate::{collective_dark_family, collective_state, orthogonalize};
use darkstate_core::numerics::norm;
use darkstate_core::{analyze, AtomGeometry, BasisState, LadderBasis, SystemParams, C64};

use crate::UsageError;

pub const SCHEMA_VERSION: u32 = 1;
/// Every rate and time in a configuration is measured in units of `g₁`.
pub const UNITS: &str = "g1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub units: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyze: Option<AnalyzeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
}

/// System parameters. Exchange is either uniform (`v_dd`) or a full matrix (`v`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub g: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_dd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_a: Option<f64>,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_c: Option<f64>,
}

impl SystemSpec {
    pub fn params(&self) -> Result<SystemParams> {
        let n = self.g.len();
        let v = match (&self.v_dd, &self.v) {
            (Some(x), None) => (0..n)
                .map(|j| (0..n).map(|k| if j == k { 0.0 } else { *x }).collect())
                .collect(),
            (None, Some(m)) => m.clone(),
            _ => bail!(UsageError(
                "system: give exactly one of `v_dd` and `v`".into()
            )),
        };
        let p = match (self.omega_a, self.omega_c) {
            (None, None) => {
                SystemParams::new(self.g.clone(), v, self.delta_a.unwrap_or(0.0), self.kappa)
                    .map_err(|e| UsageError(e.to_string()))?
            }
            (Some(a), Some(c)) => {
                let p = SystemParams::from_frequencies(self.g.clone(), v, a, c, self.kappa)
                    .map_err(|e| UsageError(e.to_string()))?;
                if let Some(d) = self.delta_a {
                    ensure!(
                        (d - p.delta_a).abs() <= 1e-12 * a.abs().max(c.abs()).max(1.0),
                        UsageError(format!(
                            "system: delta_a = {d} disagrees with omega_a - omega_c = {}",
                            p.delta_a
                        ))
                    );
                }
                p
            }
            _ => bail!(UsageError("system: omega_a and omega_c go together".into())),
        };
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeSpec {
    pub excitation: u32,
    /// Largest principal angle at which detector and oracle still agree.
    #[serde(default = "default_angle_tol")]
    pub angle_tol: f64,
}

fn default_angle_tol() -> f64 {
    darkstate_core::darkstate::DEFAULT_ANGLE_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    /// Excitation number of the initial state; the run covers subspaces `0..=n0`.
    pub n0: u32,
    pub initial: StateSpec,
    pub watch: Vec<WatchSpec>,
    pub t_max: f64,
    pub dt: f64,
    #[serde(default = "yes")]
    pub convergence_check: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WatchSpec {
    pub name: String,
    #[serde(flatten)]
    pub state: StateSpec,
}

/// A pure state, described either explicitly or by its role.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    /// Superposition of basis states such as `"0,eg"`.
    Basis {
        terms: Vec<Term>,
        /// Rescale the amplitudes to unit norm instead of rejecting them.
        #[serde(default)]
        normalize: bool,
    },
    /// `|L(s)⟩`, 1-based, of the collective single-excitation basis.
    Collective { index: usize },
    /// Member `index` (0-based) of the Gram-Schmidt orthonormalized
    /// single-excitation dark family; needs uniform exchange.
    CollectiveDark { index: usize },
    /// Normalized `Σ_{s≥2} G_s |L(s)⟩`; needs uniform exchange.
    CollectiveBright,
    /// Dark vector `index` (0-based, by descending energy) found by the
    /// detector in subspace `excitation`.
    Dark { excitation: u32, index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub state: String,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// A state resolved on the ladder, with the subspace it lives in when it lives
/// in exactly one.
#[derive(Debug, Clone)]
pub struct ResolvedState {
    pub vector: Vec<C64>,
    pub excitation: Option<u32>,
}

impl StateSpec {
    pub fn resolve(&self, params: &SystemParams, ladder: &LadderBasis) -> Result<ResolvedState> {
        let n_atoms = params.n_atoms();
        let single = |v: Vec<C64>, n: u32| -> Result<ResolvedState> {
            ensure!(
                n <= ladder.n_max(),
                UsageError(format!(
                    "state lives in subspace {n}, above n0 = {}",
                    ladder.n_max()
                ))
            );
            Ok(ResolvedState {
                vector: ladder.embed(n, &v)?,
                excitation: Some(n),
            })
        };
        let uniform = || -> Result<()> {
            ensure!(
                params.uniform_v().is_some(),
                UsageError("collective dark and bright states need uniform exchange".into())
            );
            Ok(())
        };
        match self {
            StateSpec::Basis { terms, normalize } => {
                ensure!(
                    !terms.is_empty(),
                    UsageError("basis state without terms".into())
                );
                let mut v = vec![C64::new(0.0, 0.0); ladder.dim()];
                let mut excitations = Vec::new();
                for t in terms {
                    let (s, atoms) =
                        BasisState::parse_label(&t.state).map_err(|e| UsageError(e.to_string()))?;
                    ensure!(
                        atoms == n_atoms,
                        UsageError(format!(
                            "state {:?} has {atoms} atoms, system has {n_atoms}",
                            t.state
                        ))
                    );
                    let i = ladder.global_index(&s).map_err(|_| {
                        UsageError(format!(
                            "state {:?} is above n0 = {}",
                            t.state,
                            ladder.n_max()
                        ))
                    })?;
                    v[i] += C64::new(t.re, t.im);
                    excitations.push(s.excitation());
                }
                let nrm = norm(&v);
                if *normalize {
                    ensure!(nrm > 0.0, UsageError("basis state has zero norm".into()));
                    v.iter_mut().for_each(|z| *z /= nrm);
                }
                excitations.dedup();
                let excitation = (excitations.len() == 1).then(|| excitations[0]);
                Ok(ResolvedState {
                    vector: v,
                    excitation,
                })
            }
            StateSpec::Collective { index } => single(collective_state(n_atoms, *index)?, 1),
            StateSpec::CollectiveDark { index } => {
                uniform()?;
                let family = orthogonalize(&collective_dark_family(&params.g)?, 1e-12);
                let v = family.vectors.get(*index).cloned().ok_or_else(|| {
                    UsageError(format!(
                        "collective dark index {index} out of range ({} independent members)",
                        family.vectors.len()
                    ))
                })?;
                single(v, 1)
            }
            StateSpec::CollectiveBright => {
                uniform()?;
                single(
                    darkstate_core::darkstate::collective_bright_state(&params.g)?,
                    1,
                )
            }
            StateSpec::Dark { excitation, index } => {
                let (_, report) = analyze(params, *excitation)?;
                let v = report.dark_vectors.get(*index).cloned().ok_or_else(|| {
                    UsageError(format!(
                        "subspace {excitation} has {} dark states, no index {index}",
                        report.total_dark
                    ))
                })?;
                single(v, *excitation)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    #[serde(flatten)]
    pub atoms: AtomGeometry,
    #[serde(default)]
    pub delta_a: f64,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default = "default_excitations")]
    pub excitations: Vec<u32>,
}

fn default_excitations() -> Vec<u32> {
    vec![1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub excitation: u32,
    /// Grid axes; the grid is their Cartesian product, first axis slowest.
    pub axes: Vec<Axis>,
    /// Fraction of grid points also run through the brute-force oracle,
    /// chosen with the run seed.
    #[serde(default = "one")]
    pub oracle_fraction: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    /// Dotted path into the configuration, e.g. `system.g.1`.
    pub key: String,
    #[serde(flatten)]
    pub values: AxisValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisValues {
    List {
        values: Vec<f64>,
    },
    /// `count` evenly spaced points including both ends.
    Range {
        start: f64,
        stop: f64,
        count: usize,
    },
}

impl AxisValues {
    pub fn points(&self) -> Vec<f64> {
        match self {
            AxisValues::List { values } => values.clone(),
            AxisValues::Range { start, stop, count } => match count {
                0 => vec![],
                1 => vec![*start],
                _ => (0..*count)
                    .map(|i| start + (stop - start) * i as f64 / (*count - 1) as f64)
                    .collect(),
            },
        }
    }
}

impl RunConfig {
    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_value(value)
            .map_err(|e| UsageError(format!("invalid configuration: {e}")))?;
        ensure!(
            cfg.schema_version == SCHEMA_VERSION,
            UsageError(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            ))
        );
        ensure!(
            cfg.units == UNITS,
            UsageError(format!("units must be {UNITS:?}, got {:?}", cfg.units))
        );
        Ok(cfg)
    }

    pub fn system(&self) -> Result<SystemParams> {
        self.system
            .as_ref()
            .ok_or_else(|| UsageError("configuration has no `system` section".into()))?
            .params()
            .context("system section")
    }

    pub fn section<'a, T>(&self, name: &str, s: &'a Option<T>) -> Result<&'a T> {
        s.as_ref()
            .ok_or_else(|| UsageError(format!("configuration has no `{name}` section")).into())
    }
}

/// Replaces the value at a dotted path (`a.b.0.c`). The path must already
/// exist; the new value is parsed as JSON, falling back to a plain string.
pub fn apply_override(doc: &mut Value, key: &str, raw: &str) -> Result<()> {
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(doc, key, value)
}

pub fn set_path(doc: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut node = doc;
    for part in key.split('.') {
        let next = match node {
            Value::Object(map) => map.get_mut(part),
            Value::Array(items) => part.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        };
        node = next.ok_or_else(|| UsageError(format!("unknown configuration key {key:?}")))?;
    }
    *node = value;
    Ok(())
}

/// Splits `key=value`.
pub fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    if k.is_empty() {
        return Err(format!("empty key in {s:?}"));
    }
    Ok((k.to_string(), v.to_string()))
}
