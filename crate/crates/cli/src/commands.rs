use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use darkstate_core::dynamics::population;
use darkstate_core::numerics::inner;
use darkstate_core::{
    analyze, cardano_discriminant, compare, ladder_spaces, oracle, params_from_geometry, simulate,
    Agreement, BasisState, DiscriminantResult, LadderBasis, ReportDocument, SimulationConfig,
    SystemParams, Trajectory, WatchState, C64,
};

use crate::config::{set_path, RunConfig, SCHEMA_VERSION, UNITS};
use crate::UsageError;

/// Result of one command: the text summary and whether every check passed.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub summary: String,
    pub success: bool,
}

/// Dark states of a subspace closer than this (in norm) count as dark.
const DARK_MEMBERSHIP_TOL: f64 = 1e-9;
pub const FLATNESS_TOL: f64 = 1e-3;

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(dir.join(name), text).with_context(|| format!("writing {name}"))
}

fn write_summary(dir: &Path, text: &str) -> Result<()> {
    fs::write(dir.join("summary.txt"), text).context("writing summary.txt")
}

fn usage<T>(r: darkstate_core::Result<T>) -> Result<T> {
    r.map_err(|e| UsageError(e.to_string()).into())
}

#[derive(Debug, Serialize)]
struct AnalyzeDocument {
    schema_version: u32,
    units: &'static str,
    command: &'static str,
    params: SystemParams,
    excitation: u32,
    agreement: Agreement,
    detect: ReportDocument,
    oracle: ReportDocument,
}

pub struct SubspaceAnalysis {
    pub detect: darkstate_core::DarkStateReport,
    pub oracle: darkstate_core::DarkStateReport,
    pub agreement: Agreement,
}

/// Detector and oracle on one subspace.
pub fn analyze_subspace(
    params: &SystemParams,
    excitation: u32,
    angle_tol: f64,
) -> Result<SubspaceAnalysis> {
    let (h, detect) = analyze(params, excitation)?;
    let oracle = oracle(&h, None)?;
    let agreement = compare(&detect, &oracle, angle_tol);
    Ok(SubspaceAnalysis {
        detect,
        oracle,
        agreement,
    })
}

fn describe_report(out: &mut String, r: &ReportDocument) {
    let _ = writeln!(
        out,
        "subspace n = {} of {} atoms: {} upper, {} lower states",
        r.excitation, r.n_atoms, r.n_upper, r.n_lower
    );
    let _ = writeln!(
        out,
        "{:>14} {:>5} {:>5} {:>5}",
        "energy", "size", "rank", "dark"
    );
    for c in &r.clusters {
        let _ = writeln!(
            out,
            "{:>14.9} {:>5} {:>5} {:>5}",
            c.eigenvalue, c.size, c.rank, c.dark_dim
        );
    }
    let _ = writeln!(out, "dark states: {}", r.total_dark);
    for (k, d) in r.dark_states.iter().enumerate() {
        let _ = writeln!(out, "  D{} at energy {:.9}", k + 1, d.eigenvalue);
        for a in &d.amplitudes {
            if a.im == 0.0 {
                let _ = writeln!(out, "    {:>+.9}  |{}>", a.re, a.state);
            } else {
                let _ = writeln!(out, "    {:>+.9}{:+.9}i  |{}>", a.re, a.im, a.state);
            }
        }
    }
}

fn describe_agreement(out: &mut String, a: &Agreement, tol: f64) {
    let angle = a
        .max_angle
        .map_or("n/a".to_string(), |x| format!("{x:.3e}"));
    let _ = writeln!(
        out,
        "oracle: counts {}, largest principal angle {angle} (tolerance {tol:e}): {}",
        if a.counts_match { "match" } else { "DIFFER" },
        if a.agree { "agree" } else { "DISAGREE" }
    );
}

pub fn run_analyze(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let params = cfg.system()?;
    let sec = cfg.section("analyze", &cfg.analyze)?;
    let a = analyze_subspace(&params, sec.excitation, sec.angle_tol)?;
    let doc = AnalyzeDocument {
        schema_version: SCHEMA_VERSION,
        units: UNITS,
        command: "analyze",
        params,
        excitation: sec.excitation,
        agreement: a.agreement,
        detect: a.detect.to_document(),
        oracle: a.oracle.to_document(),
    };
    write_json(out, "report.json", &doc)?;
    let mut s = String::new();
    describe_report(&mut s, &doc.detect);
    describe_agreement(&mut s, &a.agreement, sec.angle_tol);
    write_summary(out, &s)?;
    Ok(Outcome {
        summary: s,
        success: a.agreement.agree,
    })
}

/// Every dark state of subspaces `1..=n_max`, embedded in the ladder. The
/// ground state is not counted as dark.
pub fn dark_inventory(params: &SystemParams, ladder: &LadderBasis) -> Result<Vec<(u32, Vec<C64>)>> {
    let mut out = Vec::new();
    for n in 1..=ladder.n_max() {
        let (_, r) = analyze(params, n)?;
        for v in r.dark_vectors {
            out.push((n, ladder.embed(n, &v)?));
        }
    }
    Ok(out)
}

fn ground_state(params: &SystemParams, ladder: &LadderBasis) -> Result<Vec<C64>> {
    let mut v = vec![C64::new(0.0, 0.0); ladder.dim()];
    v[ladder.global_index(&BasisState::from_mask(0, 0))?] = C64::new(1.0, 0.0);
    debug_assert_eq!(ladder.n_atoms(), params.n_atoms());
    Ok(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct WatchSummary {
    pub name: String,
    pub excitation: Option<u32>,
    /// Lies in the detector's dark subspace of its excitation number.
    pub dark: bool,
    pub initial: f64,
    #[serde(rename = "final")]
    pub last: f64,
    /// `max_t |P(t) - P(0)|`.
    pub max_deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationDocument {
    pub schema_version: u32,
    pub units: &'static str,
    pub command: &'static str,
    pub params: SystemParams,
    pub n0: u32,
    pub t_max: f64,
    pub dt: f64,
    pub steps: usize,
    pub watch: Vec<WatchSummary>,
    /// Population of `|0,g…g⟩` at the end.
    pub ground_final: f64,
    /// Population in all dark subspaces `1..=n0` at the end.
    pub dark_final: f64,
    /// `1 - ground - dark` at the end: what the cavity has not yet removed.
    pub non_dark_excited_final: f64,
    pub trace_drift: f64,
    pub hermiticity_error: f64,
    pub min_eigenvalue: f64,
    /// Largest increment of `⟨N̂⟩` between steps; non-positive when monotone.
    pub max_excitation_increase: f64,
    pub convergence_deviation: Option<f64>,
    /// Largest deviation of a dark state of the top subspace; `None` without any.
    pub top_dark_flatness: Option<f64>,
}

pub fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let params = cfg.system()?;
    let sec = cfg.section("simulate", &cfg.simulate)?;
    let ladder = usage(ladder_spaces(params.n_atoms(), sec.n0))?;
    let initial = sec
        .initial
        .resolve(&params, &ladder)
        .context("initial state")?;
    let mut watch = Vec::new();
    let mut watch_info = Vec::new();
    for w in &sec.watch {
        let r = w
            .state
            .resolve(&params, &ladder)
            .with_context(|| format!("watch state {:?}", w.name))?;
        let dark = match r.excitation {
            Some(n) if n > 0 => {
                let (_, rep) = analyze(&params, n)?;
                let part = &r.vector[ladder.block(n)];
                let p = rep.projector().mul_vec(part);
                let miss: f64 = p
                    .iter()
                    .zip(part)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                rep.total_dark > 0 && miss <= DARK_MEMBERSHIP_TOL
            }
            _ => false,
        };
        watch_info.push((w.name.clone(), r.excitation, dark));
        watch.push(WatchState {
            name: w.name.clone(),
            vector: r.vector,
        });
    }
    let mut sim = usage(SimulationConfig::new(
        params.clone(),
        sec.n0,
        initial.vector,
        watch,
        sec.t_max,
        sec.dt,
    ))?;
    sim.convergence_check = sec.convergence_check;
    let traj = simulate(&sim)?;

    let mut csv = Vec::new();
    traj.write_csv(&mut csv)?;
    fs::write(out.join("trajectory.csv"), csv).context("writing trajectory.csv")?;

    let doc = simulation_document(&params, &ladder, &sim, &traj, &watch_info)?;
    write_json(out, "report.json", &doc)?;
    let s = simulation_summary(&doc);
    write_summary(out, &s)?;
    let flat = doc.top_dark_flatness.is_none_or(|x| x <= FLATNESS_TOL);
    Ok(Outcome {
        summary: s,
        success: flat,
    })
}

fn simulation_document(
    params: &SystemParams,
    ladder: &LadderBasis,
    sim: &SimulationConfig,
    traj: &Trajectory,
    watch_info: &[(String, Option<u32>, bool)],
) -> Result<SimulationDocument> {
    let rho = &traj.final_rho;
    let ground_final = population(rho, &ground_state(params, ladder)?)?;
    let dark_final: f64 = dark_inventory(params, ladder)?
        .iter()
        .map(|(_, v)| inner(v, &rho.mul_vec(v)).re)
        .sum();
    let watch: Vec<WatchSummary> = watch_info
        .iter()
        .zip(&traj.populations)
        .map(|((name, excitation, dark), p)| WatchSummary {
            name: name.clone(),
            excitation: *excitation,
            dark: *dark,
            initial: p[0],
            last: *p.last().unwrap_or(&p[0]),
            max_deviation: p.iter().map(|x| (x - p[0]).abs()).fold(0.0, f64::max),
        })
        .collect();
    let top_dark_flatness = watch
        .iter()
        .filter(|w| w.dark && w.excitation == Some(sim.ladder.n_max()))
        .map(|w| w.max_deviation)
        .reduce(f64::max);
    Ok(SimulationDocument {
        schema_version: SCHEMA_VERSION,
        units: UNITS,
        command: "simulate",
        params: params.clone(),
        n0: sim.ladder.n_max(),
        t_max: sim.t_max,
        dt: sim.dt,
        steps: sim.n_steps(),
        watch,
        ground_final,
        dark_final,
        non_dark_excited_final: 1.0 - ground_final - dark_final,
        trace_drift: traj.trace_drift,
        hermiticity_error: traj.hermiticity_error,
        min_eigenvalue: traj.min_eigenvalue,
        max_excitation_increase: traj
            .excitation
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max),
        convergence_deviation: traj.convergence_deviation,
        top_dark_flatness,
    })
}

fn simulation_summary(d: &SimulationDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} atoms, n0 = {}, t_max = {}, dt = {} ({} steps)",
        d.params.n_atoms(),
        d.n0,
        d.t_max,
        d.dt,
        d.steps
    );
    let _ = writeln!(
        s,
        "{:<12} {:>4} {:>5} {:>12} {:>12} {:>12}",
        "state", "n", "dark", "P(0)", "P(end)", "max|dP|"
    );
    for w in &d.watch {
        let n = w.excitation.map_or("-".to_string(), |n| n.to_string());
        let _ = writeln!(
            s,
            "{:<12} {:>4} {:>5} {:>12.6} {:>12.6} {:>12.3e}",
            w.name,
            n,
            if w.dark { "yes" } else { "no" },
            w.initial,
            w.last,
            w.max_deviation
        );
    }
    let _ = writeln!(
        s,
        "end: ground {:.6}, all dark {:.6}, remaining {:.3e}",
        d.ground_final, d.dark_final, d.non_dark_excited_final
    );
    match d.top_dark_flatness {
        Some(x) => {
            let _ = writeln!(
                s,
                "dark flatness (subspace {}): {x:.3e} {}",
                d.n0,
                if x <= FLATNESS_TOL { "ok" } else { "FAILED" }
            );
        }
        None => {
            let _ = writeln!(
                s,
                "dark flatness: no watched dark state of subspace {}",
                d.n0
            );
        }
    }
    let _ = writeln!(
        s,
        "integrity: trace drift {:.2e}, hermiticity {:.2e}, min eigenvalue {:.2e}, max <N> increase {:.2e}",
        d.trace_drift, d.hermiticity_error, d.min_eigenvalue, d.max_excitation_increase
    );
    if let Some(c) = d.convergence_deviation {
        let _ = writeln!(s, "step halving: populations agree to {c:.2e}");
    }
    s
}

#[derive(Debug, Serialize)]
struct GeometryDocument {
    schema_version: u32,
    units: &'static str,
    command: &'static str,
    params: SystemParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    discriminant: Option<DiscriminantResult>,
    subspaces: Vec<GeometrySubspace>,
}

#[derive(Debug, Serialize)]
struct GeometrySubspace {
    agreement: Agreement,
    detect: ReportDocument,
}

pub fn run_geometry(cfg: &RunConfig, out: &Path) -> Result<Outcome> {
    let sec = cfg.section("geometry", &cfg.geometry)?;
    let params = usage(params_from_geometry(&sec.atoms, sec.delta_a, sec.kappa))?;
    let discriminant = (params.n_atoms() == 3)
        .then(|| cardano_discriminant(params.v[0][1], params.v[0][2], params.v[1][2]));
    let mut s = String::new();
    let _ = writeln!(s, "couplings g = {:?}", params.g);
    for row in &params.v {
        let _ = writeln!(s, "V row {row:?}");
    }
    if let Some(d) = &discriminant {
        let _ = writeln!(
            s,
            "discriminant {:.6e} (P = {:.6e}, Q = {:.6e}): {}; |V| equal: {} (spread {:.2e})",
            d.delta,
            d.p,
            d.q,
            if d.degenerate {
                "repeated root"
            } else {
                "distinct roots"
            },
            d.equal_magnitudes,
            d.magnitude_spread
        );
    }
    let mut subspaces = Vec::new();
    let mut success = true;
    for &n in &sec.excitations {
        let a = analyze_subspace(&params, n, darkstate_core::darkstate::DEFAULT_ANGLE_TOL)?;
        let detect = a.detect.to_document();
        describe_report(&mut s, &detect);
        describe_agreement(
            &mut s,
            &a.agreement,
            darkstate_core::darkstate::DEFAULT_ANGLE_TOL,
        );
        success &= a.agreement.agree;
        subspaces.push(GeometrySubspace {
            agreement: a.agreement,
            detect,
        });
    }
    let doc = GeometryDocument {
        schema_version: SCHEMA_VERSION,
        units: UNITS,
        command: "geometry",
        params,
        discriminant,
        subspaces,
    };
    write_json(out, "report.json", &doc)?;
    write_summary(out, &s)?;
    Ok(Outcome {
        summary: s,
        success,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub index: usize,
    pub values: Vec<f64>,
    pub total_dark: usize,
    /// `Some(agree)` when the point was also run through the oracle.
    pub oracle: Option<bool>,
}

/// Grid points in row-major order, first axis slowest.
fn grid(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if axes.is_empty() || axes.iter().any(|a| a.is_empty()) {
        return vec![];
    }
    let total: usize = axes.iter().map(|a| a.len()).product();
    (0..total)
        .map(|mut i| {
            let mut point = vec![0.0; axes.len()];
            for (k, axis) in axes.iter().enumerate().rev() {
                point[k] = axis[i % axis.len()];
                i /= axis.len();
            }
            point
        })
        .collect()
}

/// Runs the grid on the worker pool. `doc` is the full configuration (with
/// overrides applied); each point replaces the axis keys and re-reads it.
pub fn scan_rows(doc: &Value, cfg: &RunConfig, seed: u64) -> Result<Vec<ScanRow>> {
    let sec = cfg.section("scan", &cfg.scan)?;
    let axes: Vec<Vec<f64>> = sec.axes.iter().map(|a| a.values.points()).collect();
    // Axis keys must exist even when the grid is empty.
    for a in &sec.axes {
        set_path(&mut doc.clone(), &a.key, Value::Null)?;
    }
    let points = grid(&axes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checked: Vec<bool> = points
        .iter()
        .map(|_| rng.gen::<f64>() < sec.oracle_fraction)
        .collect();
    points
        .into_par_iter()
        .zip(checked)
        .enumerate()
        .map(|(index, (values, check))| {
            let mut d = doc.clone();
            for (axis, &x) in sec.axes.iter().zip(&values) {
                set_path(&mut d, &axis.key, Value::from(x))?;
            }
            let params = RunConfig::from_value(d)?
                .system()
                .with_context(|| format!("grid point {index}"))?;
            let oracle = if check {
                Some(analyze_subspace(
                    &params,
                    sec.excitation,
                    darkstate_core::darkstate::DEFAULT_ANGLE_TOL,
                )?)
            } else {
                None
            };
            let total_dark = match &oracle {
                Some(a) => a.detect.total_dark,
                None => analyze(&params, sec.excitation)?.1.total_dark,
            };
            Ok(ScanRow {
                index,
                values,
                total_dark,
                oracle: oracle.map(|a| a.agreement.agree),
            })
        })
        .collect()
}

pub fn run_scan(doc: &Value, cfg: &RunConfig, seed: u64, out: &Path) -> Result<Outcome> {
    let sec = cfg.section("scan", &cfg.scan)?;
    let rows = scan_rows(doc, cfg, seed)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec!["index".to_string()];
    header.extend(sec.axes.iter().map(|a| a.key.clone()));
    header.extend([
        "total_dark".into(),
        "oracle_checked".into(),
        "oracle_agrees".into(),
    ]);
    w.write_record(&header)?;
    for r in &rows {
        let mut rec = vec![r.index.to_string()];
        rec.extend(r.values.iter().map(|x| x.to_string()));
        rec.push(r.total_dark.to_string());
        rec.push(r.oracle.is_some().to_string());
        rec.push(r.oracle.map_or(String::new(), |a| a.to_string()));
        w.write_record(&rec)?;
    }
    fs::write(out.join("scan.csv"), w.into_inner()?).context("writing scan.csv")?;

    let mut histogram = BTreeMap::new();
    for r in &rows {
        *histogram.entry(r.total_dark).or_insert(0usize) += 1;
    }
    let checked = rows.iter().filter(|r| r.oracle.is_some()).count();
    let disagreements = rows.iter().filter(|r| r.oracle == Some(false)).count();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} grid points in subspace n = {} (seed {seed})",
        rows.len(),
        sec.excitation
    );
    for (count, points) in &histogram {
        let _ = writeln!(s, "  {points} points with {count} dark states");
    }
    let _ = writeln!(
        s,
        "oracle checked {checked} points, {disagreements} disagreements"
    );
    write_summary(out, &s)?;
    Ok(Outcome {
        summary: s,
        success: disagreements == 0,
    })
}
