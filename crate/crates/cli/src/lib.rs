//! Library side of the `darkstate` command: configuration, presets and the
//! four commands. `main.rs` only parses arguments and maps errors to exit codes.

use std::fmt;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

pub mod commands;
pub mod config;

pub use commands::Outcome;
use config::{apply_override, parse_assignment, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
/// Detector and oracle disagree, or a watched dark state was not flat.
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Bad input: malformed configuration, unknown key, out-of-range parameter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Exit code for an error: usage errors anywhere in the chain give 2.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<UsageError>()) {
        EXIT_USAGE
    } else {
        EXIT_RUNTIME
    }
}

pub mod presets {
    //! Configurations bundled into the binary.

    pub const NAMES: [&str; 5] = ["fig2b", "fig3c", "fig3d", "fig4b", "fig5b"];

    pub fn preset(name: &str) -> Option<&'static str> {
        Some(match name {
            "fig2b" => include_str!("../presets/fig2b.json"),
            "fig3c" => include_str!("../presets/fig3c.json"),
            "fig3d" => include_str!("../presets/fig3d.json"),
            "fig4b" => include_str!("../presets/fig4b.json"),
            "fig5b" => include_str!("../presets/fig5b.json"),
            _ => return None,
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "darkstate",
    version,
    about = "Dark states of atoms in a lossy cavity"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find the dark states of one excitation subspace and check them against the oracle.
    Analyze(RunArgs),
    /// Integrate the master equation and track watched populations.
    Simulate(RunArgs),
    /// Derive couplings from atom positions and analyze the result.
    Geometry(RunArgs),
    /// Count dark states over a parameter grid.
    Scan(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON configuration file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    /// Bundled configuration (fig2b, fig3c, fig3d, fig4b, fig5b).
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Override a configuration value, e.g. `--set system.kappa=0.5`.
    #[arg(long = "set", value_parser = parse_assignment)]
    pub overrides: Vec<(String, String)>,
    /// Seed for the scan's oracle subsample.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl RunArgs {
    /// The configuration document with every override applied.
    pub fn document(&self) -> Result<Value> {
        let text = match (&self.config, &self.preset) {
            (Some(path), _) => fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?,
            (None, Some(name)) => presets::preset(name)
                .ok_or_else(|| {
                    UsageError(format!(
                        "unknown preset {name:?}; known: {}",
                        presets::NAMES.join(", ")
                    ))
                })?
                .to_string(),
            (None, None) => return Err(UsageError("give --config or --preset".into()).into()),
        };
        let mut doc: Value = serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("configuration is not valid JSON: {e}")))?;
        for (k, v) in &self.overrides {
            apply_override(&mut doc, k, v)?;
        }
        Ok(doc)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let args = match &cli.command {
        Command::Analyze(a) | Command::Simulate(a) | Command::Geometry(a) | Command::Scan(a) => a,
    };
    let doc = args.document()?;
    let cfg = RunConfig::from_value(doc.clone())?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    match &cli.command {
        Command::Analyze(_) => commands::run_analyze(&cfg, &args.out),
        Command::Simulate(_) => commands::run_simulate(&cfg, &args.out),
        Command::Geometry(_) => commands::run_geometry(&cfg, &args.out),
        Command::Scan(_) => commands::run_scan(&doc, &cfg, args.seed, &args.out),
    }
}
