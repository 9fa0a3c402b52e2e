//! Subcommands behind the `ifm-cavity` binary.
//!
//! Each command turns a validated [`RunConfig`] into one or more tables,
//! writes them to the output directory and records a [`RunManifest`] with
//! SHA-256 digests of everything written. Exit codes: 0 success, 2 invalid
//! configuration, 3 infeasible constrained optimisation, 1 anything else.

mod commands;
pub mod config;
pub mod manifest;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime};

use thiserror::Error;

pub use commands::{
    coeffs_table, montecarlo_table, optimize_table, param_map_tables, security_curve_table,
    sweep_xi_table, CurveXi,
};
pub use config::{Format, RunConfig};
pub use manifest::{OutputDigest, RunManifest};
pub use table::{Table, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "IFM_CAVITY_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_INVALID,
            CliError::Model(crate::Error::InvalidSpec { .. } | crate::Error::EmptyGrid(_)) => {
                EXIT_INVALID
            }
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coeffs,
    SweepXi,
    Optimize,
    ParamMap,
    SecurityCurve,
    MonteCarlo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::SweepXi => "sweep-xi",
            Command::Optimize => "optimize",
            Command::ParamMap => "param-map",
            Command::SecurityCurve => "security-curve",
            Command::MonteCarlo => "montecarlo",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Optimize | Command::MonteCarlo => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Everything a command run needs, with command-line overrides already applied.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Invocation {
    /// Resolves output directory and format: flag (the binary folds the
    /// environment override into it), then config file, then defaults. The
    /// resolved values are written back into the config so the manifest echo
    /// is complete.
    pub fn resolve(
        command: Command,
        mut config: RunConfig,
        out_flag: Option<PathBuf>,
        format_flag: Option<Format>,
        seed_flag: Option<u64>,
    ) -> Result<Invocation, CliError> {
        if let Some(seed) = seed_flag {
            config.montecarlo.seed = seed;
        }
        config.validate()?;
        let out_dir = out_flag
            .or_else(|| config.output.dir.as_ref().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        let format = format_flag
            .or(config.output.format)
            .unwrap_or_else(|| command.default_format());
        config.output.dir = Some(out_dir.to_string_lossy().into_owned());
        config.output.format = Some(format);
        Ok(Invocation {
            command,
            config,
            out_dir,
            format,
        })
    }
}

/// A named table produced by a command.
pub struct Artifact {
    pub stem: String,
    pub table: Table,
}

/// What a command produced, before anything is written.
pub struct Report {
    pub artifacts: Vec<Artifact>,
    /// Text for stdout.
    pub summary: String,
    pub infeasible: bool,
    pub seeds: Vec<u64>,
    pub rng: Option<&'static str>,
    pub details: serde_json::Value,
}

#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
    pub summary: String,
    pub exit_code: u8,
}

/// Computes the command's tables without touching the filesystem.
pub fn compute(inv: &Invocation) -> Result<Report, CliError> {
    let cfg = &inv.config;
    match inv.command {
        Command::Coeffs => commands::coeffs(cfg),
        Command::SweepXi => commands::sweep_xi(cfg),
        Command::Optimize => commands::optimize(cfg),
        Command::ParamMap => commands::param_map(cfg),
        Command::SecurityCurve => commands::security_curve(cfg),
        Command::MonteCarlo => commands::montecarlo(cfg),
    }
}

/// Runs the command, writes its outputs plus manifest and reports the exit code.
pub fn execute(inv: &Invocation) -> Result<Outcome, CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let report = compute(inv)?;

    std::fs::create_dir_all(&inv.out_dir)?;
    let mut files = Vec::new();
    let mut digests = Vec::new();
    for artifact in &report.artifacts {
        let path = inv
            .out_dir
            .join(format!("{}.{}", artifact.stem, inv.format.extension()));
        let bytes = artifact.table.encode(inv.format)?;
        write_file(&path, &bytes)?;
        digests.push(OutputDigest::of(&path, &bytes));
        files.push(path);
    }

    let mut manifest = RunManifest::new(inv.command.name(), &inv.config, started, clock.elapsed());
    manifest.seeds = report.seeds.clone();
    manifest.rng = report.rng;
    manifest.details = report.details.clone();
    manifest.outputs = digests;
    let manifest_path = inv
        .out_dir
        .join(format!("{}.manifest.json", inv.command.name()));
    write_file(&manifest_path, &manifest.to_json())?;

    Ok(Outcome {
        files,
        manifest: manifest_path,
        summary: report.summary,
        exit_code: if report.infeasible {
            EXIT_INFEASIBLE
        } else {
            EXIT_OK
        },
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)?;
    Ok(())
}
