//! Batch front-end: `semigroup-lab <classify|duals|kernel|spectrum|verify>
//! --config FILE`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or
//! analysis error.

pub mod config;
pub mod emit;
pub mod report;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{parse_config, Analysis, AnalysisConfig, Format, Parameters, TupleConfig};
pub use emit::{emit_csv, emit_json, parse_report, report_json};
pub use report::{Check, Outcome, Report, Summary, TupleReport};
pub use run::{run, Command, RunOutput, Tables};

use crate::error::{Error, Result};

/// Caps the rayon pool.
pub const THREADS_ENV: &str = "SEMIGROUP_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "semigroup-lab", version, about = "Weighted translation tuples: classification, duals, analytic model, spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Defect-operator classification and symbol classes.
    Classify(CommonArgs),
    /// Toral and spherical Cauchy duals.
    Duals(CommonArgs),
    /// Kernel coefficients, values and positivity.
    Kernel(CommonArgs),
    /// Spectral radii, polydisc bounds and symmetry evidence.
    Spectrum(CommonArgs),
    /// Every configured analysis plus the invariant suite.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, value_name = "FILE")]
    pub config: PathBuf,
    /// JSON file, or output directory for `--format csv`.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Overrides `parameters.tol`.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
    /// Overrides `parameters.maxOrder`.
    #[arg(long, value_name = "N")]
    pub order: Option<usize>,
}

impl CliCommand {
    fn split(&self) -> (Command, &CommonArgs) {
        match self {
            CliCommand::Classify(a) => (Command::Classify, a),
            CliCommand::Duals(a) => (Command::Duals, a),
            CliCommand::Kernel(a) => (Command::Kernel, a),
            CliCommand::Spectrum(a) => (Command::Spectrum, a),
            CliCommand::Verify(a) => (Command::Verify, a),
        }
    }
}

/// Applies `SEMIGROUP_LAB_THREADS` to the global rayon pool.
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Validation { field: THREADS_ENV.into(), message: format!("expected a positive integer, got {v:?}") })?;
    // A pool that already exists (e.g. in tests) is left as is.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Reads, overrides and runs the configuration for one command.
pub fn execute(command: Command, args: &CommonArgs) -> Result<(RunOutput, Format, Option<PathBuf>)> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Error::Validation { field: "--config".into(), message: format!("{}: {e}", args.config.display()) })?;
    let mut config = parse_config(&text)?;
    if let Some(tol) = args.tol {
        config.parameters.tol = tol;
    }
    if let Some(order) = args.order {
        config.parameters.max_order = order;
    }
    let format = args.format.or(config.output.format).unwrap_or_default();
    let out = args.out.clone().or_else(|| config.output.path.clone());
    config.output.format = Some(format);
    config.output.path = out.clone();
    let output = run(&config, command)?;
    Ok((output, format, out))
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return 2;
    }
    let (command, args) = cli.command.split();
    let result = execute(command, args).and_then(|(output, format, out)| {
        match format {
            Format::Json => emit_json(&output.report, out.as_deref())?,
            Format::Csv => {
                let dir = out.ok_or_else(|| Error::Validation {
                    field: "--out".into(),
                    message: "csv output needs a directory".into(),
                })?;
                emit_csv(&output, &dir)?;
            }
        }
        Ok(output.report.summary)
    });
    match result {
        Ok(summary) => {
            eprintln!(
                "{}: {} tuple(s), {} analyses, {} error(s), {} verification failure(s)",
                command.name(),
                summary.tuples,
                summary.analyses_run,
                summary.errors,
                summary.verification_failures
            );
            for f in &summary.failed_checks {
                eprintln!("  failed: {f}");
            }
            summary.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
