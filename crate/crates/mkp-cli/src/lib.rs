//! Command-line front end for the mKP solitary-wave pipeline: configuration
//! ingestion, verification orchestration, profile emission and
//! machine-readable reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{parse_tol, Format, RunConfig};
use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "mkp", version, about = "Solitary-wave solutions of the mKP equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Path of the TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output path (standard output when omitted; overrides the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format (overrides the config).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Number of grid-doubling refinement steps applied to the run grid.
    #[arg(long, default_value_t = 0)]
    pub refine: u32,
    /// Tolerance override `name=value` (repeatable; `verify` only).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tol: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form solitary wave on the grid and emit a profile.
    Solve(CommonArgs),
    /// Run the Darboux pipeline, emit a profile and closed-form comparison
    /// statistics.
    Pipeline(CommonArgs),
    /// Run the full verification suite and emit a report.
    Verify(CommonArgs),
    /// Classify the stability region and scan for denominator singularities.
    Scan(CommonArgs),
    /// Print the closed-form coefficients of a parameter set.
    Info(CommonArgs),
}

impl CommonArgs {
    fn load(&self) -> Result<(RunConfig, Format, Option<PathBuf>)> {
        let cfg = RunConfig::load(&self.config)?;
        let out_spec = cfg.output.clone();
        let format = self
            .format
            .or(out_spec.as_ref().and_then(|o| o.format))
            .unwrap_or(Format::Csv);
        let out = self.out.clone().or(out_spec.and_then(|o| o.path));
        Ok((cfg, format, out))
    }

    fn tol_flags(&self) -> Result<Vec<(String, f64)>> {
        self.tol.iter().map(|s| parse_tol(s)).collect()
    }
}

/// Runs a parsed command; the caller maps the error to the exit code.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let (cfg, format, out) = args.load()?;
            commands::solve(&cfg, args.refine, format, out.as_deref())
        }
        Command::Pipeline(args) => {
            let (cfg, format, out) = args.load()?;
            commands::pipeline(&cfg, args.refine, format, out.as_deref())
        }
        Command::Verify(args) => {
            let (cfg, _, out) = args.load()?;
            let tol = args.tol_flags()?;
            let report = commands::verify(&cfg, args.refine, &tol, out.as_deref())?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError::VerificationFailed(report.failing().join(", ")))
            }
        }
        Command::Scan(args) => {
            let (cfg, format, out) = args.load()?;
            commands::scan(&cfg, format, out.as_deref())
        }
        Command::Info(args) => {
            let (cfg, format, out) = args.load()?;
            commands::info(&cfg, format, out.as_deref())
        }
    }
}
