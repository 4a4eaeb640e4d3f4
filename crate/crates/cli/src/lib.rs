//! `cpnsurf`: identity verification, surface export and parameter scans.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::ScanKind;
use crate::config::{ConfigError, CurveKind, ModelConfig, Overrides, SheetSpec};

/// Exit code for a clean run.
pub const EXIT_OK: i32 = 0;
/// Exit code when an identity fails or a command errors at run time.
pub const EXIT_FAILURE: i32 = 1;
/// Exit code for an invalid configuration.
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cpnsurf", version, about = "Soliton surfaces of CP^(N-1) sigma models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the identity suite and write a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Only cases whose id starts with this prefix.
        #[arg(long, default_value = "")]
        filter: String,
    },
    /// Export X_k on a grid as CSV (and OBJ for N = 2).
    Surface {
        #[command(flatten)]
        common: Common,
    },
    /// Scan the spectral parameter or the wave speed and write CSV.
    Scan {
        #[arg(value_enum)]
        kind: ScanKind,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON model configuration; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub curve: Option<CurveKind>,
    /// Sheet index or "all".
    #[arg(long)]
    pub sheet: Option<SheetSpec>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Sample points per identity case.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Output file (verify, scan) or directory (surface); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn resolve(&self) -> Result<ModelConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(p) => ModelConfig::load(p)?,
            None => ModelConfig::default(),
        };
        cfg.apply(&Overrides {
            n: self.n,
            curve: self.curve,
            sheet: self.sheet,
            seed: self.seed,
            tolerance: self.tolerance,
            samples: self.samples,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<ConfigError>().is_some() {
        EXIT_CONFIG
    } else {
        EXIT_FAILURE
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Verify { common, filter } => {
            let cfg = common.resolve()?;
            let outcome = commands::verify(&cfg, filter, common.out.as_deref())?;
            let failed: Vec<&str> = outcome.failures().map(|r| r.id.as_str()).collect();
            eprintln!("{} cases, {} failed", outcome.reports.len(), failed.len());
            for id in &failed {
                eprintln!("  FAIL {id}");
            }
            Ok(if failed.is_empty() { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Surface { common } => {
            let cfg = common.resolve()?;
            for p in commands::surface(&cfg, common.out.as_deref())? {
                eprintln!("wrote {}", p.display());
            }
            Ok(EXIT_OK)
        }
        Command::Scan { kind, common } => {
            let cfg = common.resolve()?;
            commands::scan(&cfg, *kind, common.out.as_deref())?;
            Ok(EXIT_OK)
        }
    }
}

/// Run a parsed command line and return the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}
