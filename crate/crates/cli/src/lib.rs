//! Command-line front end: TOML experiment configs, sweeps, reports and
//! pass/fail thresholds.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod thresholds;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{Outcome, RunOptions};
pub use config::{ExperimentConfig, LoadedConfig};
pub use error::{CliError, Result};

/// Process exit codes.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_OPERATIONAL: i32 = 1;
pub const EXIT_THRESHOLD: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "thinshell", version, about = "Thin two-phase shell eigenvalue experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Experiment config (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Size of the worker pool.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write sampled eigenfunctions at the finest epsilon.
    #[arg(long)]
    pub dump_eigenfunctions: bool,
    /// Compare against an independent reference computation.
    #[arg(long)]
    pub oracle_check: bool,
}

impl CommonArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            out: self.out.clone(),
            dump_eigenfunctions: self.dump_eigenfunctions,
            oracle_check: self.oracle_check,
            threads: self.threads,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interface eigenvalues with cluster ids.
    Spectrum(CommonArgs),
    /// Epsilon sweep, fits and thresholds.
    Sweep(CommonArgs),
    /// Sweep with transverse Fourier diagnostics.
    Diagnostics(CommonArgs),
    /// Parse and check a config without solving.
    ValidateConfig {
        #[arg(long)]
        config: PathBuf,
    },
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        // a pool that already exists (e.g. in tests) is left alone
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            if rayon::current_num_threads() != n {
                return Err(CliError::Threads(e.to_string()));
            }
        }
    }
    Ok(())
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::ValidateConfig { config } => LoadedConfig::load(config).map(|l| {
            println!("{}: ok ({})", config.display(), l.config.scenario);
            None
        }),
        Command::Spectrum(a) | Command::Sweep(a) | Command::Diagnostics(a) => {
            let opts = a.options();
            init_threads(opts.threads).and_then(|_| LoadedConfig::load(&a.config)).and_then(|l| {
                match &cli.command {
                    Command::Spectrum(_) => commands::spectrum(&l, &opts),
                    Command::Sweep(_) => commands::sweep(&l, &opts),
                    _ => commands::diagnostics(&l, &opts),
                }
                .map(Some)
            })
        }
    };
    match result {
        Ok(None) => EXIT_PASS,
        Ok(Some(o)) if o.passed() => {
            println!("all checks passed; output in {}", o.out_dir.display());
            EXIT_PASS
        }
        Ok(Some(o)) => {
            for v in &o.violations {
                eprintln!("violation: {v}");
            }
            EXIT_THRESHOLD
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_OPERATIONAL
        }
    }
}
