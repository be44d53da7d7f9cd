//! Command-line interface: `nqkr <evolve|theory|sweep|fit|table1|config>`.
//!
//! Settings are resolved as defaults, then the `--config` file, then the
//! individual flags, then `--set KEY=VALUE` pairs in order. Exit codes are
//! 0 on success, 1 for configuration or I/O errors and 2 for numerical
//! failures. `NQKR_THREADS` sets the worker-pool size.

pub mod commands;
pub mod config;
pub mod format;

pub use config::RunConfig;

use crate::error::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "nqkr",
    version,
    about = "Non-Hermitian quantum kicked rotor at quantum resonance"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate and write the observable series with theory columns.
    Evolve,
    /// Write the closed-form curves and second derivatives.
    Theory,
    /// Write (t, lambda) phase diagrams of the second derivatives.
    Sweep,
    /// Fit momentum distributions at the snapshot times.
    Fit,
    /// Long-time growth laws at phi = pi/2 and phi = pi.
    Table1,
    /// Print the resolved configuration.
    Config,
}

#[derive(Debug, Default, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<String>,
    /// Accepted for scripting symmetry; the program uses no randomness.
    #[arg(long, global = true)]
    pub seedless: bool,
    #[arg(long, global = true)]
    pub n_modes: Option<String>,
    #[arg(long, global = true)]
    pub t_max: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub phi: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kick_k: Option<String>,
    #[arg(long, global = true)]
    pub epsilon: Option<String>,
    /// Recording stride in kicks, or `auto`.
    #[arg(long, global = true)]
    pub record_every: Option<String>,
    /// Comma-separated snapshot times.
    #[arg(long, global = true)]
    pub snapshots: Option<String>,
    /// Also write the momentum distribution at each snapshot (evolve).
    #[arg(long, global = true)]
    pub write_snapshots: bool,
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl GlobalArgs {
    /// Resolves the configuration from defaults, file and flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        let flags = [
            ("out", &self.out),
            ("n_modes", &self.n_modes),
            ("t_max", &self.t_max),
            ("lambda", &self.lambda),
            ("phi", &self.phi),
            ("kick_k", &self.kick_k),
            ("epsilon", &self.epsilon),
            ("record_every", &self.record_every),
            ("snapshots", &self.snapshots),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        if self.write_snapshots {
            cfg.write_snapshots = true;
        }
        for pair in &self.set {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set {pair:?}: expected KEY=VALUE")))?;
            cfg.set(k.trim(), v)?;
        }
        Ok(cfg)
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("NQKR_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Error::Config(format!(
                "NQKR_THREADS = {value:?} is not a positive integer"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    configure_threads()?;
    let cfg = cli.global.resolve()?;
    match cli.command {
        Command::Evolve => commands::cmd_evolve(&cfg),
        Command::Theory => commands::cmd_theory(&cfg),
        Command::Sweep => commands::cmd_sweep(&cfg),
        Command::Fit => commands::cmd_fit(&cfg),
        Command::Table1 => commands::cmd_table1(&cfg),
        Command::Config => commands::cmd_config(&cfg),
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
