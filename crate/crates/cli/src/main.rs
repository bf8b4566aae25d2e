//! `zetalab` command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use clap::{Parser, Subcommand};
use config::RunConfig;
use error::CliError;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "zetalab", version, about = "Joint moments of zeta and Hardy's Z on the critical line")]
struct Cli {
    /// TOML file with default parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Increment scheme CSV (j, T_j, P_j, range_prime_count); `--J` also dumps N_j.
    Scheme(RunConfig),
    /// Z, Z', theta, theta', zeta and zeta' at the requested heights.
    Eval(RunConfig),
    /// Joint moment estimates.
    Moments(RunConfig),
    /// Interpolation inequality on a seeded grid, or `--holder` for the Hoelder bound.
    Inequality(RunConfig),
    /// Direct and contour values of the twisted moments.
    Twisted(RunConfig),
    /// Fast invariant suite.
    Selftest(RunConfig),
}

fn emit(cfg: &RunConfig, csv: &str) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => std::fs::write(path, csv)?,
        None => std::io::stdout().lock().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (flags, name) = match cli.command {
        Command::Scheme(c) => (c, "scheme"),
        Command::Eval(c) => (c, "eval"),
        Command::Moments(c) => (c, "moments"),
        Command::Inequality(c) => (c, "inequality"),
        Command::Twisted(c) => (c, "twisted"),
        Command::Selftest(c) => (c, "selftest"),
    };
    let cfg = match &cli.config {
        Some(path) => flags.merge(RunConfig::load(path)?),
        None => flags,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    pool.install(|| {
        let csv = match name {
            "scheme" => commands::scheme(&cfg)?,
            "eval" => commands::eval(&cfg)?,
            "moments" => commands::moments(&cfg)?,
            "inequality" => commands::inequality(&cfg)?,
            "twisted" => commands::twisted(&cfg)?,
            _ => {
                let (csv, failed) = commands::selftest(&cfg)?;
                emit(&cfg, &csv)?;
                if failed.is_empty() {
                    return Ok(());
                }
                return Err(CliError::Failed(format!("selftest checks failed: {}", failed.join(" "))));
            }
        };
        emit(&cfg, &csv)
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report_line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
