//! `stein-audit`: bounds, Stein-solution verification, Monte Carlo audits and
//! self-checks from the command line.
//!
//! Exit codes: 0 pass, 1 audit or verification failure, 2 usage or config error.

mod audit;
mod bound;
mod config;
mod output;
mod selfcheck;
mod verify;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use output::{Format, Report};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

const THREADS_ENV: &str = "STEIN_AUDIT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "stein-audit", version, about = "Stein's-method bounds and their numerical audits")]
struct Cli {
    /// Write the machine-readable report here (`-` for stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, global = true, default_value = "csv")]
    format: Format,

    /// Worker threads; defaults to $STEIN_AUDIT_THREADS, then to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Omit the timestamp so reports are byte-for-byte reproducible.
    #[arg(long, global = true)]
    deterministic: bool,

    /// Master seed for anything random; overrides config files.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a distance bound.
    Bound(bound::BoundArgs),
    /// Check Stein-equation residuals and derivative bounds on a grid.
    VerifySolution(verify::VerifyArgs),
    /// Monte Carlo audit of the chi-square bounds.
    Audit(audit::AuditArgs),
    /// Run the built-in inequality suites and constant reproductions.
    Selfcheck(selfcheck::SelfcheckArgs),
}

/// Anything that should end the process with status 2.
#[derive(Debug)]
struct UsageError(anyhow::Error);

fn threads(flag: Option<usize>) -> Result<Option<usize>> {
    if let Some(t) = flag {
        return Ok(Some(t));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .with_context(|| format!("{THREADS_ENV} must be a positive integer, got '{v}'")),
        Err(_) => Ok(None),
    }
}

/// Settings shared by every subcommand.
pub struct Globals {
    pub seed: Option<u64>,
}

fn run(cli: Cli) -> std::result::Result<bool, UsageError> {
    let n = threads(cli.threads).map_err(UsageError)?;
    if let Some(n) = n {
        if n == 0 {
            return Err(UsageError(anyhow::anyhow!("the thread count must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")
            .map_err(UsageError)?;
    }
    let ctx = Globals { seed: cli.seed };
    let report: Report = match cli.command {
        Command::Bound(a) => bound::run(a, &ctx),
        Command::VerifySolution(a) => verify::run(a, &ctx),
        Command::Audit(a) => audit::run(a, &ctx),
        Command::Selfcheck(a) => match selfcheck::run(a) {
            Ok(Some(r)) => Ok(r),
            Ok(None) => return Ok(true),
            Err(e) => Err(e),
        },
    }
    .map_err(UsageError)?;
    let to_stdout = cli.out.as_deref().is_some_and(|p| p.as_os_str() == "-");
    for line in &report.summary {
        if to_stdout {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    if let Some(path) = &cli.out {
        let timestamp = (!cli.deterministic).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        });
        report.write(path, cli.format, timestamp).map_err(UsageError)?;
    }
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(UsageError(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
