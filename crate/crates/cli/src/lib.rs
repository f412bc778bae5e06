//! Command-line harness for the polynomial progression kernels.

pub mod acceptance;
pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use anyhow::Result;
use args::{Cli, Command};
use clap::error::ErrorKind;
use clap::Parser;
use ffprog_core::{par, rng};
use output::Emitter;
use serde_json::{json, Value};
use std::ffi::OsString;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILED_CHECK: i32 = 2;

/// `--jobs`, else `FFPROG_JOBS`, else `None` for the default pool.
fn jobs(cli: &Cli) -> Result<Option<usize>> {
    if let Some(j) = cli.jobs {
        return Ok(Some(j));
    }
    match std::env::var("FFPROG_JOBS") {
        Ok(v) if !v.trim().is_empty() => {
            let j: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("FFPROG_JOBS = '{v}' is not a thread count"))?;
            Ok(Some(j))
        }
        _ => Ok(None),
    }
}

fn fresh_seed() -> u64 {
    let nanos = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_nanos() as u64).unwrap_or(0);
    rng::derive_seed(nanos, u64::from(std::process::id()))
}

fn config_echo(cli: &Cli) -> Result<Value> {
    let args = match &cli.command {
        Command::Count(a) => serde_json::to_value(a)?,
        Command::Norms(a) => serde_json::to_value(a)?,
        Command::WeilScan(a) => serde_json::to_value(a)?,
        Command::BaseScan(a) => serde_json::to_value(a)?,
        Command::Extremal(a) => serde_json::to_value(a)?,
        Command::Decompose(a) => serde_json::to_value(a)?,
        Command::Schedule(a) => serde_json::to_value(a)?,
        Command::CsCheck(a) => serde_json::to_value(a)?,
        Command::VerifyTheorem(a) => serde_json::to_value(a)?,
        Command::Acceptance(a) => serde_json::to_value(a)?,
    };
    Ok(json!({ "command": cli.command.name(), "args": args }))
}

fn dispatch(cli: &Cli, em: &mut Emitter) -> Result<()> {
    match &cli.command {
        Command::Count(a) => commands::count(a, em),
        Command::Norms(a) => commands::norms(a, em),
        Command::WeilScan(a) => commands::weil_scan(a, em),
        Command::BaseScan(a) => commands::base_scan(a, em),
        Command::Extremal(a) => commands::extremal(a, em),
        Command::Decompose(a) => commands::decompose(a, em),
        Command::Schedule(a) => commands::schedule(a, em),
        Command::CsCheck(a) => commands::cs_check(a, em),
        Command::VerifyTheorem(a) => commands::verify_theorem(a, em),
        Command::Acceptance(a) => run_acceptance(a, em),
    }
}

fn run_acceptance(a: &args::AcceptanceArgs, em: &mut Emitter) -> Result<()> {
    let ids: Vec<u32> = match &a.only {
        Some(list) => commands::parse_list(list)?,
        None => acceptance::CRITERIA.iter().map(|c| c.0).collect(),
    };
    for id in ids {
        let outcome = acceptance::run(id, em.seed())?;
        eprintln!("{}", outcome.line());
        if !outcome.passed {
            em.fail(format!("criterion {id} ({})", outcome.name));
        }
        em.emit("criterion", &outcome)?;
    }
    Ok(())
}

/// Runs the tool on a full argument list and returns the exit code.
pub fn run<I: IntoIterator<Item = OsString>>(argv: I) -> i32 {
    let argv = match config::expand_config(argv.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let seed = cli.seed.unwrap_or_else(fresh_seed);
    let mut em = Emitter::new(cli.command.name(), seed, config_echo(cli)?, cli.out.as_deref(), cli.csv.as_deref(), cli.no_timing)?;
    let body = |em: &mut Emitter| dispatch(cli, em);
    match jobs(cli)? {
        Some(0) => anyhow::bail!("--jobs must be at least 1"),
        Some(j) => par::with_threads(j, || body(&mut em))?,
        None => body(&mut em)?,
    }
    em.finish()
}
