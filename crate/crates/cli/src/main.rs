//! `bethechain`: ground states, spectra, entropy profiles, U scans, circuit
//! export and self-verification for two fermions on a periodic chain.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage, 3 numerical failure,
//! 4 scan finished with failed points.

mod commands;
mod config;
mod exit;
mod output;
mod scan;
mod verify;

use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};
use exit::{Failure, OK, USAGE, VERIFY_FAILED};

#[derive(Parser, Debug)]
#[command(name = "bethechain", version, about = "Exact two-fermion eigenstates of the periodic chain as circuits and MPS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ground state report: energy, momenta, pair coefficients, entropies.
    Ground(CommonArgs),
    /// All N(N-1)/2 eigenstates as CSV, sorted by energy.
    Spectrum(CommonArgs),
    /// Block entropy S_L for L = 1..N-1 as CSV.
    EntropyProfile(CommonArgs),
    /// Half-chain and two-body entropies and the gap over a U grid.
    ScanU(CommonArgs),
    /// Gap E1 - E0 at one U or over a U grid.
    Gap(CommonArgs),
    /// Write Givens schedules, the pair cascade and the factors to --out.
    Decompose(CommonArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
}

#[derive(clap::Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Add N = 51 cases.
    #[arg(long)]
    extended: bool,

    #[arg(long, hide = true)]
    tamper_gate_sign: bool,
}

fn setup(cfg: &RunConfig) -> Result<(), Failure> {
    env_logger::Builder::new()
        .parse_filters(&cfg.log_level)
        .format_timestamp(None)
        .try_init()
        .ok();
    if let Some(t) = cfg.threads {
        if t == 0 {
            return Err(Failure::usage("--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn run_verify(args: &VerifyArgs, cfg: &RunConfig) -> i32 {
    let opts = verify::VerifyOptions::from_config(cfg, args.extended, args.tamper_gate_sign);
    let mut failed = 0;
    for suite in verify::run_all(&opts) {
        println!("{}: {} passed, {} failed", suite.name, suite.passed, suite.failures.len());
        for f in &suite.failures {
            eprintln!("{}: {f}", suite.name);
        }
        failed += suite.failures.len();
    }
    if failed > 0 {
        VERIFY_FAILED
    } else {
        OK
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let common = match &cli.command {
        Command::Ground(c)
        | Command::Spectrum(c)
        | Command::EntropyProfile(c)
        | Command::ScanU(c)
        | Command::Gap(c)
        | Command::Decompose(c) => c,
        Command::Verify(v) => &v.common,
    };
    let cfg = RunConfig::resolve(common)?;
    setup(&cfg)?;
    let start = Instant::now();
    let code = match &cli.command {
        Command::Ground(_) => commands::ground(&cfg).map(|_| OK)?,
        Command::Spectrum(_) => commands::spectrum(&cfg).map(|_| OK)?,
        Command::EntropyProfile(_) => commands::entropy_profile(&cfg).map(|_| OK)?,
        Command::ScanU(_) => scan::run(&cfg)?,
        Command::Gap(_) => commands::gap(&cfg).map(|_| OK)?,
        Command::Decompose(_) => commands::decompose_cmd(&cfg).map(|_| OK)?,
        Command::Verify(args) => run_verify(args, &cfg),
    };
    log::info!("finished in {:.2?}", start.elapsed());
    Ok(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE as u8 } else { OK as u8 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
