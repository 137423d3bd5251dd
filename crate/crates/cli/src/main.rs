//! `zerovisc` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure (a
//! `diagnostics.json` is written to the output directory).

mod commands;
mod report_data;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "zerovisc", version, about = "Vanishing-viscosity solvers and sweep harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// JSON configuration file; defaults are used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Add the epsilon = 0.0125 octave to a sweep.
    #[arg(long)]
    pub long: bool,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Outer Euler flow with a slip wall.
    SolveEuler(Common),
    /// Outer flow, its wall traces and the leading-order boundary layer.
    SolvePrandtl(Common),
    /// Every expansion piece and the composed approximate solution.
    BuildAnsatz(Common),
    /// Navier-Stokes run at the configured epsilon.
    SolveNs(Common),
    /// Full pipeline over the epsilon sweep with rate fits.
    Sweep(Common),
    /// Hardy, recovery and product inequality corpora.
    VerifyLemmas(Common),
    /// Figure-ready tables from a finished sweep directory.
    ReportData {
        /// Directory holding `results.json` and the sweep checkpoints.
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

/// Failure classes mapped to exit codes.
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl From<zerovisc::Error> for Failure {
    fn from(e: zerovisc::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::SolveEuler(c) => commands::solve_euler(c),
        Command::SolvePrandtl(c) => commands::solve_prandtl(c),
        Command::BuildAnsatz(c) => commands::build_ansatz(c),
        Command::SolveNs(c) => commands::solve_ns(c),
        Command::Sweep(c) => commands::sweep(c),
        Command::VerifyLemmas(c) => commands::verify_lemmas(c),
        Command::ReportData { input, common } => report_data::run(input, common),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}
