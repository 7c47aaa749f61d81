mod bench;
mod check;
mod failure;
mod gen;
mod output;
mod runner;
mod solve;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::failure::Failure;

/// Proximal splitting and semismooth Newton solvers for small dense problems.
#[derive(Debug, Parser)]
#[command(name = "proxkit", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Seed for generators and randomized checks.
    #[arg(long, global = true, env = "PROXKIT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Stopping tolerance.
    #[arg(long, global = true, env = "PROXKIT_TOL")]
    pub tol: Option<f64>,
    /// Iteration cap.
    #[arg(long, global = true, env = "PROXKIT_MAX_ITER")]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded problem instance as JSON.
    Gen(gen::GenArgs),
    /// Run one solver on a problem file.
    Solve(solve::SolveArgs),
    /// Run a named property suite and report the worst slack per invariant.
    Check(check::CheckArgs),
    /// Time every applicable solver on a problem file.
    Bench(bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen(args) => gen::cmd_gen(args, cli.common.seed),
        Command::Solve(args) => solve::cmd_solve(&cli.common, args),
        Command::Check(args) => check::cmd_check(&cli.common, args),
        Command::Bench(args) => bench::cmd_bench(&cli.common, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let label = match failure {
                Failure::Usage(_) => "error",
                Failure::Check(_) => "check failed",
                Failure::Unconverged(_) => "not converged",
                Failure::Runtime(_) => "error",
            };
            eprintln!("proxkit: {label}: {failure}");
            failure.exit_code()
        }
    }
}
