use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use proxkit::splitting::SolverConfig;

use crate::failure::{CmdResult, Failure};
use crate::output::write_file;
use crate::runner::{certify, run, SolverKind, SolverOptions};
use crate::solve::{load_problem, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::Common;

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub problem: PathBuf,
    /// Comma-separated solvers; defaults to every solver that applies.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub solvers: Vec<SolverKind>,
    /// Timed repetitions per solver; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub repeat: usize,
    /// Write the table as CSV to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

struct Row {
    solver: SolverKind,
    status: String,
    iterations: usize,
    objective: f64,
    kkt: f64,
    median_ms: f64,
}

pub fn cmd_bench(common: &Common, args: &BenchArgs) -> CmdResult {
    if args.repeat == 0 {
        return Err(Failure::usage("--repeat must be at least 1"));
    }
    let spec = load_problem(&args.problem)?;
    let solvers: Vec<SolverKind> = if args.solvers.is_empty() {
        SolverKind::ALL.into_iter().filter(|s| s.supports(&spec)).collect()
    } else {
        for s in &args.solvers {
            s.check_supports(&spec)?;
        }
        args.solvers.clone()
    };
    let mut config = SolverConfig::new(
        common.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        common.tol.unwrap_or(DEFAULT_TOL),
    );
    config.seed = common.seed;
    let opts = SolverOptions {
        config,
        gamma: None,
        gamma_floor: 1.0 / 1024.0,
        warm_start: 0,
    };

    let mut rows = Vec::new();
    for solver in solvers {
        let mut times = Vec::with_capacity(args.repeat);
        let mut last = None;
        for _ in 0..args.repeat {
            let start = Instant::now();
            let outcome = run(&spec, solver, &opts);
            times.push(start.elapsed().as_secs_f64() * 1e3);
            last = Some(outcome);
        }
        times.sort_by(f64::total_cmp);
        let median_ms = times[times.len() / 2];
        let row = match last.expect("repeat >= 1") {
            Ok(outcome) => Row {
                solver,
                status: format!("{:?}", outcome.trace.status).to_lowercase(),
                iterations: outcome.trace.iterations(),
                objective: spec.objective(&outcome.x).map_err(Failure::solving)?,
                kkt: certify(&spec, &outcome)?,
                median_ms,
            },
            Err(Failure::Unconverged(msg)) => Row {
                solver,
                status: format!("failed: {msg}"),
                iterations: 0,
                objective: f64::NAN,
                kkt: f64::NAN,
                median_ms,
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }

    let (m, n) = spec.dims();
    println!(
        "{} problem, n = {n}, m = {m}, tol {:.1e}",
        spec.kind_name(),
        opts.config.tol
    );
    println!(
        "{:<14} {:<14} {:>8} {:>22} {:>11} {:>11}",
        "solver", "status", "iters", "objective", "kkt", "median ms"
    );
    let mut csv = String::from("solver,status,iterations,objective,kkt_residual,median_ms\n");
    for r in &rows {
        println!(
            "{:<14} {:<14} {:>8} {:>22.14e} {:>11.3e} {:>11.3}",
            r.solver.name(),
            r.status,
            r.iterations,
            r.objective,
            r.kkt,
            r.median_ms
        );
        let _ = writeln!(
            csv,
            "{},{},{},{:.16e},{:.16e},{:.3}",
            r.solver.name(),
            r.status.replace(',', ";"),
            r.iterations,
            r.objective,
            r.kkt,
            r.median_ms
        );
    }
    if let Some(out) = &args.out {
        write_file(out, &csv)?;
    }
    Ok(())
}
