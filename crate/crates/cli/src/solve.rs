use std::path::{Path, PathBuf};

use clap::Args;
use proxkit::problems::ProblemSpec;
use proxkit::splitting::SolverConfig;
use proxkit::trace::SolveStatus;
use serde::Serialize;

use crate::failure::{CmdResult, Failure};
use crate::output::{ensure_writable_dir, read_to_string, write_dir};
use crate::runner::{certify, run, SolverKind, SolverOptions};
use crate::Common;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem JSON written by `gen`.
    #[arg(long)]
    pub problem: PathBuf,
    #[arg(long, value_enum)]
    pub solver: SolverKind,
    /// Fixed step `γ` for prox_gradient, fista and dr.
    #[arg(long)]
    pub step: Option<f64>,
    /// Primal step of pdhg.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Dual step of pdhg.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Backtracking instead of a fixed step (prox_gradient, fista).
    #[arg(long)]
    pub line_search: bool,
    /// Newton regularization for ssn, or the starting value for my_ssn.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Final regularization value of the my_ssn continuation.
    #[arg(long, default_value_t = 1.0 / 1024.0)]
    pub gamma_floor: f64,
    /// FISTA iterations used to warm-start ssn and my_ssn.
    #[arg(long, default_value_t = 0)]
    pub warm_start: usize,
    /// Output directory for trace.csv, solution.json and manifest.json.
    /// Without it the solution JSON is printed to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Replace an existing output directory.
    #[arg(long)]
    pub force: bool,
}

/// What was asked for, stored next to the results.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub problem: PathBuf,
    pub solver: SolverKind,
    pub options: SolverOptions,
    pub out: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Debug, Serialize)]
struct Solution<'a> {
    solver: SolverKind,
    problem_kind: &'static str,
    status: SolveStatus,
    iterations: usize,
    objective: f64,
    kkt_residual: f64,
    final_residual: f64,
    x: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<&'a [f64]>,
}

pub fn load_problem(path: &Path) -> CmdResult<ProblemSpec> {
    let text = read_to_string(path)?;
    let spec = ProblemSpec::from_json(&text)
        .map_err(|e| Failure::Usage(anyhow::Error::new(e).context(format!("parsing {}", path.display()))))?;
    spec.validate().map_err(Failure::config)?;
    Ok(spec)
}

pub fn solver_config(common: &Common, args: &SolveArgs) -> SolverConfig {
    let mut cfg = SolverConfig::new(
        common.max_iter.unwrap_or(DEFAULT_MAX_ITER),
        common.tol.unwrap_or(DEFAULT_TOL),
    );
    cfg.step = args.step;
    cfg.tau = args.tau;
    cfg.sigma = args.sigma;
    cfg.line_search = args.line_search;
    cfg.seed = common.seed;
    cfg
}

pub fn cmd_solve(common: &Common, args: &SolveArgs) -> CmdResult {
    let manifest = RunManifest {
        problem: args.problem.clone(),
        solver: args.solver,
        options: SolverOptions {
            config: solver_config(common, args),
            gamma: args.gamma,
            gamma_floor: args.gamma_floor,
            warm_start: args.warm_start,
        },
        out: args.out.clone(),
        seed: common.seed,
    };
    manifest.options.config.validate().map_err(Failure::config)?;
    if let Some(out) = &args.out {
        ensure_writable_dir(out, args.force)?;
    }
    let spec = load_problem(&args.problem)?;
    args.solver.check_supports(&spec)?;

    let outcome = run(&spec, args.solver, &manifest.options)?;
    let trace = &outcome.trace;
    let solution = Solution {
        solver: args.solver,
        problem_kind: spec.kind_name(),
        status: trace.status,
        iterations: trace.iterations(),
        objective: spec.objective(&outcome.x).map_err(Failure::solving)?,
        kkt_residual: certify(&spec, &outcome)?,
        final_residual: trace.final_residual(),
        x: outcome.x.as_slice(),
        y: outcome.dual.as_ref().map(|y| y.as_slice()),
    };
    let solution_json = serde_json::to_string_pretty(&solution).map_err(|e| Failure::Runtime(e.into()))? + "\n";
    let summary = format!(
        "{} on {}: {:?} after {} iterations, objective {:.12e}, kkt residual {:.3e}",
        args.solver.name(),
        spec.kind_name(),
        trace.status,
        solution.iterations,
        solution.objective,
        solution.kkt_residual
    );

    match &args.out {
        Some(out) => {
            let manifest_json = serde_json::to_string_pretty(&manifest).map_err(|e| Failure::Runtime(e.into()))? + "\n";
            write_dir(
                out,
                &[
                    ("trace.csv", trace.to_csv()),
                    ("solution.json", solution_json),
                    ("manifest.json", manifest_json),
                ],
                args.force,
            )?;
            println!("{summary}");
            println!("wrote {}", out.display());
        }
        None => {
            print!("{solution_json}");
            eprintln!("{summary}");
        }
    }

    match trace.status {
        SolveStatus::Converged => Ok(()),
        status => Err(Failure::Unconverged(format!(
            "{} stopped with status {status:?} (residual {:.3e}, tol {:.1e})",
            args.solver.name(),
            trace.final_residual(),
            manifest.options.config.tol
        ))),
    }
}
