use clap::ValueEnum;
use proxkit::functionals::ProxFunctional;
use proxkit::linalg::{LinearOperator, Matrix, Vector};
use proxkit::newton::{continuation, control_ssn, l1_ssn, ssn_solve, ContinuationSchedule, L1_SSN_STEP_FACTOR};
use proxkit::problems::{kkt_residual, ProblemSpec};
use proxkit::splitting::{
    douglas_rachford, fista, primal_dual, prox_gradient, CompositeProblem, LeastSquaresTerm, SolverConfig,
};
use proxkit::trace::IterTrace;
use proxkit::Error;
use serde::Serialize;

use crate::failure::{CmdResult, Failure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    #[value(name = "prox_gradient", alias = "pg")]
    ProxGradient,
    Fista,
    #[value(alias = "douglas_rachford")]
    Dr,
    #[value(alias = "primal_dual")]
    Pdhg,
    Ssn,
    #[value(name = "my_ssn")]
    MySsn,
}

impl SolverKind {
    pub const ALL: [SolverKind; 6] = [
        SolverKind::ProxGradient,
        SolverKind::Fista,
        SolverKind::Dr,
        SolverKind::Pdhg,
        SolverKind::Ssn,
        SolverKind::MySsn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::ProxGradient => "prox_gradient",
            SolverKind::Fista => "fista",
            SolverKind::Dr => "dr",
            SolverKind::Pdhg => "pdhg",
            SolverKind::Ssn => "ssn",
            SolverKind::MySsn => "my_ssn",
        }
    }

    pub fn supports(self, spec: &ProblemSpec) -> bool {
        match self {
            SolverKind::ProxGradient | SolverKind::Fista => true,
            SolverKind::Dr | SolverKind::Pdhg | SolverKind::MySsn => matches!(spec, ProblemSpec::Lasso { .. }),
            SolverKind::Ssn => !matches!(spec, ProblemSpec::BoxQp { .. }),
        }
    }

    pub fn check_supports(self, spec: &ProblemSpec) -> CmdResult {
        if self.supports(spec) {
            Ok(())
        } else {
            Err(Failure::usage(format!(
                "solver {} does not apply to {} problems",
                self.name(),
                spec.kind_name()
            )))
        }
    }
}

/// Everything a run needs besides the problem.
#[derive(Clone, Debug, Serialize)]
pub struct SolverOptions {
    pub config: SolverConfig,
    /// Newton regularization `γ` (`ssn`) or the first continuation value (`my_ssn`).
    pub gamma: Option<f64>,
    /// Last continuation value for `my_ssn`.
    pub gamma_floor: f64,
    /// FISTA iterations run before a Newton method starts.
    pub warm_start: usize,
}

pub struct Outcome {
    pub x: Vector,
    pub dual: Option<Vector>,
    pub trace: IterTrace,
}

pub fn lasso_parts(spec: &ProblemSpec) -> Option<(&Matrix, &Vector, f64)> {
    match spec {
        ProblemSpec::Lasso { a, b, alpha, .. } => Some((a, b, *alpha)),
        _ => None,
    }
}

fn lipschitz(spec: &ProblemSpec) -> CmdResult<f64> {
    spec.smooth_part()
        .map_err(Failure::config)?
        .lipschitz()
        .ok_or_else(|| Failure::config(Error::MissingTerm("Lipschitz constant of F")))
}

/// Step `γ` used by `ssn` on a lasso problem when none is given.
pub fn default_ssn_gamma(spec: &ProblemSpec) -> CmdResult<f64> {
    Ok(L1_SSN_STEP_FACTOR / lipschitz(spec)?)
}

/// Point reached by `iters` FISTA steps from the origin.
///
/// Newton methods converge locally; on underdetermined problems the first
/// active set from a cold start can be too large for the Newton system to be
/// solvable, while a few first-order steps avoid this.
pub fn warm_start(spec: &ProblemSpec, iters: usize) -> CmdResult<Vector> {
    let x0 = Vector::zeros(spec.dim());
    if iters == 0 {
        return Ok(x0);
    }
    let p = spec.composite().map_err(Failure::config)?;
    // tol must be positive; the smallest positive value never stops the run early
    let cfg = SolverConfig::new(iters, f64::MIN_POSITIVE);
    Ok(fista(&p, &x0, &cfg).map_err(Failure::solving)?.0)
}

pub fn run(spec: &ProblemSpec, solver: SolverKind, opts: &SolverOptions) -> CmdResult<Outcome> {
    solver.check_supports(spec)?;
    opts.config.validate().map_err(Failure::config)?;
    let n = spec.dim();
    let x0 = Vector::zeros(n);
    let newton_x0 = match solver {
        SolverKind::Ssn | SolverKind::MySsn => warm_start(spec, opts.warm_start)?,
        _ => x0.clone(),
    };
    let cfg = &opts.config;
    let primal = |r: proxkit::Result<(Vector, IterTrace)>| {
        r.map(|(x, trace)| Outcome { x, dual: None, trace })
            .map_err(Failure::solving)
    };
    match solver {
        SolverKind::ProxGradient => primal(prox_gradient(&spec.composite().map_err(Failure::config)?, &x0, cfg)),
        SolverKind::Fista => primal(fista(&spec.composite().map_err(Failure::config)?, &x0, cfg)),
        SolverKind::Dr => {
            let (a, b, alpha) = lasso_parts(spec).expect("checked above");
            let cfg = match cfg.step {
                Some(_) => cfg.clone(),
                None => cfg.clone().with_step(1.0 / lipschitz(spec)?),
            };
            let f = LeastSquaresTerm::new(LinearOperator::new(a.clone()), b.clone()).map_err(Failure::config)?;
            primal(douglas_rachford(&f, &ProxFunctional::L1 { weight: alpha }, &x0, &cfg))
        }
        SolverKind::Pdhg => {
            let (a, b, alpha) = lasso_parts(spec).expect("checked above");
            let p = CompositeProblem::split(
                ProxFunctional::L1 { weight: alpha },
                ProxFunctional::squared_distance(b.clone()),
                LinearOperator::new(a.clone()),
            );
            let (x, y, trace) = primal_dual(&p, &x0, &Vector::zeros(b.len()), cfg).map_err(Failure::solving)?;
            Ok(Outcome {
                x,
                dual: Some(y),
                trace,
            })
        }
        SolverKind::Ssn => match spec {
            ProblemSpec::Lasso { alpha, .. } => {
                let gamma = match opts.gamma {
                    Some(g) => g,
                    None => default_ssn_gamma(spec)?,
                };
                let f = spec.smooth_part().map_err(Failure::config)?;
                primal(l1_ssn(&f, *alpha, gamma, &newton_x0, cfg))
            }
            ProblemSpec::Control {
                s,
                z,
                alpha,
                lower,
                upper,
                ..
            } => primal(control_ssn(
                &LinearOperator::new(s.clone()),
                z,
                *alpha,
                (*lower, *upper),
                &newton_x0,
                cfg,
            )),
            ProblemSpec::HuberDenoise { .. } => {
                let f = spec.smooth_part().map_err(Failure::config)?;
                primal(ssn_solve(
                    |x| f.gradient(x),
                    |x| f.hessian(x)?.ok_or(Error::MissingTerm("Hessian of F")),
                    &newton_x0,
                    cfg,
                ))
            }
            ProblemSpec::BoxQp { .. } => unreachable!("checked above"),
        },
        SolverKind::MySsn => {
            let (_, _, alpha) = lasso_parts(spec).expect("checked above");
            let schedule =
                ContinuationSchedule::halving(opts.gamma.unwrap_or(1.0), opts.gamma_floor).map_err(Failure::config)?;
            let f = spec.smooth_part().map_err(Failure::config)?;
            primal(continuation(&f, alpha, &schedule, &newton_x0, cfg))
        }
    }
}

/// KKT residual of a run's answer on the original problem.
pub fn certify(spec: &ProblemSpec, outcome: &Outcome) -> CmdResult<f64> {
    kkt_residual(spec, &outcome.x, outcome.dual.as_ref()).map_err(Failure::solving)
}
