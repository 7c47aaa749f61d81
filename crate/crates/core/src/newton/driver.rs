use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::splitting::SolverConfig;
use crate::trace::{IterTrace, Recorder, SolveStatus};

use super::NewtonSystem;

/// Growth of `‖Φ(x^k)‖` over `‖Φ(x^0)‖` treated as divergence.
pub const DIVERGENCE_FACTOR: f64 = 1e6;

/// Errors below this multiple of machine epsilon (relative to `max(1, ‖x_ref‖)`)
/// are noise for [`superlinear_diagnostic`].
pub const NOISE_FLOOR_FACTOR: f64 = 1e3;

pub(crate) type Correction<'a> = &'a dyn Fn(&Vector, &mut Vector);

/// The Newton loop shared by all semismooth solvers.
///
/// `objective` fills the trace's objective column (defaults to `½‖Φ‖²`);
/// `correct(x_old, x_new)` may adjust the new iterate after each step.
pub(crate) fn newton_loop(
    residual: &dyn Fn(&Vector) -> Result<Vector>,
    derivative: &dyn Fn(&Vector) -> Result<Matrix>,
    objective: Option<&dyn Fn(&Vector) -> f64>,
    correct: Option<Correction>,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<(Vector, IterTrace)> {
    cfg.validate()?;
    let mut rec = Recorder::new(true, cfg.reference.clone());
    let mut x = x0.clone();
    let mut r = residual(&x)?;
    crate::linalg::check_dim(x.len(), r.len())?;
    let r0 = r.norm();
    for k in 0..=cfg.max_iter {
        let rn = r.norm();
        let obj = objective.map_or(0.5 * rn * rn, |f| f(&x));
        rec.record(k, &x, obj, rn, None, 1.0);
        if rn <= cfg.tol {
            return Ok((x, rec.finish(SolveStatus::Converged)));
        }
        if !rn.is_finite() || rn > DIVERGENCE_FACTOR * r0 {
            return Ok((x, rec.finish(SolveStatus::Diverged)));
        }
        if k == cfg.max_iter {
            break;
        }
        let wrap = |source: Error| Error::NewtonStep {
            iteration: k,
            source: Box::new(source),
        };
        let m = derivative(&x).map_err(wrap)?;
        let sol = NewtonSystem::new(m, -&r).and_then(|s| s.solve()).map_err(wrap)?;
        rec.condition(sol.condition);
        let mut next = &x + &sol.step;
        if let Some(c) = correct {
            c(&x, &mut next);
        }
        if !next.is_finite() {
            return Ok((x, rec.finish(SolveStatus::Diverged)));
        }
        x = next;
        r = residual(&x)?;
    }
    Ok((x, rec.finish(SolveStatus::MaxIterations)))
}

/// Semismooth Newton method `x^{k+1} = x^k − D_NΦ(x^k)⁻¹Φ(x^k)` for a
/// user-supplied residual `Φ` and Newton derivative.
///
/// Stops at the first `x^k` with `‖Φ(x^k)‖ ≤ tol`. A residual that grows by
/// [`DIVERGENCE_FACTOR`] is flagged as [`SolveStatus::Diverged`]; a Newton
/// system that cannot be solved is an [`Error::NewtonStep`]. Iterates are
/// always stored, and the objective column holds `½‖Φ(x^k)‖²`.
pub fn ssn_solve(
    residual: impl Fn(&Vector) -> Result<Vector>,
    derivative: impl Fn(&Vector) -> Result<Matrix>,
    x0: &Vector,
    cfg: &SolverConfig,
) -> Result<(Vector, IterTrace)> {
    newton_loop(&residual, &derivative, None, None, x0, cfg)
}

/// Error ratios `e_{k+1}/e_k` with `e_k = ‖x^k − x_ref‖`.
///
/// The sequence is cut at the first `e_k` below the noise floor
/// `1e3·ε·max(1, ‖x_ref‖)`, that ratio included. If the floor is never
/// reached, at least three iterates are needed, otherwise
/// [`Error::DiagnosticUnavailable`] is returned.
pub fn superlinear_diagnostic(trace: &IterTrace, x_ref: &Vector) -> Result<Vec<f64>> {
    let floor = NOISE_FLOOR_FACTOR * f64::EPSILON * x_ref.norm().max(1.0);
    let mut errors = Vec::new();
    let mut reached_floor = false;
    for x in &trace.iterates {
        crate::linalg::check_dim(x_ref.len(), x.len())?;
        let e = x.distance(x_ref);
        errors.push(e);
        if e < floor {
            reached_floor = true;
            break;
        }
    }
    if !reached_floor && errors.len() < 3 {
        return Err(Error::DiagnosticUnavailable { usable: errors.len() });
    }
    Ok(errors.windows(2).map(|w| w[1] / w[0]).collect())
}
