use crate::error::{Error, Result};
use crate::functionals::ProxFunctional;
use crate::linalg::{check_dim, LinearOperator, Vector};
use crate::trace::{IterTrace, Recorder, SolveStatus};

use super::{CompositeProblem, SolverConfig};

/// Relative tolerance and iteration cap for the `‖A‖` estimate behind the step rule.
const NORM_TOL: f64 = 1e-12;
const NORM_MAX_ITER: usize = 10_000;

/// One primal-dual extragradient step; returns `(x⁺, y⁺)`.
pub(crate) fn pdhg_step(
    f: &ProxFunctional,
    g: &ProxFunctional,
    a: Option<&LinearOperator>,
    tau: f64,
    sigma: f64,
    x: &Vector,
    y: &Vector,
) -> Result<(Vector, Vector)> {
    let aty = a.map_or_else(|| y.clone(), |a| a.adjoint_apply(y));
    let x_next = f.prox(tau, &x.axpy(-tau, &aty))?;
    let xbar = &x_next.scale(2.0) - x;
    let axbar = a.map_or_else(|| xbar.clone(), |a| a.apply(&xbar));
    let y_next = g.prox_conjugate(sigma, &y.axpy(sigma, &axbar))?;
    Ok((x_next, y_next))
}

/// Checks `στ‖A‖² < 1` and returns the product.
pub fn check_step_condition(a: Option<&LinearOperator>, tau: f64, sigma: f64) -> Result<f64> {
    let norm = a.map_or(1.0, |a| a.op_norm(NORM_TOL, NORM_MAX_ITER).value);
    let product = sigma * tau * norm * norm;
    if product < 1.0 {
        Ok(product)
    } else {
        Err(Error::StepCondition { product })
    }
}

/// Primal-dual extragradient method for `min F(x) + G(Ax)`:
///
/// ```text
/// x^{k+1} = prox_{τF}(x^k − τA*y^k)
/// x̄^{k+1} = 2x^{k+1} − x^k
/// y^{k+1} = prox_{σG*}(y^k + σAx̄^{k+1})
/// ```
///
/// The dual prox is computed from `G`'s prox via the Moreau identity. Steps
/// come from `cfg.tau`/`cfg.sigma` (default `0.99/‖A‖` each) and must satisfy
/// `στ‖A‖² < 1`; otherwise [`Error::StepCondition`] is returned before any
/// iteration. Stops at the first `(x^k, y^k)` whose step length and duality
/// gap are both at most `tol`.
pub fn primal_dual(
    p: &CompositeProblem,
    x0: &Vector,
    y0: &Vector,
    cfg: &SolverConfig,
) -> Result<(Vector, Vector, IterTrace)> {
    cfg.validate()?;
    let f = p
        .f_prox
        .as_ref()
        .ok_or(Error::MissingTerm("F as a catalog functional"))?;
    let a = p.a.as_ref();
    if let Some(a) = a {
        check_dim(a.input_dim(), x0.len())?;
        check_dim(a.output_dim(), y0.len())?;
    } else {
        check_dim(x0.len(), y0.len())?;
    }
    f.check_dim(x0.len())?;
    p.g.check_dim(y0.len())?;
    let (tau, sigma) = match (cfg.tau, cfg.sigma) {
        (Some(t), Some(s)) => (t, s),
        (t, s) => {
            let norm = a.map_or(1.0, |a| a.op_norm(NORM_TOL, NORM_MAX_ITER).value);
            let default = if norm > 0.0 { 0.99 / norm } else { 1.0 };
            (t.unwrap_or(default), s.unwrap_or(default))
        }
    };
    check_step_condition(a, tau, sigma)?;

    let mut rec = Recorder::new(cfg.keep_iterates, cfg.reference.clone());
    let (mut x, mut y) = (x0.clone(), y0.clone());
    for k in 0..=cfg.max_iter {
        let (x_next, y_next) = pdhg_step(f, &p.g, a, tau, sigma, &x, &y)?;
        let residual = (x.distance(&x_next).powi(2) + y.distance(&y_next).powi(2)).sqrt();
        let gap = p.duality_gap(&x, &y)?;
        rec.record(k, &x, p.objective(&x)?, residual, Some(gap), tau);
        if residual <= cfg.tol && gap <= cfg.tol {
            return Ok((x, y, rec.finish(SolveStatus::Converged)));
        }
        if !x_next.is_finite() || !y_next.is_finite() {
            return Ok((x, y, rec.finish(SolveStatus::Diverged)));
        }
        if k < cfg.max_iter {
            (x, y) = (x_next, y_next);
        }
    }
    Ok((x, y, rec.finish(SolveStatus::MaxIterations)))
}
