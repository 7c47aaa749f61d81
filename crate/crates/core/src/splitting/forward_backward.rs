use crate::error::{Error, Result};
use crate::functionals::{ext_add, ProxFunctional, SmoothFunction};
use crate::linalg::{Matrix, Vector};
use crate::trace::{IterTrace, Recorder, SolveStatus};

use super::{CompositeProblem, SolverConfig};

/// Smallest step the line search will try, relative to the initial step.
const LINE_SEARCH_FLOOR: f64 = 1e-16;

struct Setup<'a> {
    f: &'a SmoothFunction,
    g: &'a ProxFunctional,
    gamma0: f64,
}

fn setup<'a>(p: &'a CompositeProblem, x0: &Vector, cfg: &SolverConfig) -> Result<Setup<'a>> {
    cfg.validate()?;
    let f = p.smooth.as_ref().ok_or(Error::MissingTerm("smooth F"))?;
    if let Some(a) = &p.a {
        if *a.matrix() != Matrix::identity(a.input_dim()) {
            return Err(Error::InvalidParameter {
                name: "A",
                reason: "gradient methods need A = identity; use primal_dual".into(),
            });
        }
    }
    let x0_dim = x0.len();
    crate::linalg::check_dim(f.dim(), x0_dim)?;
    p.g.check_dim(x0_dim)?;
    let gamma0 = match (cfg.step, f.lipschitz()) {
        (Some(s), _) => s,
        (None, Some(l)) => 1.0 / l,
        (None, None) if cfg.line_search => 1.0,
        (None, None) => return Err(Error::MissingTerm("Lipschitz constant, explicit step, or line search")),
    };
    Ok(Setup { f, g: &p.g, gamma0 })
}

/// One forward-backward step from `x`, optionally backtracking on the
/// descent inequality `F(x⁺) ≤ F(x) + ⟨∇F(x), x⁺ − x⟩ + ‖x⁺ − x‖²/(2γ)`.
fn step(s: &Setup, x: &Vector, mut gamma: f64, line_search: bool, iteration: usize) -> Result<(Vector, f64)> {
    let grad = s.f.gradient_unchecked(x);
    let fx = s.f.value_unchecked(x);
    loop {
        let next = s.g.prox(gamma, &x.axpy(-gamma, &grad))?;
        if !line_search {
            return Ok((next, gamma));
        }
        let d = &next - x;
        let model = fx + grad.dot(&d) + d.norm_sq() / (2.0 * gamma);
        if s.f.value_unchecked(&next) <= model + 1e-14 * fx.abs().max(1.0) {
            return Ok((next, gamma));
        }
        gamma *= 0.5;
        if gamma < LINE_SEARCH_FLOOR * s.gamma0 {
            return Err(Error::LineSearchUnderflow { iteration, step: gamma });
        }
    }
}

fn objective(s: &Setup, x: &Vector) -> f64 {
    ext_add(s.f.value_unchecked(x), s.g.value(x).unwrap_or(f64::INFINITY))
}

/// Proximal gradient `x^{k+1} = prox_{γ_k G}(x^k − γ_k∇F(x^k))` for
/// `min F + G` with smooth `F`.
///
/// The step is `cfg.step`, else `1/L`. With `cfg.line_search` it is halved
/// until the descent inequality holds, and the next iterate starts from
/// twice the accepted step, capped at the initial one. Stops at the first
/// `x^k` whose step length `‖x^k − x^{k+1}‖` is at most `tol`.
/// With `cfg.fista` set this runs [`fista`] instead.
pub fn prox_gradient(p: &CompositeProblem, x0: &Vector, cfg: &SolverConfig) -> Result<(Vector, IterTrace)> {
    if cfg.fista {
        return fista(p, x0, cfg);
    }
    let s = setup(p, x0, cfg)?;
    let mut rec = Recorder::new(cfg.keep_iterates, cfg.reference.clone());
    let mut x = x0.clone();
    let mut gamma = s.gamma0;
    for k in 0..=cfg.max_iter {
        let (next, used) = step(&s, &x, gamma, cfg.line_search, k)?;
        let residual = x.distance(&next);
        rec.record(k, &x, objective(&s, &x), residual, None, used);
        if residual <= cfg.tol {
            return Ok((x, rec.finish(SolveStatus::Converged)));
        }
        if !next.is_finite() {
            return Ok((x, rec.finish(SolveStatus::Diverged)));
        }
        if k < cfg.max_iter {
            x = next;
            gamma = if cfg.line_search {
                (2.0 * used).min(s.gamma0)
            } else {
                used
            };
        }
    }
    Ok((x, rec.finish(SolveStatus::MaxIterations)))
}

/// Next momentum parameter, `τ_{k+1} = (1 + √(1 + 4τ_k²))/2`.
pub fn fista_tau(tau: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * tau * tau).sqrt())
}

/// Accelerated proximal gradient (FISTA):
///
/// ```text
/// x^{k+1} = prox_{γG}(x̄^k − γ∇F(x̄^k))
/// x̄^{k+1} = x^{k+1} + ((1 − τ_k)/τ_{k+1})(x^k − x^{k+1}),   τ_0 = 1
/// ```
///
/// Row `k` of the trace reports `J(x^k)` and the fixed-point residual
/// `‖x̄^k − x^{k+1}‖`; on convergence the certified point `x̄^k` is returned.
/// With line search the step only shrinks. The momentum sequence is kept in
/// [`IterTrace::momentum`].
pub fn fista(p: &CompositeProblem, x0: &Vector, cfg: &SolverConfig) -> Result<(Vector, IterTrace)> {
    let s = setup(p, x0, cfg)?;
    let mut rec = Recorder::new(cfg.keep_iterates, cfg.reference.clone());
    let mut x = x0.clone();
    let mut xbar = x0.clone();
    let mut tau = 1.0;
    let mut gamma = s.gamma0;
    rec.momentum(tau);
    for k in 0..=cfg.max_iter {
        let (next, used) = step(&s, &xbar, gamma, cfg.line_search, k)?;
        let residual = xbar.distance(&next);
        rec.record(k, &x, objective(&s, &x), residual, None, used);
        if residual <= cfg.tol {
            return Ok((xbar, rec.finish(SolveStatus::Converged)));
        }
        if !next.is_finite() {
            return Ok((x, rec.finish(SolveStatus::Diverged)));
        }
        if k == cfg.max_iter {
            break;
        }
        let tau_next = fista_tau(tau);
        xbar = next.axpy((1.0 - tau) / tau_next, &(&x - &next));
        x = next;
        tau = tau_next;
        gamma = used;
        rec.momentum(tau);
    }
    Ok((x, rec.finish(SolveStatus::MaxIterations)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::LinearOperator;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x)
    }

    fn trivial() -> CompositeProblem {
        CompositeProblem::smooth_plus(SmoothFunction::squared_distance(v(&[1.0, 2.0])), ProxFunctional::Zero)
    }

    #[test]
    fn unit_step_solves_least_distance_in_one_step() {
        let cfg = SolverConfig::new(10, 1e-14).with_step(1.0);
        let (x, trace) = prox_gradient(&trivial(), &Vector::zeros(2), &cfg).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0]);
        assert_eq!(trace.iterations(), 1);
        let (x, trace) = fista(&trivial(), &Vector::zeros(2), &cfg).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 2.0]);
        assert_eq!(trace.iterations(), 1);
    }

    #[test]
    fn two_dim_lasso() {
        let p = CompositeProblem::smooth_plus(SmoothFunction::squared_distance(v(&[3.0, 0.5])), ProxFunctional::l1());
        let cfg = SolverConfig::new(100, 1e-12);
        let (x, _) = prox_gradient(&p, &Vector::zeros(2), &cfg).unwrap();
        assert_eq!(x.as_slice(), &[2.0, 0.0]);
    }

    #[test]
    fn tau_sequence() {
        assert!((fista_tau(1.0) - 1.618_033_988_7).abs() < 1e-10);
    }

    #[test]
    fn line_search_finds_a_step_without_lipschitz() {
        let a = LinearOperator::new(Matrix::diag(&[1.0, 4.0]));
        let f = SmoothFunction::least_squares(a, v(&[1.0, 1.0]))
            .unwrap()
            .without_lipschitz();
        let p = CompositeProblem::smooth_plus(f, ProxFunctional::Zero);
        let cfg = SolverConfig::new(2000, 1e-12).with_line_search();
        let (x, trace) = prox_gradient(&p, &Vector::zeros(2), &cfg).unwrap();
        assert!(trace.is_converged());
        assert!(x.distance(&v(&[1.0, 0.25])) < 1e-10);
        let objs = trace.objectives();
        assert!(objs.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn missing_step_information_is_an_error() {
        let f = SmoothFunction::squared_distance(v(&[1.0])).without_lipschitz();
        let p = CompositeProblem::smooth_plus(f, ProxFunctional::Zero);
        assert!(matches!(
            prox_gradient(&p, &v(&[0.0]), &SolverConfig::default()),
            Err(Error::MissingTerm(_))
        ));
    }

    #[test]
    fn non_identity_operator_rejected() {
        let mut p = trivial();
        p.a = Some(LinearOperator::new(Matrix::diag(&[1.0, 2.0])));
        assert!(prox_gradient(&p, &Vector::zeros(2), &SolverConfig::default()).is_err());
    }
}
