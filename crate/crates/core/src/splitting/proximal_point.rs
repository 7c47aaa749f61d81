use crate::error::Result;
use crate::functionals::Proximable;
use crate::linalg::Vector;
use crate::trace::{IterTrace, Recorder, SolveStatus};

use super::SolverConfig;

/// Proximal point iteration `x^{k+1} = prox_{γG}(x^k)` with constant `γ`
/// (`cfg.step`, default 1). Stops at the first `x^k` with
/// `‖x^k − prox_{γG}(x^k)‖ ≤ tol`.
pub fn proximal_point(g: &impl Proximable, x0: &Vector, cfg: &SolverConfig) -> Result<(Vector, IterTrace)> {
    cfg.validate()?;
    let gamma = cfg.step.unwrap_or(1.0);
    let mut rec = Recorder::new(cfg.keep_iterates, cfg.reference.clone());
    let mut x = x0.clone();
    for k in 0..=cfg.max_iter {
        let next = g.prox(gamma, &x)?;
        let residual = x.distance(&next);
        rec.record(k, &x, g.value(&x)?, residual, None, gamma);
        if residual <= cfg.tol {
            return Ok((x, rec.finish(SolveStatus::Converged)));
        }
        if !next.is_finite() {
            return Ok((x, rec.finish(SolveStatus::Diverged)));
        }
        if k < cfg.max_iter {
            x = next;
        }
    }
    Ok((x, rec.finish(SolveStatus::MaxIterations)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::ProxFunctional;

    fn cfg() -> SolverConfig {
        SolverConfig::new(100, 1e-12).with_step(1.0).keeping_iterates()
    }

    #[test]
    fn squared_norm_halves() {
        let (x, trace) = proximal_point(&ProxFunctional::SquaredL2, &Vector::from_slice(&[4.0, 0.0]), &cfg()).unwrap();
        assert!(x.norm() <= 2e-12);
        assert_eq!(trace.iterates[1].as_slice(), &[2.0, 0.0]);
        assert_eq!(trace.iterates[2].as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn projection_is_reached_in_one_step() {
        let g = ProxFunctional::box_uniform(-1.0, 1.0);
        let (x, trace) = proximal_point(&g, &Vector::from_slice(&[5.0, 5.0]), &cfg()).unwrap();
        assert_eq!(x.as_slice(), &[1.0, 1.0]);
        assert_eq!(trace.iterations(), 1);
    }

    #[test]
    fn soft_thresholding_reaches_zero_in_three_steps() {
        let (x, trace) = proximal_point(&ProxFunctional::l1(), &Vector::from_slice(&[3.0]), &cfg()).unwrap();
        assert_eq!(x.as_slice(), &[0.0]);
        assert_eq!(trace.iterations(), 3);
        let xs: Vec<f64> = trace.iterates.iter().map(|v| v[0]).collect();
        assert_eq!(xs, vec![3.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn max_iter_is_flagged() {
        let cfg = SolverConfig::new(3, 1e-14).with_step(1.0);
        let (_, trace) = proximal_point(&ProxFunctional::SquaredL2, &Vector::from_slice(&[1.0]), &cfg).unwrap();
        assert_eq!(trace.status, SolveStatus::MaxIterations);
        assert_eq!(trace.records.len(), 4);
    }
}
