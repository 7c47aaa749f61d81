use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::functionals::SmoothFunction;
use crate::linalg::{check_dim, Matrix, Vector};
use crate::splitting::SolverConfig;
use crate::trace::{IterTrace, Recorder, SolveStatus, Stage};

use super::driver::newton_loop;

/// `h_γ(t) = (t − clamp(t, −α, α))/γ`: zero on `[−α, α]`, slope `1/γ` outside.
pub fn h_gamma(t: f64, alpha: f64, gamma: f64) -> f64 {
    (t - t.clamp(-alpha, alpha)) / gamma
}

/// Newton derivative of [`h_gamma`]: `1/γ` where `|t| ≥ α`, else 0.
pub fn h_gamma_derivative(t: f64, alpha: f64, gamma: f64) -> f64 {
    if t.abs() >= alpha {
        1.0 / gamma
    } else {
        0.0
    }
}

/// `Φ_γ(u) = u − H_γ(−∇F(u))` with `H_γ` acting coordinatewise.
pub fn moreau_yosida_residual(f: &SmoothFunction, alpha: f64, gamma: f64, u: &Vector) -> Result<Vector> {
    let g = f.gradient(u)?;
    Ok(u.zip_map(&g, |ui, gi| ui - h_gamma(-gi, alpha, gamma)))
}

/// Semismooth Newton for the regularized condition `u − H_γ(−∇F(u)) = 0`,
/// whose solution minimizes `F + α‖·‖₁ + (γ/2)‖·‖²`. The Newton matrix is
/// `Id + (1/γ)χ_{|∇F(u)| ≥ α}∇²F(u)`.
///
/// The result carries an `O(γ)` bias relative to the minimizer of
/// `F + α‖·‖₁`; use [`continuation`] to drive `γ` down. The objective column
/// records the regularized objective.
pub fn moreau_yosida_ssn(
    f: &SmoothFunction,
    alpha: f64,
    gamma: f64,
    u0: &Vector,
    cfg: &SolverConfig,
) -> Result<(Vector, IterTrace)> {
    ensure_positive("alpha", alpha)?;
    ensure_positive("gamma", gamma)?;
    check_dim(f.dim(), u0.len())?;
    if !f.has_hessian() {
        return Err(Error::MissingTerm("Hessian of F"));
    }
    let residual = |u: &Vector| moreau_yosida_residual(f, alpha, gamma, u);
    let derivative = |u: &Vector| {
        let g = f.gradient(u)?;
        let h = f.hessian(u)?.ok_or(Error::MissingTerm("Hessian of F"))?;
        let n = u.len();
        Ok(Matrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id + h_gamma_derivative(-g[i], alpha, gamma) * h.get(i, j)
        }))
    };
    let objective = |u: &Vector| f.value_unchecked(u) + alpha * u.norm_l1() + 0.5 * gamma * u.norm_sq();
    newton_loop(&residual, &derivative, Some(&objective), None, u0, cfg)
}

/// Decreasing regularization parameters `γ0·factor^k`, stopping at `floor`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationSchedule {
    pub gamma0: f64,
    pub factor: f64,
    pub floor: f64,
}

impl ContinuationSchedule {
    pub fn new(gamma0: f64, factor: f64, floor: f64) -> Result<Self> {
        ensure_positive("gamma0", gamma0)?;
        ensure_positive("floor", floor)?;
        if !(factor > 0.0 && factor < 1.0) {
            return Err(Error::InvalidParameter {
                name: "factor",
                reason: format!("must lie in (0, 1), got {factor}"),
            });
        }
        Ok(Self { gamma0, factor, floor })
    }

    /// Halving from `gamma0` down to `floor`.
    pub fn halving(gamma0: f64, floor: f64) -> Result<Self> {
        Self::new(gamma0, 0.5, floor)
    }

    /// All terms `γ0·factor^k ≥ floor`; a term within relative `1e-12` of the
    /// floor counts as reaching it.
    pub fn gammas(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut g = self.gamma0;
        while g >= self.floor * (1.0 - 1e-12) {
            out.push(g);
            g *= self.factor;
        }
        out
    }
}

/// Runs [`moreau_yosida_ssn`] along the schedule, warm-starting each solve
/// from the previous solution.
///
/// The trace concatenates the inner traces with a `gamma` column and one
/// [`Stage`] per inner solve. If an inner solve fails or does not converge,
/// the run stops with the last converged solution, sets
/// [`IterTrace::failed_gamma`], and reports the inner status.
pub fn continuation(
    f: &SmoothFunction,
    alpha: f64,
    schedule: &ContinuationSchedule,
    u0: &Vector,
    cfg: &SolverConfig,
) -> Result<(Vector, IterTrace)> {
    cfg.validate()?;
    check_dim(f.dim(), u0.len())?;
    let mut trace = Recorder::new(false, None).finish(SolveStatus::Converged);
    let mut u = u0.clone();
    for gamma in schedule.gammas() {
        let (next, inner) = match moreau_yosida_ssn(f, alpha, gamma, &u, cfg) {
            Ok(r) => r,
            Err(Error::NewtonStep { .. }) => {
                trace.status = SolveStatus::Diverged;
                trace.failed_gamma = Some(gamma);
                return Ok((u, trace));
            }
            Err(e) => return Err(e),
        };
        let status = inner.status;
        trace.stages.push(Stage {
            gamma,
            iterations: inner.iterations(),
            status,
            distance_to_reference: cfg.reference.as_ref().map(|r| next.distance(r)),
        });
        trace.append(inner, gamma);
        if status != SolveStatus::Converged {
            trace.status = status;
            trace.failed_gamma = Some(gamma);
            return Ok((u, trace));
        }
        u = next;
    }
    Ok((u, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_gamma_values() {
        assert_eq!(h_gamma(2.0, 1.0, 1.0), 1.0);
        assert_eq!(h_gamma(0.5, 1.0, 1.0), 0.0);
        assert_eq!(h_gamma(-3.0, 1.0, 1.0), -2.0);
        assert_eq!(h_gamma_derivative(1.0, 1.0, 2.0), 0.5);
        assert_eq!(h_gamma_derivative(0.99, 1.0, 2.0), 0.0);
    }

    #[test]
    fn schedule_length() {
        let s = ContinuationSchedule::halving(1.0, 2f64.powi(-10)).unwrap();
        let g = s.gammas();
        assert_eq!(g.len(), 11);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        assert!(ContinuationSchedule::new(1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn regularized_scalar_solution() {
        // F = ½(u − 3)²: u_γ minimizes ½(u−3)² + |u| + γ/2 u², so u_γ = 2/(1+γ)
        let f = SmoothFunction::squared_distance(Vector::from_slice(&[3.0]));
        for gamma in [1.0, 0.25, 1e-3] {
            let (u, trace) =
                moreau_yosida_ssn(&f, 1.0, gamma, &Vector::zeros(1), &SolverConfig::new(50, 1e-13)).unwrap();
            assert!(trace.is_converged());
            assert!((u[0] - 2.0 / (1.0 + gamma)).abs() < 1e-12, "{gamma}: {u:?}");
        }
    }

    #[test]
    fn continuation_annotates_stages() {
        let f = SmoothFunction::squared_distance(Vector::from_slice(&[3.0, -0.2]));
        let s = ContinuationSchedule::halving(1.0, 0.125).unwrap();
        let (u, trace) = continuation(&f, 1.0, &s, &Vector::zeros(2), &SolverConfig::new(50, 1e-13)).unwrap();
        assert_eq!(trace.stages.len(), 4);
        assert!(trace.is_converged());
        assert!((u[0] - 2.0 / 1.125).abs() < 1e-12);
        assert_eq!(u[1], 0.0);
        assert!(trace
            .to_csv()
            .starts_with("iter,objective,residual,gap,step,ms,gamma\n"));
    }
}
