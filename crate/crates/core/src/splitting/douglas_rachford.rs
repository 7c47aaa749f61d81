use crate::error::{ensure_positive, Result};
use crate::functionals::{ext_add, ProxFunctional, Proximable};
use crate::linalg::{check_dim, Vector};
use crate::trace::{IterTrace, Recorder, SolveStatus};

use super::primal_dual::pdhg_step;
use super::SolverConfig;

/// One Douglas–Rachford sweep from `z`; returns `(x, y, z⁺)`.
pub(crate) fn dr_step(
    f: &impl Proximable,
    g: &impl Proximable,
    gamma: f64,
    z: &Vector,
) -> Result<(Vector, Vector, Vector)> {
    let x = f.prox(gamma, z)?;
    let y = g.prox(gamma, &(&x.scale(2.0) - z))?;
    let z_next = &(z + &y) - &x;
    Ok((x, y, z_next))
}

/// Douglas–Rachford splitting for `min F + G`:
///
/// ```text
/// x^{k+1} = prox_{γF}(z^k)
/// y^{k+1} = prox_{γG}(2x^{k+1} − z^k)
/// z^{k+1} = z^k + y^{k+1} − x^{k+1}
/// ```
///
/// Row `k` reports `x = prox_{γF}(z^k)` with residual `‖y − x‖`; that `x` is
/// returned once the residual is at most `tol`. `γ` is `cfg.step` (default 1).
pub fn douglas_rachford(
    f: &impl Proximable,
    g: &impl Proximable,
    z0: &Vector,
    cfg: &SolverConfig,
) -> Result<(Vector, IterTrace)> {
    cfg.validate()?;
    let gamma = cfg.step.unwrap_or(1.0);
    let mut rec = Recorder::new(cfg.keep_iterates, cfg.reference.clone());
    let mut z = z0.clone();
    let mut last_x = z0.clone();
    for k in 0..=cfg.max_iter {
        let (x, y, z_next) = dr_step(f, g, gamma, &z)?;
        let residual = x.distance(&y);
        let objective = ext_add(f.value(&x)?, g.value(&x)?);
        rec.record(k, &x, objective, residual, None, gamma);
        if residual <= cfg.tol {
            return Ok((x, rec.finish(SolveStatus::Converged)));
        }
        if !z_next.is_finite() {
            return Ok((x, rec.finish(SolveStatus::Diverged)));
        }
        z = z_next;
        last_x = x;
    }
    Ok((last_x, rec.finish(SolveStatus::MaxIterations)))
}

/// Runs Douglas–Rachford from `z0` next to the primal-dual method with
/// `A = Id`, `τ = γ`, `σ = 1/γ`, started at `(x⁰, y⁰) = (z0, 0)`, and returns
/// `max_k ‖z^k_DR − (x^k_PD − γy^k_PD)‖` over `k = 0..=iters`.
///
/// This parameter choice sits exactly on the boundary `στ‖A‖² = 1`, so the
/// primal-dual iteration is run directly rather than through [`super::primal_dual`].
pub fn dr_as_pdhg_check(f: &ProxFunctional, g: &ProxFunctional, z0: &Vector, gamma: f64, iters: usize) -> Result<f64> {
    ensure_positive("gamma", gamma)?;
    f.check_dim(z0.len())?;
    g.check_dim(z0.len())?;
    let sigma = 1.0 / gamma;
    let mut z = z0.clone();
    let mut x = z0.clone();
    let mut y = Vector::zeros(z0.len());
    let mut worst: f64 = 0.0;
    for k in 0..=iters {
        check_dim(z.len(), x.len())?;
        worst = worst.max(z.distance(&x.axpy(-gamma, &y)));
        if k == iters {
            break;
        }
        z = dr_step(f, g, gamma, &z)?.2;
        (x, y) = pdhg_step(f, g, None, gamma, sigma, &x, &y)?;
    }
    Ok(worst)
}
