use crate::error::{ensure_positive, Error, Result};
use crate::linalg::{check_dim, LinearOperator, Matrix, Vector};
use crate::splitting::SolverConfig;
use crate::trace::IterTrace;

use super::driver::newton_loop;
use super::NewtonDerivativeMask;

/// `−(1/α)S*(Su − z)`, the point the optimal control is the projection of.
fn target(s: &LinearOperator, z: &Vector, alpha: f64, u: &Vector) -> Vector {
    s.adjoint_apply(&(&s.apply(u) - z)).scale(-1.0 / alpha)
}

/// `Φ(u) = u − proj_{[a,b]}(−(1/α)S*(Su − z))`.
pub fn control_residual(s: &LinearOperator, z: &Vector, alpha: f64, lower: f64, upper: f64, u: &Vector) -> Vector {
    let v = target(s, z, alpha, u);
    u.zip_map(&v, |ui, vi| ui - vi.clamp(lower, upper))
}

/// Semismooth Newton for the control-constrained problem
/// `min ½‖Su − z‖² + (α/2)‖u‖²` over `a ≤ u ≤ b`, written as the projection
/// equation `u = proj_{[a,b]}(−(1/α)S*(Su − z))`.
///
/// The Newton matrix is `Id + (1/α)χ_F S*S` with free set
/// `F = {a ≤ v ≤ b}`. After each step, coordinates outside the free set are
/// set to the exact bound they project to, so the returned control meets
/// the projection formula exactly there once the bound set has settled.
pub fn control_ssn(
    s: &LinearOperator,
    z: &Vector,
    alpha: f64,
    bounds: (f64, f64),
    u0: &Vector,
    cfg: &SolverConfig,
) -> Result<(Vector, IterTrace)> {
    ensure_positive("alpha", alpha)?;
    let (lower, upper) = bounds;
    if lower >= upper || lower.is_nan() || upper.is_nan() {
        return Err(Error::InvalidParameter {
            name: "bounds",
            reason: format!("need a < b, got [{lower}, {upper}]"),
        });
    }
    check_dim(s.output_dim(), z.len())?;
    check_dim(s.input_dim(), u0.len())?;
    let gram = s.matrix().gram();
    let n = u0.len();

    let residual = |u: &Vector| Ok(control_residual(s, z, alpha, lower, upper, u));
    let derivative = |u: &Vector| {
        let free = NewtonDerivativeMask::from_interval(&target(s, z, alpha, u), lower, upper);
        Ok(Matrix::from_fn(n, n, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            if free.active[i] {
                id + gram.get(i, j) / alpha
            } else {
                id
            }
        }))
    };
    let snap = |old: &Vector, new: &mut Vector| {
        let v = target(s, z, alpha, old);
        for i in 0..n {
            if v[i] < lower {
                new[i] = lower;
            } else if v[i] > upper {
                new[i] = upper;
            }
        }
    };
    let objective = |u: &Vector| 0.5 * (&s.apply(u) - z).norm_sq() + 0.5 * alpha * u.norm_sq();
    newton_loop(&residual, &derivative, Some(&objective), Some(&snap), u0, cfg)
}
