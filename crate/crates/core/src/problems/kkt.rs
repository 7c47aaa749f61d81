use crate::error::Result;
use crate::functionals::ProxFunctional;
use crate::linalg::{check_dim, Vector};

use super::ProblemSpec;

/// First-order optimality residual of `x`; zero exactly at a solution.
///
/// * Lasso: the Fenchel–Young gaps of `α‖·‖₁` at `(x, −Aᵀy)` and of
///   `½‖· − b‖²` at `(Ax, y)`, where `y` is `aux` if given and `Ax − b`
///   otherwise, scaled into the dual feasible set `‖Aᵀy‖∞ ≤ α`. Their sum is
///   the duality gap.
/// * Box QP and control: the Fenchel–Young gap of the box indicator at
///   `(p, −∇f(p))` with `p` the projection of `x` onto the box, plus the
///   distance from `x` to the box. `aux` is ignored.
/// * Huber denoising: `‖∇f(x)‖`. `aux` is ignored.
pub fn kkt_residual(spec: &ProblemSpec, x: &Vector, aux: Option<&Vector>) -> Result<f64> {
    check_dim(spec.dim(), x.len())?;
    match spec {
        ProblemSpec::Lasso { a, b, alpha, .. } => {
            let ax = a.mul_vec(x);
            let mut y = match aux {
                Some(y) => {
                    check_dim(b.len(), y.len())?;
                    y.clone()
                }
                None => &ax - b,
            };
            let dual_norm = a.tmul_vec(&y).norm_inf();
            if dual_norm > *alpha {
                y = y.scale(alpha / dual_norm);
            }
            let f = ProxFunctional::L1 { weight: *alpha };
            let g = ProxFunctional::squared_distance(b.clone());
            Ok(f.fenchel_young_gap(x, &-&a.tmul_vec(&y))? + g.fenchel_young_gap(&ax, &y)?)
        }
        ProblemSpec::BoxQp { .. } | ProblemSpec::Control { .. } => {
            let (q, c, lower, upper) = spec.as_box_qp().expect("box kinds");
            let p = Vector::from_slice(&(0..x.len()).map(|i| x[i].clamp(lower[i], upper[i])).collect::<Vec<_>>());
            let grad = &q.mul_vec(&p) + &c;
            let set = ProxFunctional::BoxIndicator {
                lower: lower.into_vec(),
                upper: upper.into_vec(),
            };
            Ok(set.fenchel_young_gap(&p, &-&grad)? + x.distance(&p))
        }
        ProblemSpec::HuberDenoise { .. } => Ok(spec.smooth_part()?.gradient(x)?.norm()),
    }
}
