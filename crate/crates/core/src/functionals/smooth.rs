use std::fmt;
use std::sync::Arc;

use crate::error::{ensure_positive, Result};
use crate::linalg::{check_dim, LinearOperator, Matrix, Vector};

type ValueFn = Arc<dyn Fn(&Vector) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
type HessFn = Arc<dyn Fn(&Vector) -> Matrix + Send + Sync>;

/// A differentiable convex functional given by closures.
///
/// The optional Lipschitz constant of the gradient is what fixed-step
/// splitting methods use to pick `γ = 1/L`; the optional Hessian is what
/// semismooth Newton methods need.
#[derive(Clone)]
pub struct SmoothFunction {
    dim: usize,
    value: ValueFn,
    gradient: GradFn,
    hessian: Option<HessFn>,
    lipschitz: Option<f64>,
}

impl fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothFunction")
            .field("dim", &self.dim)
            .field("hessian", &self.hessian.is_some())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl SmoothFunction {
    pub fn new(
        dim: usize,
        value: impl Fn(&Vector) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&Vector) -> Vector + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
            hessian: None,
            lipschitz: None,
        }
    }

    pub fn with_hessian(mut self, hessian: impl Fn(&Vector) -> Matrix + Send + Sync + 'static) -> Self {
        self.hessian = Some(Arc::new(hessian));
        self
    }

    pub fn with_lipschitz(mut self, lipschitz: f64) -> Result<Self> {
        ensure_positive("lipschitz", lipschitz)?;
        self.lipschitz = Some(lipschitz);
        Ok(self)
    }

    pub fn without_lipschitz(mut self) -> Self {
        self.lipschitz = None;
        self
    }

    /// `½xᵀQx + cᵀx` with `L = λ_max(Q)`. `Q` must be symmetric positive semidefinite.
    pub fn quadratic(q: Matrix, c: Vector) -> Result<Self> {
        check_dim(q.rows(), q.cols())?;
        check_dim(q.rows(), c.len())?;
        let op = LinearOperator::new(q);
        let lipschitz = op.op_norm(1e-13, 10_000).value;
        let (qv, qg, qh) = (op.clone(), op.clone(), op.matrix().clone());
        let (cv, cg) = (c.clone(), c);
        let mut f = Self::new(
            qv.input_dim(),
            move |x| 0.5 * qv.apply(x).dot(x) + cv.dot(x),
            move |x| &qg.apply(x) + &cg,
        )
        .with_hessian(move |_| qh.clone());
        f.lipschitz = (lipschitz > 0.0).then_some(lipschitz);
        Ok(f)
    }

    /// `½‖Ax − b‖²` with `L = ‖A‖²`.
    pub fn least_squares(a: LinearOperator, b: Vector) -> Result<Self> {
        check_dim(a.output_dim(), b.len())?;
        let norm = a.op_norm(1e-13, 10_000).value;
        let gram = a.matrix().gram();
        let (av, ag, bv, bg) = (a.clone(), a, b.clone(), b);
        let mut f = Self::new(
            av.input_dim(),
            move |x| 0.5 * (&av.apply(x) - &bv).norm_sq(),
            move |x| ag.adjoint_apply(&(&ag.apply(x) - &bg)),
        )
        .with_hessian(move |_| gram.clone());
        f.lipschitz = (norm > 0.0).then_some(norm * norm);
        Ok(f)
    }

    /// `½‖x − b‖²`, with `L = 1` and identity Hessian.
    pub fn squared_distance(b: Vector) -> Self {
        let n = b.len();
        let (bv, bg) = (b.clone(), b);
        Self {
            lipschitz: Some(1.0),
            ..Self::new(n, move |x| 0.5 * x.distance(&bv).powi(2), move |x| x - &bg)
                .with_hessian(move |_| Matrix::identity(n))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok((self.value)(x))
    }

    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim, x.len())?;
        Ok((self.gradient)(x))
    }

    /// The Hessian at `x`, or `None` when the function was built without one.
    pub fn hessian(&self, x: &Vector) -> Result<Option<Matrix>> {
        check_dim(self.dim, x.len())?;
        Ok(self.hessian.as_ref().map(|h| h(x)))
    }

    pub(crate) fn value_unchecked(&self, x: &Vector) -> f64 {
        (self.value)(x)
    }

    pub(crate) fn gradient_unchecked(&self, x: &Vector) -> Vector {
        (self.gradient)(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_gradient_and_constant() {
        let a = LinearOperator::new(Matrix::diag(&[1.0, 2.0]));
        let f = SmoothFunction::least_squares(a, Vector::from_slice(&[1.0, 1.0])).unwrap();
        let x = Vector::from_slice(&[0.0, 0.0]);
        assert_eq!(f.value(&x).unwrap(), 1.0);
        assert_eq!(f.gradient(&x).unwrap().as_slice(), &[-1.0, -2.0]);
        assert!((f.lipschitz().unwrap() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn quadratic_matches_hand_values() {
        let q = Matrix::diag(&[2.0, 3.0]);
        let f = SmoothFunction::quadratic(q, Vector::from_slice(&[1.0, -1.0])).unwrap();
        let x = Vector::from_slice(&[1.0, 1.0]);
        assert_eq!(f.value(&x).unwrap(), 2.5);
        assert_eq!(f.gradient(&x).unwrap().as_slice(), &[3.0, 2.0]);
        assert!(f.value(&Vector::zeros(3)).is_err());
    }
}
