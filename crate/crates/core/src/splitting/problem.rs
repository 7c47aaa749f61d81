use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::functionals::{ext_add, ProxFunctional, Proximable, SmoothFunction};
use crate::linalg::{check_dim, Cholesky, LinearOperator, Vector};

/// `min_x F(x) + G(Ax)`.
///
/// `F` is given either as a [`SmoothFunction`] (for gradient methods) or as
/// a catalog functional (for the primal-dual method); `A` defaults to the
/// identity.
#[derive(Clone, Debug)]
pub struct CompositeProblem {
    pub smooth: Option<SmoothFunction>,
    pub f_prox: Option<ProxFunctional>,
    pub g: ProxFunctional,
    pub a: Option<LinearOperator>,
}

impl CompositeProblem {
    /// `F(x) + G(x)` with smooth `F`, for proximal gradient and FISTA.
    pub fn smooth_plus(f: SmoothFunction, g: ProxFunctional) -> Self {
        Self {
            smooth: Some(f),
            f_prox: None,
            g,
            a: None,
        }
    }

    /// `F(x) + G(Ax)` with catalog `F` and `G`, for the primal-dual method.
    pub fn split(f: ProxFunctional, g: ProxFunctional, a: LinearOperator) -> Self {
        Self {
            smooth: None,
            f_prox: Some(f),
            g,
            a: Some(a),
        }
    }

    pub(crate) fn apply_a(&self, x: &Vector) -> Vector {
        match &self.a {
            Some(a) => a.apply(x),
            None => x.clone(),
        }
    }

    pub(crate) fn apply_at(&self, y: &Vector) -> Vector {
        match &self.a {
            Some(a) => a.adjoint_apply(y),
            None => y.clone(),
        }
    }

    /// `F(x) + G(Ax)`, using whichever form of `F` is present.
    pub fn objective(&self, x: &Vector) -> Result<f64> {
        if let Some(a) = &self.a {
            check_dim(a.input_dim(), x.len())?;
        }
        let f = match (&self.smooth, &self.f_prox) {
            (Some(s), _) => s.value(x)?,
            (None, Some(p)) => p.value(x)?,
            (None, None) => 0.0,
        };
        Ok(ext_add(f, self.g.value(&self.apply_a(x))?))
    }

    /// `[F(x) + G(Ax)] − [−F*(−A*y) − G*(y)]`, clamped at zero.
    ///
    /// Infinite when `y` lies outside the domain of a conjugate.
    /// Needs `F` in catalog form.
    pub fn duality_gap(&self, x: &Vector, y: &Vector) -> Result<f64> {
        let f = self
            .f_prox
            .as_ref()
            .ok_or(Error::MissingTerm("F as a catalog functional"))?;
        let ax = self.apply_a(x);
        check_dim(ax.len(), y.len())?;
        let primal = ext_add(f.value(x)?, self.g.value(&ax)?);
        let dual_neg = ext_add(f.conjugate().value(&-&self.apply_at(y))?, self.g.conjugate().value(y)?);
        if primal.is_infinite() || dual_neg.is_infinite() {
            return Ok(f64::INFINITY);
        }
        Ok((primal + dual_neg).max(0.0))
    }
}

/// Free-function form of [`CompositeProblem::duality_gap`].
pub fn duality_gap(p: &CompositeProblem, x: &Vector, y: &Vector) -> Result<f64> {
    p.duality_gap(x, y)
}

/// `½‖Ax − b‖²` as a proximable term, with the prox computed by solving
/// `(I + γAᵀA)z = x + γAᵀb`. Lets Douglas–Rachford handle a general lasso.
/// The factorization for the most recent `γ` is cached.
#[derive(Debug)]
pub struct LeastSquaresTerm {
    a: LinearOperator,
    b: Vector,
    cache: Mutex<Option<(f64, Cholesky)>>,
}

impl LeastSquaresTerm {
    pub fn new(a: LinearOperator, b: Vector) -> Result<Self> {
        check_dim(a.output_dim(), b.len())?;
        Ok(Self {
            a,
            b,
            cache: Mutex::new(None),
        })
    }
}

impl Clone for LeastSquaresTerm {
    fn clone(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: self.b.clone(),
            cache: Mutex::new(None),
        }
    }
}

impl Proximable for LeastSquaresTerm {
    fn value(&self, x: &Vector) -> Result<f64> {
        check_dim(self.a.input_dim(), x.len())?;
        Ok(0.5 * (&self.a.apply(x) - &self.b).norm_sq())
    }

    fn prox(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        crate::error::ensure_positive("gamma", gamma)?;
        check_dim(self.a.input_dim(), x.len())?;
        let rhs = x.axpy(gamma, &self.a.adjoint_apply(&self.b));
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if cache.as_ref().is_none_or(|(g, _)| *g != gamma) {
            let m = self.a.matrix().gram().scaled(gamma).add_diagonal(1.0);
            *cache = Some((gamma, Cholesky::factor(&m)?));
        }
        Ok(cache.as_ref().expect("filled above").1.solve(&rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    #[test]
    fn gap_hand_example() {
        let b = Vector::from_slice(&[1.0, 0.0]);
        let p = CompositeProblem::split(
            ProxFunctional::SquaredL2,
            ProxFunctional::squared_distance(b),
            LinearOperator::identity(2),
        );
        let zero = Vector::zeros(2);
        assert!((p.duality_gap(&zero, &zero).unwrap() - 0.5).abs() < 1e-15);
        // optimum: x = b/2, y = Ax − b = −b/2
        let x = Vector::from_slice(&[0.5, 0.0]);
        let y = Vector::from_slice(&[-0.5, 0.0]);
        assert!(p.duality_gap(&x, &y).unwrap() < 1e-15);
    }

    #[test]
    fn gap_needs_catalog_f() {
        let p = CompositeProblem::smooth_plus(SmoothFunction::squared_distance(Vector::zeros(1)), ProxFunctional::Zero);
        let x = Vector::zeros(1);
        assert!(matches!(p.duality_gap(&x, &x), Err(Error::MissingTerm(_))));
    }

    #[test]
    fn least_squares_prox_is_stationary() {
        let a = LinearOperator::new(Matrix::from_rows(vec![vec![1.0, 2.0], vec![0.0, 1.0], vec![1.0, -1.0]]).unwrap());
        let b = Vector::from_slice(&[1.0, 2.0, 3.0]);
        let term = LeastSquaresTerm::new(a.clone(), b.clone()).unwrap();
        let x = Vector::from_slice(&[0.3, -0.7]);
        let gamma = 0.8;
        let z = term.prox(gamma, &x).unwrap();
        // z − x + γ Aᵀ(Az − b) = 0
        let g = &(&z - &x) + &a.adjoint_apply(&(&a.apply(&z) - &b)).scale(gamma);
        assert!(g.norm() < 1e-12);
    }
}
