use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{check_dim, solve_dense, solve_spd, spd_condition_estimate, LinearOperator, Matrix, Vector};

/// Systems up to this size fall back to a dense direct solve when conjugate
/// gradients fail.
pub const DENSE_FALLBACK_DIM: usize = 200;

/// Relative residual asked of conjugate gradients on a Newton system.
const CG_TOL: f64 = 1e-13;

/// Coordinates where a piecewise map sits on its non-constant branch.
///
/// For soft-thresholding with threshold `t` this is `{i : |vᵢ| ≥ t}`, the
/// equality case counting as active. Its complement is the set where the
/// thresholded output is zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonDerivativeMask {
    pub active: Vec<bool>,
}

impl NewtonDerivativeMask {
    /// `active[i] = |v[i]| ≥ threshold`.
    pub fn from_threshold(v: &Vector, threshold: f64) -> Self {
        Self {
            active: v.iter().map(|x| x.abs() >= threshold).collect(),
        }
    }

    /// `active[i] = lower ≤ v[i] ≤ upper`.
    pub fn from_interval(v: &Vector, lower: f64, upper: f64) -> Self {
        Self {
            active: v.iter().map(|&x| lower <= x && x <= upper).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn active_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.active[i]).collect()
    }

    pub fn inactive_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.active[i]).collect()
    }

    /// The mask as a 0/1 vector.
    pub fn indicator(&self) -> Vector {
        Vector::from_slice(
            &self
                .active
                .iter()
                .map(|&a| if a { 1.0 } else { 0.0 })
                .collect::<Vec<_>>(),
        )
    }
}

/// One semismooth Newton step `M s = rhs`.
#[derive(Clone, Debug)]
pub struct NewtonSystem {
    pub matrix: LinearOperator,
    pub rhs: Vector,
    pub partition: Option<NewtonDerivativeMask>,
}

/// Solution of a [`NewtonSystem`] with a condition estimate of the block that
/// needed a genuine linear solve.
#[derive(Clone, Debug)]
pub struct NewtonStepSolution {
    pub step: Vector,
    pub condition: f64,
}

impl NewtonSystem {
    pub fn new(matrix: Matrix, rhs: Vector) -> Result<Self> {
        check_dim(matrix.rows(), matrix.cols())?;
        check_dim(matrix.rows(), rhs.len())?;
        Ok(Self {
            matrix: LinearOperator::new(matrix),
            rhs,
            partition: None,
        })
    }

    pub fn with_partition(mut self, partition: NewtonDerivativeMask) -> Self {
        self.partition = Some(partition);
        self
    }

    /// Solves by block elimination.
    ///
    /// Rows with no off-diagonal entries (the saturated coordinates of the
    /// piecewise map) are solved directly; the remaining block is symmetric
    /// positive definite for every system built in this crate and goes to
    /// conjugate gradients, with a dense fallback for small systems.
    pub fn solve(&self) -> Result<NewtonStepSolution> {
        let m = self.matrix.matrix();
        let n = m.rows();
        let decoupled: Vec<bool> = (0..n)
            .map(|i| m.get(i, i) != 0.0 && (0..n).all(|j| j == i || m.get(i, j) == 0.0))
            .collect();
        let d: Vec<usize> = (0..n).filter(|&i| decoupled[i]).collect();
        let r: Vec<usize> = (0..n).filter(|&i| !decoupled[i]).collect();

        let mut step = Vector::zeros(n);
        for &i in &d {
            step[i] = self.rhs[i] / m.get(i, i);
        }
        if r.is_empty() {
            return Ok(NewtonStepSolution { step, condition: 1.0 });
        }
        let m_rr = m.select(&r, &r);
        let s_d = step.select(&d);
        let coupling = m.select(&r, &d).mul_vec(&s_d);
        let rhs_r = &self.rhs.select(&r) - &coupling;

        let symmetric = m_rr.is_symmetric(1e-12 * m_rr.rows() as f64);
        let (s_r, condition) = if symmetric {
            let s = match solve_spd(&m_rr, &rhs_r, CG_TOL) {
                Ok(s) => s,
                Err(e) if r.len() > DENSE_FALLBACK_DIM => return Err(e),
                Err(_) => solve_dense(&m_rr, &rhs_r)?,
            };
            (s, spd_condition_estimate(&m_rr).unwrap_or(f64::INFINITY))
        } else {
            (solve_dense(&m_rr, &rhs_r)?, f64::NAN)
        };
        for (k, &i) in r.iter().enumerate() {
            step[i] = s_r[k];
        }
        Ok(NewtonStepSolution { step, condition })
    }
}
