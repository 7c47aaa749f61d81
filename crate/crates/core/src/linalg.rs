//! Dense linear algebra on R^N.
//!
//! Everything here is deliberately small: a finite-valued [`Vector`], a
//! row-major [`Matrix`], and a [`LinearOperator`] wrapper that remembers its
//! operator-norm estimate. Solvers for SPD systems (conjugate gradients and a
//! dense Cholesky factorization) back the Newton steps.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const POWER_ITERATION_SEED: u64 = 0x5eed_cafe;

/// A dense real vector with finite entries.
///
/// Constructors reject NaN and infinities. Arithmetic between vectors of
/// different lengths is a programming error and panics; use [`inner`] for a
/// fallible inner product at API boundaries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: format!("vector entry {pos}"),
            });
        }
        Ok(Self(entries))
    }

    /// Builds a vector from a slice. Panics on non-finite entries.
    pub fn from_slice(entries: &[f64]) -> Self {
        Self::new(entries.to_vec()).expect("finite entries")
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn filled(n: usize, value: f64) -> Self {
        Self::from_slice(&vec![value; n])
    }

    /// Wraps entries produced by internal arithmetic; `None` if any entry is
    /// not finite.
    pub(crate) fn checked(entries: Vec<f64>) -> Option<Self> {
        entries.iter().all(|v| v.is_finite()).then_some(Self(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Euclidean inner product. Panics on length mismatch.
    pub fn dot(&self, other: &Vector) -> f64 {
        assert_eq!(self.len(), other.len(), "inner product of mismatched vectors");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_l1(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Vector {
        Vector(self.0.iter().map(|&v| f(v)).collect())
    }

    /// Applies `f` to paired entries. Panics on length mismatch.
    pub fn zip_map(&self, other: &Vector, f: impl Fn(f64, f64) -> f64) -> Vector {
        assert_eq!(self.len(), other.len(), "zip of mismatched vectors");
        Vector(self.0.iter().zip(&other.0).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn scale(&self, alpha: f64) -> Vector {
        self.map(|v| alpha * v)
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: f64, other: &Vector) -> Vector {
        self.zip_map(other, |a, b| a + alpha * b)
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.zip_map(other, |a, b| a - b).norm()
    }

    /// Entries at `indices`, in order.
    pub fn select(&self, indices: &[usize]) -> Vector {
        Vector(indices.iter().map(|&i| self.0[i]).collect())
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Vector::new(value)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.map(|v| -v)
    }
}

/// Fallible inner product for operands of unknown provenance.
pub fn inner(x: &Vector, y: &Vector) -> Result<f64> {
    check_dim(x.len(), y.len())?;
    Ok(x.dot(y))
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Dense row-major matrix. Serializes as an array of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in entries.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if nrows == 0 || ncols == 0 {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: "must have at least one row and one column".into(),
            });
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            check_dim(ncols, row.len())?;
            data.extend(row);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "matrix entry".into(),
            });
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// `M x`. Panics on length mismatch.
    pub fn mul_vec(&self, x: &Vector) -> Vector {
        assert_eq!(self.cols, x.len(), "matrix-vector dimension mismatch");
        Vector(
            (0..self.rows)
                .map(|i| self.row(i).iter().zip(x.iter()).map(|(a, b)| a * b).sum())
                .collect(),
        )
    }

    /// `Mᵀ y`. Panics on length mismatch.
    pub fn tmul_vec(&self, y: &Vector) -> Vector {
        assert_eq!(self.rows, y.len(), "transpose matrix-vector dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let yi = y[i];
            if yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
        Vector(out)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `MᵀM`
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut g = Matrix::zeros(n, n);
        for k in 0..self.rows {
            let r = self.row(k);
            for i in 0..n {
                if r[i] == 0.0 {
                    continue;
                }
                for j in i..n {
                    g.data[i * n + j] += r[i] * r[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i];
            }
        }
        g
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).map(|k| self.get(i, k) * other.get(k, j)).sum()
        })
    }

    pub fn scaled(&self, alpha: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| alpha * v).collect(),
        }
    }

    /// `self + alpha * I` for square matrices.
    pub fn add_diagonal(&self, alpha: f64) -> Matrix {
        assert_eq!(self.rows, self.cols, "diagonal shift of a non-square matrix");
        let mut m = self.clone();
        for i in 0..self.rows {
            m.data[i * self.cols + i] += alpha;
        }
        m
    }

    /// Submatrix with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..i).all(|j| {
                    let (a, b) = (self.get(i, j), self.get(j, i));
                    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
                })
            })
    }
}

impl TryFrom<Vec<Vec<f64>>> for Matrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<f64>> {
    fn from(m: Matrix) -> Self {
        m.to_rows()
    }
}

/// Result of a power-iteration norm estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// A bounded linear map `A: R^cols -> R^rows` with its adjoint.
///
/// The operator-norm estimate is computed lazily by [`LinearOperator::op_norm`]
/// and cached; the first completed estimate wins, so concurrent callers always
/// observe the same value.
#[derive(Debug, Serialize, Deserialize)]
#[serde(from = "Matrix", into = "Matrix")]
pub struct LinearOperator {
    matrix: Matrix,
    norm: OnceLock<NormEstimate>,
}

impl LinearOperator {
    pub fn new(matrix: Matrix) -> Self {
        Self {
            matrix,
            norm: OnceLock::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Matrix::identity(n))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn input_dim(&self) -> usize {
        self.matrix.cols
    }

    pub fn output_dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        self.matrix.mul_vec(x)
    }

    pub fn adjoint_apply(&self, y: &Vector) -> Vector {
        self.matrix.tmul_vec(y)
    }

    pub fn cached_norm(&self) -> Option<NormEstimate> {
        self.norm.get().copied()
    }

    /// Estimates the largest singular value by power iteration on `AᵀA`.
    ///
    /// Stops when the relative change of the estimate drops below `tol` or
    /// after `max_iter` sweeps (then `converged` is false). The start vector
    /// is a fixed pseudo-random draw so estimates are reproducible.
    pub fn op_norm(&self, tol: f64, max_iter: usize) -> NormEstimate {
        *self.norm.get_or_init(|| power_iteration(&self.matrix, tol, max_iter))
    }
}

impl Clone for LinearOperator {
    fn clone(&self) -> Self {
        let norm = OnceLock::new();
        if let Some(n) = self.norm.get() {
            let _ = norm.set(*n);
        }
        Self {
            matrix: self.matrix.clone(),
            norm,
        }
    }
}

impl PartialEq for LinearOperator {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl From<Matrix> for LinearOperator {
    fn from(matrix: Matrix) -> Self {
        Self::new(matrix)
    }
}

impl From<LinearOperator> for Matrix {
    fn from(op: LinearOperator) -> Self {
        op.matrix
    }
}

fn power_iteration(a: &Matrix, tol: f64, max_iter: usize) -> NormEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_ITERATION_SEED);
    let mut v = Vector((0..a.cols).map(|_| rng.random::<f64>() - 0.5).collect());
    let nv = v.norm();
    if nv == 0.0 {
        v = Vector::filled(a.cols, 1.0);
    }
    v = v.scale(1.0 / v.norm());

    let mut best = 0.0_f64;
    let mut previous = 0.0_f64;
    for it in 1..=max_iter {
        let av = a.mul_vec(&v);
        let estimate = av.norm();
        best = best.max(estimate);
        if estimate == 0.0 {
            return NormEstimate {
                value: 0.0,
                converged: true,
                iterations: it,
            };
        }
        if it > 1 && (estimate - previous).abs() <= tol * estimate {
            return NormEstimate {
                value: best,
                converged: true,
                iterations: it,
            };
        }
        previous = estimate;
        let w = a.tmul_vec(&av);
        let nw = w.norm();
        if nw == 0.0 {
            break;
        }
        v = w.scale(1.0 / nw);
    }
    NormEstimate {
        value: best,
        converged: false,
        iterations: max_iter,
    }
}

/// Solves `M s = b` for symmetric positive definite `M` by conjugate gradients.
///
/// Returns `s` with `‖Ms − b‖ ≤ tol·‖b‖`. SPD-ness is not checked up front;
/// a non-positive curvature direction aborts with [`Error::NegativeCurvature`].
pub fn solve_spd(m: &Matrix, b: &Vector, tol: f64) -> Result<Vector> {
    check_dim(m.rows, m.cols)?;
    check_dim(m.rows, b.len())?;
    let n = b.len();
    let bnorm = b.norm();
    let target = tol * bnorm;
    if bnorm == 0.0 {
        return Ok(Vector::zeros(n));
    }
    let mut x = Vector::zeros(n);
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.norm_sq();
    let max_iter = 10 * n + 10;
    for it in 0..max_iter {
        let mp = m.mul_vec(&p);
        let curvature = p.dot(&mp);
        if curvature <= 0.0 || !curvature.is_finite() {
            return Err(Error::NegativeCurvature {
                iteration: it,
                curvature,
            });
        }
        let step = rr / curvature;
        x = x.axpy(step, &p);
        r = r.axpy(-step, &mp);
        let rr_next = r.norm_sq();
        if rr_next.sqrt() <= target {
            // recompute the true residual to guard against drift
            let true_r = b - &m.mul_vec(&x);
            if true_r.norm() <= target {
                return Ok(x);
            }
            r = true_r;
            rr = r.norm_sq();
            p = r.clone();
            continue;
        }
        p = r.axpy(rr_next / rr, &p);
        rr = rr_next;
    }
    Err(Error::CgNotConverged {
        tol,
        iterations: max_iter,
    })
}

/// Lower-triangular Cholesky factor `M = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn factor(m: &Matrix) -> Result<Self> {
        check_dim(m.rows, m.cols)?;
        let n = m.rows;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = m.get(j, j);
            for k in 0..j {
                d -= l.get(j, k) * l.get(j, k);
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let djj = d.sqrt();
            l.set(j, j, djj);
            for i in (j + 1)..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / djj);
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows
    }

    pub fn solve(&self, b: &Vector) -> Vector {
        let n = self.dim();
        assert_eq!(n, b.len(), "Cholesky solve dimension mismatch");
        let mut y = vec![0.0; n];
        for i in 0..n {
            let s = b[i] - (0..i).map(|k| self.l.get(i, k) * y[k]).sum::<f64>();
            y[i] = s / self.l.get(i, i);
        }
        for i in (0..n).rev() {
            let s = y[i] - ((i + 1)..n).map(|k| self.l.get(k, i) * y[k]).sum::<f64>();
            y[i] = s / self.l.get(i, i);
        }
        Vector(y)
    }

    /// Ratio of extreme squared pivots; a cheap lower bound on the condition number.
    pub fn pivot_condition(&self) -> f64 {
        let diag: Vec<f64> = (0..self.dim()).map(|i| self.l.get(i, i)).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        (max / min).powi(2)
    }
}

/// Gaussian elimination with partial pivoting for general square systems.
pub fn solve_dense(m: &Matrix, b: &Vector) -> Result<Vector> {
    check_dim(m.rows, m.cols)?;
    check_dim(m.rows, b.len())?;
    let n = m.rows;
    let mut a = m.data.clone();
    let mut x = b.0.clone();
    let scale = a.iter().fold(0.0_f64, |s, v| s.max(v.abs())).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .expect("non-empty range");
        if a[pivot * n + col].abs() <= f64::EPSILON * scale * n as f64 {
            return Err(Error::Singular { pivot: col });
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            x.swap(col, pivot);
        }
        let d = a[col * n + col];
        for i in (col + 1)..n {
            let f = a[i * n + col] / d;
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[i * n + k] -= f * a[col * n + k];
            }
            x[i] -= f * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= a[i * n + k] * x[k];
        }
        x[i] = s / a[i * n + i];
    }
    Vector::checked(x).ok_or(Error::Singular { pivot: n })
}

/// Estimates `λ_max / λ_min` of an SPD matrix by power iteration on `M` and `M⁻¹`.
pub fn spd_condition_estimate(m: &Matrix) -> Result<f64> {
    let chol = Cholesky::factor(m)?;
    let lambda_max = power_iteration(m, 1e-10, 5000).value;
    let n = m.rows;
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_ITERATION_SEED);
    let mut v = Vector((0..n).map(|_| rng.random::<f64>() - 0.5).collect());
    v = v.scale(1.0 / v.norm());
    let mut mu = 0.0;
    for _ in 0..5000 {
        let w = chol.solve(&v);
        let next = w.norm();
        v = w.scale(1.0 / next);
        if (next - mu).abs() <= 1e-10 * next {
            mu = next;
            break;
        }
        mu = next;
    }
    Ok(lambda_max * mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_examples() {
        let x = Vector::from_slice(&[1.0, 2.0]);
        let y = Vector::from_slice(&[3.0, 4.0]);
        assert_eq!(inner(&x, &y).unwrap(), 11.0);
        assert_eq!(inner(&y, &y).unwrap(), 25.0);
        assert_eq!(inner(&x, &Vector::zeros(2)).unwrap(), 0.0);
    }

    #[test]
    fn inner_rejects_mismatch() {
        let err = inner(&Vector::zeros(2), &Vector::zeros(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn vector_rejects_non_finite() {
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
        assert!(Vector::new(vec![f64::INFINITY]).is_err());
        assert!(serde_json::from_str::<Vector>("[1.0, 2.0]").is_ok());
    }

    #[test]
    fn op_norm_simple_cases() {
        let id = LinearOperator::identity(7);
        assert!((id.op_norm(1e-12, 100).value - 1.0).abs() < 1e-12);
        let two = LinearOperator::new(Matrix::identity(4).scaled(2.0));
        assert!((two.op_norm(1e-12, 100).value - 2.0).abs() < 1e-12);
        let zero = LinearOperator::new(Matrix::zeros(3, 2));
        let est = zero.op_norm(1e-12, 100);
        assert_eq!(est.value, 0.0);
        assert!(est.converged);
    }

    #[test]
    fn op_norm_is_cached() {
        let a = LinearOperator::new(Matrix::diag(&[1.0, 2.0, 3.0]));
        assert!(a.cached_norm().is_none());
        let first = a.op_norm(1e-12, 1000);
        assert_eq!(a.cached_norm(), Some(first));
        assert_eq!(a.op_norm(1e-3, 1), first);
        assert_eq!(a.clone().cached_norm(), Some(first));
    }

    #[test]
    fn solve_spd_examples() {
        let s = solve_spd(&Matrix::identity(2), &Vector::from_slice(&[1.0, 2.0]), 1e-12).unwrap();
        assert_eq!(s.as_slice(), &[1.0, 2.0]);
        let s = solve_spd(&Matrix::diag(&[2.0, 4.0]), &Vector::from_slice(&[2.0, 4.0]), 1e-12).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12 && (s[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn solve_spd_detects_negative_curvature() {
        let m = Matrix::diag(&[1.0, -1.0]);
        let err = solve_spd(&m, &Vector::from_slice(&[1.0, 1.0]), 1e-12).unwrap_err();
        assert!(matches!(err, Error::NegativeCurvature { .. }));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(Cholesky::factor(&Matrix::diag(&[1.0, 0.0])).is_err());
        let c = Cholesky::factor(&Matrix::diag(&[4.0, 9.0])).unwrap();
        assert_eq!(c.solve(&Vector::from_slice(&[4.0, 9.0])).as_slice(), &[1.0, 1.0]);
    }

    #[test]
    fn dense_solve_with_pivoting() {
        let m = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let x = solve_dense(&m, &Vector::from_slice(&[2.0, 3.0])).unwrap();
        assert_eq!(x.as_slice(), &[3.0, 2.0]);
        let singular = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(solve_dense(&singular, &Vector::from_slice(&[1.0, 1.0])).is_err());
    }

    #[test]
    fn condition_of_identity_is_one() {
        let c = spd_condition_estimate(&Matrix::identity(5)).unwrap();
        assert!((c - 1.0).abs() < 1e-9);
        let c = spd_condition_estimate(&Matrix::diag(&[1.0, 10.0])).unwrap();
        assert!((c - 10.0).abs() < 1e-6);
    }

    #[test]
    fn matrix_json_is_row_major() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[1.0,2.0],[3.0,4.0]]");
        let back: Matrix = serde_json::from_str("[[1.0,2.0],[3.0,4.0]]").unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix>("[[1.0],[3.0,4.0]]").is_err());
    }
}
