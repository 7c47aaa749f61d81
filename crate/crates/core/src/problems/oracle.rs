use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix, Vector};

use super::{kkt_residual, ProblemSpec};

/// Largest dimension the enumeration oracles accept by default.
pub const ORACLE_MAX_DIM: usize = 12;

/// A verified global minimizer found by enumeration.
///
/// `pattern[i]` is the sign of `x_opt[i]` for lasso, and `−1`/`0`/`+1` for
/// lower bound/free/upper bound in box problems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub x_opt: Vector,
    pub objective: f64,
    pub kkt_residual: f64,
    pub pattern: Vec<i8>,
    pub patterns_checked: usize,
}

fn verify_tol(scale: f64) -> f64 {
    1e-9 * (1.0 + scale)
}

fn check_cap(n: usize, max_dim: usize) -> Result<()> {
    if n > max_dim {
        Err(Error::OracleTooLarge { dim: n, cap: max_dim })
    } else {
        Ok(())
    }
}

fn subsets(mask: u32, n: usize) -> (Vec<usize>, Vec<usize>) {
    (0..n).partition(|&i| mask >> i & 1 == 1)
}

struct LassoData {
    h: Matrix,
    r: Vector,
    alpha: f64,
}

impl LassoData {
    fn new(spec: &ProblemSpec) -> Option<Self> {
        match spec {
            ProblemSpec::Lasso { a, b, alpha, .. } => Some(Self {
                h: a.gram(),
                r: a.tmul_vec(b),
                alpha: *alpha,
            }),
            _ => None,
        }
    }

    /// Candidate for a support and its signs; `None` if it fails the sign or
    /// dual-feasibility checks.
    fn candidate(&self, chol: &Cholesky, support: &[usize], signs: &[i8]) -> Option<Vector> {
        let n = self.r.len();
        let rhs = Vector::from_slice(
            &support
                .iter()
                .zip(signs)
                .map(|(&i, &s)| self.r[i] - self.alpha * s as f64)
                .collect::<Vec<_>>(),
        );
        let xs = chol.solve(&rhs);
        if xs.iter().zip(signs).any(|(&v, &s)| v * s as f64 <= 0.0) {
            return None;
        }
        let mut x = Vector::zeros(n);
        for (k, &i) in support.iter().enumerate() {
            x[i] = xs[k];
        }
        let g = &self.h.mul_vec(&x) - &self.r;
        let tol = verify_tol(self.alpha.max(g.norm_inf()));
        let dual_ok = (0..n).all(|i| x[i] != 0.0 || g[i].abs() <= self.alpha + tol);
        dual_ok.then_some(x)
    }
}

/// Solution of the lasso stationarity system for one sign pattern, if the
/// pattern verifies.
pub fn lasso_pattern_solution(spec: &ProblemSpec, pattern: &[i8]) -> Result<Option<Vector>> {
    let data = LassoData::new(spec).ok_or(Error::InvalidParameter {
        name: "spec",
        reason: "not a lasso instance".into(),
    })?;
    crate::linalg::check_dim(data.r.len(), pattern.len())?;
    let support: Vec<usize> = (0..pattern.len()).filter(|&i| pattern[i] != 0).collect();
    let signs: Vec<i8> = support.iter().map(|&i| pattern[i].signum()).collect();
    if support.is_empty() {
        let x = Vector::zeros(pattern.len());
        return Ok((data.r.norm_inf() <= data.alpha + verify_tol(data.alpha)).then_some(x));
    }
    let Ok(chol) = Cholesky::factor(&data.h.select(&support, &support)) else {
        return Ok(None);
    };
    Ok(data.candidate(&chol, &support, &signs))
}

/// Global lasso minimizer by enumerating all `3ᴺ` sign patterns.
///
/// Each support is factored once and its `2^|S|` sign choices reuse the
/// factorization. Supports whose Gram block is singular are skipped.
pub fn oracle_lasso(spec: &ProblemSpec, max_dim: usize) -> Result<OracleSolution> {
    let data = LassoData::new(spec).ok_or(Error::InvalidParameter {
        name: "spec",
        reason: "not a lasso instance".into(),
    })?;
    let n = spec.dim();
    check_cap(n, max_dim)?;
    let mut best: Option<(f64, Vector, Vec<i8>)> = None;
    let mut checked = 0;
    let mut consider = |x: Vector, pattern: Vec<i8>| -> Result<()> {
        let obj = spec.objective(&x)?;
        if best.as_ref().is_none_or(|(b, _, _)| obj < *b) {
            best = Some((obj, x, pattern));
        }
        Ok(())
    };
    for mask in 0u32..(1 << n) {
        let (support, _) = subsets(mask, n);
        if support.is_empty() {
            checked += 1;
            if let Some(x) = lasso_pattern_solution(spec, &vec![0; n])? {
                consider(x, vec![0; n])?;
            }
            continue;
        }
        let Ok(chol) = Cholesky::factor(&data.h.select(&support, &support)) else {
            checked += 1 << support.len();
            continue;
        };
        for sign_mask in 0u32..(1 << support.len()) {
            checked += 1;
            let signs: Vec<i8> = (0..support.len())
                .map(|k| if sign_mask >> k & 1 == 1 { -1 } else { 1 })
                .collect();
            if let Some(x) = data.candidate(&chol, &support, &signs) {
                let mut pattern = vec![0i8; n];
                for (k, &i) in support.iter().enumerate() {
                    pattern[i] = signs[k];
                }
                consider(x, pattern)?;
            }
        }
    }
    let (objective, x_opt, pattern) = best.ok_or(Error::OracleInconsistent)?;
    Ok(OracleSolution {
        kkt_residual: kkt_residual(spec, &x_opt, None)?,
        x_opt,
        objective,
        pattern,
        patterns_checked: checked,
    })
}

struct BoxData {
    q: Matrix,
    c: Vector,
    lower: Vector,
    upper: Vector,
}

impl BoxData {
    fn new(spec: &ProblemSpec) -> Option<Self> {
        spec.as_box_qp().map(|(q, c, lower, upper)| Self { q, c, lower, upper })
    }

    fn candidate(&self, chol: Option<&Cholesky>, free: &[usize], bound: &[usize], at_upper: &[bool]) -> Option<Vector> {
        let n = self.c.len();
        let mut x = Vector::zeros(n);
        for (k, &i) in bound.iter().enumerate() {
            x[i] = if at_upper[k] { self.upper[i] } else { self.lower[i] };
        }
        if let Some(chol) = chol {
            let coupling = self.q.select(free, bound).mul_vec(&x.select(bound));
            let rhs = &(-&self.c.select(free)) - &coupling;
            let xf = chol.solve(&rhs);
            for (k, &i) in free.iter().enumerate() {
                x[i] = xf[k];
            }
        }
        let g = &self.q.mul_vec(&x) + &self.c;
        let tol = verify_tol(x.norm_inf().max(g.norm_inf()));
        let primal_ok = free
            .iter()
            .all(|&i| x[i] >= self.lower[i] - tol && x[i] <= self.upper[i] + tol);
        let multipliers_ok = bound
            .iter()
            .zip(at_upper)
            .all(|(&i, &up)| if up { g[i] <= tol } else { g[i] >= -tol });
        (primal_ok && multipliers_ok).then_some(x)
    }
}

fn box_data(spec: &ProblemSpec) -> Result<BoxData> {
    BoxData::new(spec).ok_or(Error::InvalidParameter {
        name: "spec",
        reason: "not a box-constrained instance".into(),
    })
}

/// Solution for one bound configuration, if it verifies.
pub fn boxqp_pattern_solution(spec: &ProblemSpec, pattern: &[i8]) -> Result<Option<Vector>> {
    let data = box_data(spec)?;
    crate::linalg::check_dim(data.c.len(), pattern.len())?;
    let free: Vec<usize> = (0..pattern.len()).filter(|&i| pattern[i] == 0).collect();
    let bound: Vec<usize> = (0..pattern.len()).filter(|&i| pattern[i] != 0).collect();
    let at_upper: Vec<bool> = bound.iter().map(|&i| pattern[i] > 0).collect();
    let chol = if free.is_empty() {
        None
    } else {
        match Cholesky::factor(&data.q.select(&free, &free)) {
            Ok(c) => Some(c),
            Err(_) => return Ok(None),
        }
    };
    Ok(data.candidate(chol.as_ref(), &free, &bound, &at_upper))
}

/// Global minimizer of a box-constrained QP (or the control problem in its
/// QP form) by enumerating all `3ᴺ` lower/free/upper configurations.
pub fn oracle_boxqp(spec: &ProblemSpec, max_dim: usize) -> Result<OracleSolution> {
    let data = box_data(spec)?;
    let n = spec.dim();
    check_cap(n, max_dim)?;
    let objective = |x: &Vector| 0.5 * data.q.mul_vec(x).dot(x) + data.c.dot(x);
    let mut best: Option<(f64, Vector, Vec<i8>)> = None;
    let mut checked = 0;
    for mask in 0u32..(1 << n) {
        let (free, bound) = subsets(mask, n);
        let chol = if free.is_empty() {
            None
        } else {
            match Cholesky::factor(&data.q.select(&free, &free)) {
                Ok(c) => Some(c),
                Err(_) => {
                    checked += 1 << bound.len();
                    continue;
                }
            }
        };
        for side in 0u32..(1 << bound.len()) {
            checked += 1;
            let at_upper: Vec<bool> = (0..bound.len()).map(|k| side >> k & 1 == 1).collect();
            if let Some(x) = data.candidate(chol.as_ref(), &free, &bound, &at_upper) {
                let obj = objective(&x);
                if best.as_ref().is_none_or(|(b, _, _)| obj < *b) {
                    let mut pattern = vec![0i8; n];
                    for (k, &i) in bound.iter().enumerate() {
                        pattern[i] = if at_upper[k] { 1 } else { -1 };
                    }
                    best = Some((obj, x, pattern));
                }
            }
        }
    }
    let (_, x_opt, pattern) = best.ok_or(Error::OracleInconsistent)?;
    Ok(OracleSolution {
        kkt_residual: kkt_residual(spec, &x_opt, None)?,
        objective: spec.objective(&x_opt)?,
        x_opt,
        pattern,
        patterns_checked: checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{gen, GenParams};

    #[test]
    fn two_dim_lasso() {
        let spec = ProblemSpec::lasso(Matrix::identity(2), Vector::from_slice(&[3.0, 0.5]), 1.0).unwrap();
        let sol = oracle_lasso(&spec, ORACLE_MAX_DIM).unwrap();
        assert_eq!(sol.x_opt.as_slice(), &[2.0, 0.0]);
        assert_eq!(sol.objective, 2.625);
        assert_eq!(sol.pattern, vec![1, 0]);
        assert_eq!(sol.patterns_checked, 9);
    }

    #[test]
    fn large_alpha_gives_zero() {
        let spec = gen(
            &GenParams::Lasso {
                n: 5,
                m: 10,
                alpha: 1.0,
            },
            3,
        )
        .unwrap();
        let ProblemSpec::Lasso { a, b, .. } = &spec else {
            unreachable!()
        };
        let alpha = a.tmul_vec(b).norm_inf() * 1.01;
        let spec = ProblemSpec::lasso(a.clone(), b.clone(), alpha).unwrap();
        let sol = oracle_lasso(&spec, ORACLE_MAX_DIM).unwrap();
        assert_eq!(sol.x_opt, Vector::zeros(5));
    }

    #[test]
    fn clipped_qp() {
        let spec = ProblemSpec::box_qp(
            Matrix::identity(1),
            Vector::from_slice(&[-10.0]),
            Vector::from_slice(&[-1.0]),
            Vector::from_slice(&[1.0]),
        )
        .unwrap();
        let sol = oracle_boxqp(&spec, ORACLE_MAX_DIM).unwrap();
        assert_eq!(sol.x_opt.as_slice(), &[1.0]);
        assert_eq!(sol.pattern, vec![1]);
        // multiplier of the upper bound: −g = 9 ≥ 0
        assert_eq!(-(sol.x_opt[0] - 10.0), 9.0);
    }

    #[test]
    fn interior_qp_is_unconstrained_solution() {
        let q = Matrix::from_rows(vec![vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let c = Vector::from_slice(&[-0.2, 0.1]);
        let spec = ProblemSpec::box_qp(q.clone(), c.clone(), Vector::filled(2, -5.0), Vector::filled(2, 5.0)).unwrap();
        let sol = oracle_boxqp(&spec, ORACLE_MAX_DIM).unwrap();
        let direct = crate::linalg::solve_dense(&q, &-&c).unwrap();
        assert!(sol.x_opt.distance(&direct) < 1e-15);
        assert_eq!(sol.pattern, vec![0, 0]);
    }

    #[test]
    fn pattern_resolve_is_exact() {
        let spec = gen(&GenParams::Lasso { n: 6, m: 9, alpha: 0.3 }, 11).unwrap();
        let sol = oracle_lasso(&spec, ORACLE_MAX_DIM).unwrap();
        assert_eq!(
            lasso_pattern_solution(&spec, &sol.pattern).unwrap(),
            Some(sol.x_opt.clone())
        );
        assert!(sol.kkt_residual <= 1e-10);

        let spec = gen(&GenParams::BoxQp { n: 5 }, 11).unwrap();
        let sol = oracle_boxqp(&spec, ORACLE_MAX_DIM).unwrap();
        assert_eq!(
            boxqp_pattern_solution(&spec, &sol.pattern).unwrap(),
            Some(sol.x_opt.clone())
        );
        assert!(sol.kkt_residual <= 1e-10);
    }

    #[test]
    fn cap_enforced() {
        let spec = gen(&GenParams::BoxQp { n: 13 }, 0).unwrap();
        assert!(matches!(
            oracle_boxqp(&spec, ORACLE_MAX_DIM),
            Err(Error::OracleTooLarge { .. })
        ));
    }
}
