use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::functionals::{ProxFunctional, SmoothFunction};
use crate::linalg::{check_dim, spd_condition_estimate, Cholesky, LinearOperator, Matrix, Vector};
use crate::splitting::CompositeProblem;

/// Fraction of nonzeros in planted lasso signals.
pub const LASSO_SPARSITY: f64 = 0.1;
/// Standard deviation of the noise added to planted lasso data.
pub const LASSO_NOISE: f64 = 0.01;

/// A benchmark instance. Serialized with a `kind` discriminator, e.g.
/// `{"kind": "lasso", "a": [[...]], "b": [...], "alpha": 0.5, "seed": 7}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// `min ½‖Ax − b‖² + α‖x‖₁`
    Lasso {
        a: Matrix,
        b: Vector,
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `min ½xᵀQx + cᵀx` subject to `lower ≤ x ≤ upper`
    BoxQp {
        q: Matrix,
        c: Vector,
        lower: Vector,
        upper: Vector,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `min ½‖x − b‖² + α Σᵢ huber_γ(xᵢ)`, with `huber_γ` the Moreau envelope of `|·|`
    HuberDenoise {
        b: Vector,
        gamma: f64,
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `min ½‖Su − z‖² + (α/2)‖u‖²` subject to `lower ≤ u ≤ upper`
    Control {
        s: Matrix,
        z: Vector,
        alpha: f64,
        lower: f64,
        upper: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

/// Generator parameters for [`gen`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenParams {
    /// `m × n` standard normal `A`, planted sparse signal plus noise.
    Lasso { n: usize, m: usize, alpha: f64 },
    /// `Q = BᵀB/n + I/2` with standard normal `B`, bounds `[−1, 1]`.
    BoxQp { n: usize },
    /// Piecewise constant signal plus noise.
    HuberDenoise { n: usize, gamma: f64, alpha: f64 },
    /// `m × n` matrix `S` with entries of variance `1/m`.
    Control {
        n: usize,
        m: usize,
        alpha: f64,
        lower: f64,
        upper: f64,
    },
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn normal_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| scale * normal(rng)).collect::<Vec<f64>>())
        .collect();
    Matrix::from_rows(data).expect("rectangular by construction")
}

fn normal_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::from_slice(&(0..n).map(|_| scale * normal(rng)).collect::<Vec<f64>>())
}

fn ensure_dim(name: &'static str, n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidParameter {
            name,
            reason: "must be at least 1".into(),
        })
    } else {
        Ok(())
    }
}

/// Deterministic instance from parameters and seed: the same pair always
/// gives a bit-identical instance.
pub fn gen(params: &GenParams, seed: u64) -> Result<ProblemSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = match *params {
        GenParams::Lasso { n, m, alpha } => {
            ensure_dim("n", n)?;
            ensure_dim("m", m)?;
            ensure_positive("alpha", alpha)?;
            let a = normal_matrix(&mut rng, m, n, 1.0);
            let nonzeros = ((n as f64 * LASSO_SPARSITY).ceil() as usize).max(1);
            let mut planted = Vector::zeros(n);
            let mut idx: Vec<usize> = (0..n).collect();
            for k in 0..nonzeros {
                let j = rng.random_range(k..n);
                idx.swap(k, j);
                planted[idx[k]] = normal(&mut rng);
            }
            let b = &a.mul_vec(&planted) + &normal_vector(&mut rng, m, LASSO_NOISE);
            ProblemSpec::Lasso {
                a,
                b,
                alpha,
                seed: Some(seed),
            }
        }
        GenParams::BoxQp { n } => {
            ensure_dim("n", n)?;
            let b = normal_matrix(&mut rng, n, n, 1.0);
            let q = b.gram().scaled(1.0 / n as f64).add_diagonal(0.5);
            let c = normal_vector(&mut rng, n, 2.0);
            ProblemSpec::BoxQp {
                q,
                c,
                lower: Vector::filled(n, -1.0),
                upper: Vector::filled(n, 1.0),
                seed: Some(seed),
            }
        }
        GenParams::HuberDenoise { n, gamma, alpha } => {
            ensure_dim("n", n)?;
            ensure_positive("gamma", gamma)?;
            ensure_positive("alpha", alpha)?;
            let block = (n / 4).max(1);
            let mut level = 0.0;
            let mut b = Vector::zeros(n);
            for i in 0..n {
                if i % block == 0 {
                    level = normal(&mut rng);
                }
                b[i] = level + 0.1 * normal(&mut rng);
            }
            ProblemSpec::HuberDenoise {
                b,
                gamma,
                alpha,
                seed: Some(seed),
            }
        }
        GenParams::Control {
            n,
            m,
            alpha,
            lower,
            upper,
        } => {
            ensure_dim("n", n)?;
            ensure_dim("m", m)?;
            let s = normal_matrix(&mut rng, m, n, 1.0 / (m as f64).sqrt());
            let z = normal_vector(&mut rng, m, 2.0);
            ProblemSpec::Control {
                s,
                z,
                alpha,
                lower,
                upper,
                seed: Some(seed),
            }
        }
    };
    spec.validate()?;
    Ok(spec)
}

impl ProblemSpec {
    pub fn lasso(a: Matrix, b: Vector, alpha: f64) -> Result<Self> {
        let s = Self::Lasso {
            a,
            b,
            alpha,
            seed: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn box_qp(q: Matrix, c: Vector, lower: Vector, upper: Vector) -> Result<Self> {
        let s = Self::BoxQp {
            q,
            c,
            lower,
            upper,
            seed: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn control(s: Matrix, z: Vector, alpha: f64, lower: f64, upper: f64) -> Result<Self> {
        let spec = Self::Control {
            s,
            z,
            alpha,
            lower,
            upper,
            seed: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Lasso { .. } => "lasso",
            Self::BoxQp { .. } => "box_qp",
            Self::HuberDenoise { .. } => "huber_denoise",
            Self::Control { .. } => "control",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Lasso { seed, .. }
            | Self::BoxQp { seed, .. }
            | Self::HuberDenoise { seed, .. }
            | Self::Control { seed, .. } => *seed,
        }
    }

    /// Number of unknowns.
    pub fn dim(&self) -> usize {
        match self {
            Self::Lasso { a, .. } => a.cols(),
            Self::BoxQp { q, .. } => q.cols(),
            Self::HuberDenoise { b, .. } => b.len(),
            Self::Control { s, .. } => s.cols(),
        }
    }

    /// `(rows, cols)` of the data matrix, or `(n, n)` when there is none.
    pub fn dims(&self) -> (usize, usize) {
        match self {
            Self::Lasso { a, .. } => (a.rows(), a.cols()),
            Self::Control { s, .. } => (s.rows(), s.cols()),
            _ => (self.dim(), self.dim()),
        }
    }

    /// Checks shapes, parameter signs, and that the curvature matrix factors.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Lasso { a, b, alpha, .. } => {
                check_dim(a.rows(), b.len())?;
                ensure_positive("alpha", *alpha)?;
            }
            Self::BoxQp { q, c, lower, upper, .. } => {
                check_dim(q.rows(), q.cols())?;
                check_dim(q.rows(), c.len())?;
                check_dim(q.rows(), lower.len())?;
                check_dim(q.rows(), upper.len())?;
                if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
                    return Err(Error::InvalidParameter {
                        name: "bounds",
                        reason: "lower exceeds upper".into(),
                    });
                }
                if !q.is_symmetric(1e-12) {
                    return Err(Error::InvalidParameter {
                        name: "q",
                        reason: "must be symmetric".into(),
                    });
                }
            }
            Self::HuberDenoise { gamma, alpha, .. } => {
                ensure_positive("gamma", *gamma)?;
                ensure_positive("alpha", *alpha)?;
            }
            Self::Control {
                s,
                z,
                alpha,
                lower,
                upper,
                ..
            } => {
                check_dim(s.rows(), z.len())?;
                ensure_positive("alpha", *alpha)?;
                if lower >= upper || lower.is_nan() || upper.is_nan() {
                    return Err(Error::InvalidParameter {
                        name: "bounds",
                        reason: format!("need lower < upper, got [{lower}, {upper}]"),
                    });
                }
            }
        }
        if let Some(m) = self.curvature() {
            Cholesky::factor(&m)?;
        }
        Ok(())
    }

    /// The SPD matrix that governs the problem's conditioning: `AᵀA + αI`,
    /// `Q`, or `SᵀS + αI`. `None` for the separable Huber problem.
    pub fn curvature(&self) -> Option<Matrix> {
        match self {
            Self::Lasso { a, alpha, .. } => Some(a.gram().add_diagonal(*alpha)),
            Self::BoxQp { q, .. } => Some(q.clone()),
            Self::HuberDenoise { .. } => None,
            Self::Control { s, alpha, .. } => Some(s.gram().add_diagonal(*alpha)),
        }
    }

    /// Condition estimate of [`Self::curvature`]; for Huber denoising the
    /// ratio `1 + α/γ` of the Hessian bounds.
    pub fn condition_estimate(&self) -> Result<f64> {
        match (self, self.curvature()) {
            (Self::HuberDenoise { gamma, alpha, .. }, _) => Ok(1.0 + alpha / gamma),
            (_, Some(m)) => spd_condition_estimate(&m),
            (_, None) => unreachable!("every other kind has a curvature matrix"),
        }
    }

    /// Smooth part with Hessian and Lipschitz constant.
    pub fn smooth_part(&self) -> Result<SmoothFunction> {
        match self {
            Self::Lasso { a, b, .. } => SmoothFunction::least_squares(LinearOperator::new(a.clone()), b.clone()),
            Self::BoxQp { q, c, .. } => SmoothFunction::quadratic(q.clone(), c.clone()),
            Self::HuberDenoise { b, gamma, alpha, .. } => Ok(huber_objective(b.clone(), *gamma, *alpha)),
            Self::Control { s, z, alpha, .. } => {
                let (q, c) = control_as_qp(s, z, *alpha);
                SmoothFunction::quadratic(q, c)
            }
        }
    }

    /// Nonsmooth part as a catalog functional.
    pub fn nonsmooth_part(&self) -> ProxFunctional {
        match self {
            Self::Lasso { alpha, .. } => ProxFunctional::L1 { weight: *alpha },
            Self::BoxQp { lower, upper, .. } => ProxFunctional::BoxIndicator {
                lower: lower.as_slice().to_vec(),
                upper: upper.as_slice().to_vec(),
            },
            Self::HuberDenoise { .. } => ProxFunctional::Zero,
            Self::Control { lower, upper, .. } => ProxFunctional::box_uniform(*lower, *upper),
        }
    }

    /// `min F + G` with smooth `F`, ready for proximal gradient or FISTA.
    pub fn composite(&self) -> Result<CompositeProblem> {
        Ok(CompositeProblem::smooth_plus(
            self.smooth_part()?,
            self.nonsmooth_part(),
        ))
    }

    pub fn objective(&self, x: &Vector) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let f = self.smooth_part()?.value(x)?;
        Ok(crate::functionals::ext_add(f, self.nonsmooth_part().value(x)?))
    }

    /// Box-constrained QP data `(Q, c, lower, upper)` for the two box kinds.
    pub fn as_box_qp(&self) -> Option<(Matrix, Vector, Vector, Vector)> {
        match self {
            Self::BoxQp { q, c, lower, upper, .. } => Some((q.clone(), c.clone(), lower.clone(), upper.clone())),
            Self::Control {
                s,
                z,
                alpha,
                lower,
                upper,
                ..
            } => {
                let (q, c) = control_as_qp(s, z, *alpha);
                let n = s.cols();
                Some((q, c, Vector::filled(n, *lower), Vector::filled(n, *upper)))
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// `½‖Su − z‖² + (α/2)‖u‖² = ½uᵀ(SᵀS + αI)u − (Sᵀz)ᵀu + const`.
fn control_as_qp(s: &Matrix, z: &Vector, alpha: f64) -> (Matrix, Vector) {
    (s.gram().add_diagonal(alpha), -&s.tmul_vec(z))
}

fn huber_objective(b: Vector, gamma: f64, alpha: f64) -> SmoothFunction {
    let n = b.len();
    let huber = move |t: f64| {
        if t.abs() > gamma {
            t.abs() - 0.5 * gamma
        } else {
            t * t / (2.0 * gamma)
        }
    };
    let (bv, bg) = (b.clone(), b);
    SmoothFunction::new(
        n,
        move |x| 0.5 * x.distance(&bv).powi(2) + alpha * x.iter().map(|&t| huber(t)).sum::<f64>(),
        move |x| x.zip_map(&bg, |t, bi| t - bi + alpha * (t / gamma).clamp(-1.0, 1.0)),
    )
    .with_hessian(move |x| {
        let d: Vec<f64> = x
            .iter()
            .map(|&t| 1.0 + if t.abs() < gamma { alpha / gamma } else { 0.0 })
            .collect();
        Matrix::diag(&d)
    })
    .with_lipschitz(1.0 + alpha / gamma)
    .expect("positive by construction")
}
