//! Proper convex lower semicontinuous functionals with closed-form proximal
//! maps and Fenchel conjugates.
//!
//! The catalog is closed under conjugation: [`ProxFunctional::conjugate`]
//! always returns another catalog entry, and conjugating twice gives back a
//! structurally identical value. Values live in the extended reals, with
//! `+∞` represented by `f64::INFINITY`.

mod pc1;
mod repr;
mod samples;
mod smooth;

pub use pc1::{clarke_interval, ClarkeInterval, Piece, ScalarPC1};
pub use samples::sample_catalog;
pub use smooth::SmoothFunction;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::linalg::{check_dim, Vector};

/// Slack allowed when testing membership in a constraint set.
///
/// Projections computed in floating point can overshoot a bound by a few
/// ulps; points within this relative distance of the set count as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-10;

/// A functional from the closed-form catalog.
///
/// Per-coordinate bounds in [`ProxFunctional::BoxIndicator`] and
/// [`ProxFunctional::BoxSupport`] broadcast when they have length one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "repr::Repr", into = "repr::Repr")]
pub enum ProxFunctional {
    /// `F ≡ 0`
    Zero,
    /// `½‖x‖²`
    SquaredL2,
    /// `w‖x‖₁`
    L1 { weight: f64 },
    /// `w‖x‖₂`
    L2Norm { weight: f64 },
    /// Indicator of `{lower ≤ x ≤ upper}`; bounds may be infinite.
    BoxIndicator { lower: Vec<f64>, upper: Vec<f64> },
    /// Support function of the box `[lower, upper]`, the conjugate of its indicator.
    BoxSupport { lower: Vec<f64>, upper: Vec<f64> },
    /// Indicator of `{‖x‖∞ ≤ radius}`. Radius zero is the indicator of `{0}`.
    InfBallIndicator { radius: f64 },
    /// Indicator of `{‖x‖₂ ≤ radius}`.
    L2BallIndicator { radius: f64 },
    /// `alpha · F(x)`
    Scaled { alpha: f64, inner: Box<ProxFunctional> },
    /// `alpha · F(x / alpha)`
    EpiScaled { alpha: f64, inner: Box<ProxFunctional> },
    /// `F(x − shift)`
    Shifted { shift: Vector, inner: Box<ProxFunctional> },
    /// `F(x) + ⟨slope, x⟩`
    Tilted { slope: Vector, inner: Box<ProxFunctional> },
    /// `Σᵢ fᵢ(xᵢ)`; each term acts on a single coordinate.
    SeparableSum { terms: Vec<ProxFunctional> },
}

/// Anything with a value and a proximal map. Splitting methods are written
/// against this trait so they can also take non-catalog terms.
pub trait Proximable {
    fn value(&self, x: &Vector) -> Result<f64>;
    fn prox(&self, gamma: f64, x: &Vector) -> Result<Vector>;
}

impl Proximable for ProxFunctional {
    fn value(&self, x: &Vector) -> Result<f64> {
        ProxFunctional::value(self, x)
    }

    fn prox(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        ProxFunctional::prox(self, gamma, x)
    }
}

/// `a + b` in the extended reals; both operands must be `> −∞`.
pub(crate) fn ext_add(a: f64, b: f64) -> f64 {
    assert!(
        a > f64::NEG_INFINITY && b > f64::NEG_INFINITY,
        "extended-real sum with -inf operand"
    );
    a + b
}

/// `a − b` in the extended reals. `∞ − ∞` is a programming error.
pub(crate) fn ext_sub(a: f64, b: f64) -> f64 {
    assert!(
        !(a.is_infinite() && b.is_infinite() && a.signum() == b.signum()),
        "extended-real difference inf - inf"
    );
    a - b
}

fn within(v: f64, lo: f64, hi: f64) -> bool {
    v >= lo - FEASIBILITY_TOL * lo.abs().max(1.0) && v <= hi + FEASIBILITY_TOL * hi.abs().max(1.0)
}

fn bound_at(bounds: &[f64], i: usize) -> f64 {
    if bounds.len() == 1 {
        bounds[0]
    } else {
        bounds[i]
    }
}

fn support_term(y: f64, lo: f64, hi: f64) -> f64 {
    if y > 0.0 {
        hi * y
    } else if y < 0.0 {
        lo * y
    } else {
        0.0
    }
}

impl ProxFunctional {
    pub fn l1() -> Self {
        Self::L1 { weight: 1.0 }
    }

    pub fn l2_norm() -> Self {
        Self::L2Norm { weight: 1.0 }
    }

    /// Indicator of `[lower, upper]` applied to every coordinate.
    pub fn box_uniform(lower: f64, upper: f64) -> Self {
        Self::BoxIndicator {
            lower: vec![lower],
            upper: vec![upper],
        }
    }

    pub fn scaled(alpha: f64, inner: ProxFunctional) -> Self {
        Self::Scaled {
            alpha,
            inner: Box::new(inner),
        }
    }

    pub fn shifted(shift: Vector, inner: ProxFunctional) -> Self {
        Self::Shifted {
            shift,
            inner: Box::new(inner),
        }
    }

    pub fn tilted(slope: Vector, inner: ProxFunctional) -> Self {
        Self::Tilted {
            slope,
            inner: Box::new(inner),
        }
    }

    /// `½‖x − b‖²`
    pub fn squared_distance(b: Vector) -> Self {
        Self::shifted(b, Self::SquaredL2)
    }

    /// Short name of the outermost kind, as used in JSON.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Zero => "Zero",
            Self::SquaredL2 => "SquaredL2",
            Self::L1 { .. } => "L1",
            Self::L2Norm { .. } => "L2Norm",
            Self::BoxIndicator { .. } => "BoxIndicator",
            Self::BoxSupport { .. } => "BoxSupport",
            Self::InfBallIndicator { .. } => "InfBallIndicator",
            Self::L2BallIndicator { .. } => "L2BallIndicator",
            Self::Scaled { .. } => "Scaled",
            Self::EpiScaled { .. } => "EpiScaled",
            Self::Shifted { .. } => "Shifted",
            Self::Tilted { .. } => "Tilted",
            Self::SeparableSum { .. } => "SeparableSum",
        }
    }

    /// Checks parameter ranges (positive weights, nonempty boxes, ...).
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
        match self {
            Self::Zero | Self::SquaredL2 => Ok(()),
            Self::L1 { weight } | Self::L2Norm { weight } => ensure_positive("weight", *weight),
            Self::BoxIndicator { lower, upper } | Self::BoxSupport { lower, upper } => {
                if lower.is_empty() || upper.is_empty() {
                    return bad("bounds", "must not be empty".into());
                }
                if lower.len() != upper.len() && lower.len() != 1 && upper.len() != 1 {
                    return bad("bounds", "lower and upper lengths differ".into());
                }
                let n = lower.len().max(upper.len());
                for i in 0..n {
                    let (lo, hi) = (bound_at(lower, i), bound_at(upper, i));
                    if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                        return bad("bounds", format!("empty interval [{lo}, {hi}] at {i}"));
                    }
                }
                Ok(())
            }
            Self::InfBallIndicator { radius } => {
                if radius.is_finite() && *radius >= 0.0 {
                    Ok(())
                } else {
                    bad("radius", format!("must be finite and >= 0, got {radius}"))
                }
            }
            Self::L2BallIndicator { radius } => ensure_positive("radius", *radius),
            Self::Scaled { alpha, inner } | Self::EpiScaled { alpha, inner } => {
                ensure_positive("alpha", *alpha)?;
                inner.validate()
            }
            Self::Shifted { inner, .. } | Self::Tilted { inner, .. } => inner.validate(),
            Self::SeparableSum { terms } => {
                if terms.is_empty() {
                    return bad("terms", "must not be empty".into());
                }
                for t in terms {
                    t.validate()?;
                    t.check_dim(1)?;
                }
                Ok(())
            }
        }
    }

    /// Fixed dimension implied by the parameters, if any.
    pub fn fixed_dim(&self) -> Option<usize> {
        match self {
            Self::BoxIndicator { lower, upper } | Self::BoxSupport { lower, upper } => {
                let n = lower.len().max(upper.len());
                (n > 1).then_some(n)
            }
            Self::Shifted { shift: v, inner } | Self::Tilted { slope: v, inner } => {
                debug_assert!(inner.fixed_dim().is_none_or(|d| d == v.len()));
                Some(v.len())
            }
            Self::Scaled { inner, .. } | Self::EpiScaled { inner, .. } => inner.fixed_dim(),
            Self::SeparableSum { terms } => Some(terms.len()),
            _ => None,
        }
    }

    /// Whether `x ∈ ℝⁿ` is an admissible argument.
    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self.fixed_dim() {
            Some(d) => check_dim(d, n),
            None => Ok(()),
        }?;
        match self {
            Self::Scaled { inner, .. }
            | Self::EpiScaled { inner, .. }
            | Self::Shifted { inner, .. }
            | Self::Tilted { inner, .. } => inner.check_dim(n),
            _ => Ok(()),
        }
    }

    /// `F(x)`, `+∞` outside the effective domain.
    pub fn value(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.value_unchecked(x))
    }

    fn value_unchecked(&self, x: &Vector) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::SquaredL2 => 0.5 * x.norm_sq(),
            Self::L1 { weight } => weight * x.norm_l1(),
            Self::L2Norm { weight } => weight * x.norm(),
            Self::BoxIndicator { lower, upper } => {
                let inside = x
                    .iter()
                    .enumerate()
                    .all(|(i, &v)| within(v, bound_at(lower, i), bound_at(upper, i)));
                if inside {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Self::BoxSupport { lower, upper } => x
                .iter()
                .enumerate()
                .map(|(i, &v)| support_term(v, bound_at(lower, i), bound_at(upper, i)))
                .fold(0.0, ext_add),
            Self::InfBallIndicator { radius } => {
                if x.iter().all(|&v| within(v, -radius, *radius)) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Self::L2BallIndicator { radius } => {
                if within(x.norm(), 0.0, *radius) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Self::Scaled { alpha, inner } => alpha * inner.value_unchecked(x),
            Self::EpiScaled { alpha, inner } => alpha * inner.value_unchecked(&x.scale(1.0 / alpha)),
            Self::Shifted { shift, inner } => inner.value_unchecked(&(x - shift)),
            Self::Tilted { slope, inner } => ext_add(inner.value_unchecked(x), slope.dot(x)),
            Self::SeparableSum { terms } => terms
                .iter()
                .zip(x.iter())
                .map(|(t, &v)| t.value_unchecked(&Vector::from_slice(&[v])))
                .fold(0.0, ext_add),
        }
    }

    /// `prox_{γF}(x)`: the unique minimizer of `z ↦ ½‖z − x‖² + γF(z)`.
    pub fn prox(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        ensure_positive("gamma", gamma)?;
        self.check_dim(x.len())?;
        Ok(self.prox_unchecked(gamma, x))
    }

    fn prox_unchecked(&self, gamma: f64, x: &Vector) -> Vector {
        match self {
            Self::Zero => x.clone(),
            Self::SquaredL2 => x.scale(1.0 / (1.0 + gamma)),
            Self::L1 { weight } => {
                let t = gamma * weight;
                x.map(|v| {
                    if v > t {
                        v - t
                    } else if v < -t {
                        v + t
                    } else {
                        0.0
                    }
                })
            }
            Self::L2Norm { weight } => {
                let norm = x.norm();
                let t = gamma * weight;
                if norm <= t {
                    Vector::zeros(x.len())
                } else {
                    x.scale(1.0 - t / norm)
                }
            }
            Self::BoxIndicator { lower, upper } => {
                let mut out = x.clone();
                for i in 0..x.len() {
                    out[i] = x[i].clamp(bound_at(lower, i), bound_at(upper, i));
                }
                out
            }
            Self::BoxSupport { lower, upper } => {
                let mut out = x.clone();
                for i in 0..x.len() {
                    let (lo, hi) = (gamma * bound_at(lower, i), gamma * bound_at(upper, i));
                    let v = x[i];
                    out[i] = if v > hi {
                        v - hi
                    } else if v < lo {
                        v - lo
                    } else {
                        0.0
                    };
                }
                out
            }
            Self::InfBallIndicator { radius } => x.map(|v| v.clamp(-radius, *radius)),
            Self::L2BallIndicator { radius } => {
                let norm = x.norm();
                if norm <= *radius {
                    x.clone()
                } else {
                    x.scale(radius / norm)
                }
            }
            Self::Scaled { alpha, inner } => inner.prox_unchecked(gamma * alpha, x),
            Self::EpiScaled { alpha, inner } => {
                inner.prox_unchecked(gamma / alpha, &x.scale(1.0 / alpha)).scale(*alpha)
            }
            Self::Shifted { shift, inner } => &inner.prox_unchecked(gamma, &(x - shift)) + shift,
            Self::Tilted { slope, inner } => inner.prox_unchecked(gamma, &x.axpy(-gamma, slope)),
            Self::SeparableSum { terms } => {
                let mut out = x.clone();
                for (i, t) in terms.iter().enumerate() {
                    out[i] = t.prox_unchecked(gamma, &Vector::from_slice(&[x[i]]))[0];
                }
                out
            }
        }
    }

    /// The Fenchel conjugate, as another catalog entry.
    pub fn conjugate(&self) -> ProxFunctional {
        match self {
            Self::Zero => Self::InfBallIndicator { radius: 0.0 },
            Self::SquaredL2 => Self::SquaredL2,
            Self::L1 { weight } => Self::InfBallIndicator { radius: *weight },
            Self::L2Norm { weight } => Self::L2BallIndicator { radius: *weight },
            Self::BoxIndicator { lower, upper } => Self::BoxSupport {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            Self::BoxSupport { lower, upper } => Self::BoxIndicator {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            Self::InfBallIndicator { radius } => {
                if *radius == 0.0 {
                    Self::Zero
                } else {
                    Self::L1 { weight: *radius }
                }
            }
            Self::L2BallIndicator { radius } => Self::L2Norm { weight: *radius },
            Self::Scaled { alpha, inner } => Self::EpiScaled {
                alpha: *alpha,
                inner: Box::new(inner.conjugate()),
            },
            Self::EpiScaled { alpha, inner } => Self::Scaled {
                alpha: *alpha,
                inner: Box::new(inner.conjugate()),
            },
            Self::Shifted { shift, inner } => Self::Tilted {
                slope: shift.clone(),
                inner: Box::new(inner.conjugate()),
            },
            Self::Tilted { slope, inner } => Self::Shifted {
                shift: slope.clone(),
                inner: Box::new(inner.conjugate()),
            },
            Self::SeparableSum { terms } => Self::SeparableSum {
                terms: terms.iter().map(Self::conjugate).collect(),
            },
        }
    }

    /// `prox_{γF*}(x) = x − γ prox_{γ⁻¹F}(γ⁻¹x)`, computed from `F`'s own prox.
    pub fn prox_conjugate(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        ensure_positive("gamma", gamma)?;
        self.check_dim(x.len())?;
        let inner = self.prox_unchecked(1.0 / gamma, &x.scale(1.0 / gamma));
        Ok(x.axpy(-gamma, &inner))
    }

    /// Moreau envelope `F_γ(x) = ‖prox_{γF}(x) − x‖²/(2γ) + F(prox_{γF}(x))`.
    pub fn moreau_envelope(&self, gamma: f64, x: &Vector) -> Result<f64> {
        let p = self.prox(gamma, x)?;
        let fp = self.value_unchecked(&p);
        debug_assert!(fp.is_finite(), "prox left the effective domain of {}", self.kind_name());
        Ok(p.distance(x).powi(2) / (2.0 * gamma) + fp)
    }

    /// Yosida approximation `(∂F)_γ(x) = (x − prox_{γF}(x))/γ`, the gradient of `F_γ`.
    pub fn yosida(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        let p = self.prox(gamma, x)?;
        Ok((x - &p).scale(1.0 / gamma))
    }

    /// `F(x) + F*(x*) − ⟨x*, x⟩`, clamped at zero. Vanishes iff `x* ∈ ∂F(x)`.
    pub fn fenchel_young_gap(&self, x: &Vector, xstar: &Vector) -> Result<f64> {
        check_dim(x.len(), xstar.len())?;
        let f = self.value(x)?;
        let fstar = self.conjugate().value(xstar)?;
        let gap = ext_sub(ext_add(f, fstar), xstar.dot(x));
        Ok(gap.max(0.0))
    }
}

/// Free-function forms of the catalog operations.
pub fn value(f: &ProxFunctional, x: &Vector) -> Result<f64> {
    f.value(x)
}

pub fn prox(f: &ProxFunctional, gamma: f64, x: &Vector) -> Result<Vector> {
    f.prox(gamma, x)
}

pub fn conjugate(f: &ProxFunctional) -> ProxFunctional {
    f.conjugate()
}

pub fn prox_conjugate(f: &ProxFunctional, gamma: f64, x: &Vector) -> Result<Vector> {
    f.prox_conjugate(gamma, x)
}

pub fn moreau_envelope(f: &ProxFunctional, gamma: f64, x: &Vector) -> Result<f64> {
    f.moreau_envelope(gamma, x)
}

pub fn yosida(f: &ProxFunctional, gamma: f64, x: &Vector) -> Result<Vector> {
    f.yosida(gamma, x)
}

pub fn fenchel_young_gap(f: &ProxFunctional, x: &Vector, xstar: &Vector) -> Result<f64> {
    f.fenchel_young_gap(x, xstar)
}
