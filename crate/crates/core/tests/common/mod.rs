//! Shared fixtures for the integration tests.
#![allow(dead_code)]

use proxkit::functionals::ProxFunctional;
use proxkit::linalg::{Matrix, Vector};
use proxkit::problems::{gen, GenParams, ProblemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use twofloat::TwoFloat;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn normal_vector(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vector {
    Vector::from_slice(&(0..n).map(|_| scale * normal(rng)).collect::<Vec<_>>())
}

/// Log-uniform sample from `[lo, hi]`.
pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

pub const DIM: usize = 4;

fn v(x: &[f64]) -> Vector {
    Vector::from_slice(x)
}

/// Catalog members in `R⁴`, covering every kind and the combinators.
pub fn vector_catalog() -> Vec<(&'static str, ProxFunctional)> {
    let inf = f64::INFINITY;
    let shift = v(&[0.5, -1.0, 2.0, 0.0]);
    vec![
        ("zero", ProxFunctional::Zero),
        ("squared_l2", ProxFunctional::SquaredL2),
        ("l1", ProxFunctional::L1 { weight: 0.7 }),
        ("l2_norm", ProxFunctional::L2Norm { weight: 1.3 }),
        (
            "box",
            ProxFunctional::BoxIndicator {
                lower: vec![-1.0, -0.5, 0.0, -2.0],
                upper: vec![1.0, 0.5, inf, 3.0],
            },
        ),
        ("half_space_box", ProxFunctional::box_uniform(0.0, inf)),
        (
            "box_support",
            ProxFunctional::BoxSupport {
                lower: vec![-1.0, -0.5, 0.0, -2.0],
                upper: vec![1.0, 0.5, 1.5, 3.0],
            },
        ),
        ("inf_ball", ProxFunctional::InfBallIndicator { radius: 1.5 }),
        ("origin", ProxFunctional::InfBallIndicator { radius: 0.0 }),
        ("l2_ball", ProxFunctional::L2BallIndicator { radius: 0.8 }),
        ("scaled_l1", ProxFunctional::scaled(2.5, ProxFunctional::l1())),
        (
            "epi_scaled_sq",
            ProxFunctional::EpiScaled {
                alpha: 0.5,
                inner: Box::new(ProxFunctional::SquaredL2),
            },
        ),
        (
            "epi_scaled_l2",
            ProxFunctional::EpiScaled {
                alpha: 2.0,
                inner: Box::new(ProxFunctional::l2_norm()),
            },
        ),
        (
            "shifted_l1",
            ProxFunctional::shifted(shift.clone(), ProxFunctional::l1()),
        ),
        (
            "shifted_ball",
            ProxFunctional::shifted(shift.clone(), ProxFunctional::L2BallIndicator { radius: 1.0 }),
        ),
        (
            "tilted_sq",
            ProxFunctional::tilted(shift.clone(), ProxFunctional::SquaredL2),
        ),
        (
            "tilted_inf_ball",
            ProxFunctional::tilted(shift, ProxFunctional::InfBallIndicator { radius: 1.0 }),
        ),
        (
            "separable",
            ProxFunctional::SeparableSum {
                terms: vec![
                    ProxFunctional::L1 { weight: 2.0 },
                    ProxFunctional::box_uniform(-1.0, 1.0),
                    ProxFunctional::SquaredL2,
                    ProxFunctional::Zero,
                ],
            },
        ),
    ]
}

/// A scalar functional with an independent extended-precision definition
/// on its domain `[lo, hi]`.
pub struct ScalarCase {
    pub name: &'static str,
    pub f: ProxFunctional,
    pub lo: f64,
    pub hi: f64,
    pub def: fn(TwoFloat) -> TwoFloat,
}

fn tf(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

pub fn scalar_catalog() -> Vec<ScalarCase> {
    let inf = f64::INFINITY;
    let s1 = |x: f64| Vector::from_slice(&[x]);
    vec![
        ScalarCase {
            name: "zero",
            f: ProxFunctional::Zero,
            lo: -inf,
            hi: inf,
            def: |_| tf(0.0),
        },
        ScalarCase {
            name: "squared_l2",
            f: ProxFunctional::SquaredL2,
            lo: -inf,
            hi: inf,
            def: |z| z * z * 0.5,
        },
        ScalarCase {
            name: "l1",
            f: ProxFunctional::L1 { weight: 0.7 },
            lo: -inf,
            hi: inf,
            def: |z| z.abs() * 0.7,
        },
        ScalarCase {
            name: "l2_norm",
            f: ProxFunctional::L2Norm { weight: 1.3 },
            lo: -inf,
            hi: inf,
            def: |z| z.abs() * 1.3,
        },
        ScalarCase {
            name: "box",
            f: ProxFunctional::box_uniform(-0.5, 2.0),
            lo: -0.5,
            hi: 2.0,
            def: |_| tf(0.0),
        },
        ScalarCase {
            name: "half_line",
            f: ProxFunctional::box_uniform(0.0, inf),
            lo: 0.0,
            hi: inf,
            def: |_| tf(0.0),
        },
        ScalarCase {
            name: "box_support",
            f: ProxFunctional::BoxSupport {
                lower: vec![-0.5],
                upper: vec![2.0],
            },
            lo: -inf,
            hi: inf,
            def: |z| if z > tf(0.0) { z * 2.0 } else { z * -0.5 },
        },
        ScalarCase {
            name: "inf_ball",
            f: ProxFunctional::InfBallIndicator { radius: 1.5 },
            lo: -1.5,
            hi: 1.5,
            def: |_| tf(0.0),
        },
        ScalarCase {
            name: "l2_ball",
            f: ProxFunctional::L2BallIndicator { radius: 0.8 },
            lo: -0.8,
            hi: 0.8,
            def: |_| tf(0.0),
        },
        ScalarCase {
            name: "scaled_l1",
            f: ProxFunctional::scaled(2.5, ProxFunctional::l1()),
            lo: -inf,
            hi: inf,
            def: |z| z.abs() * 2.5,
        },
        ScalarCase {
            name: "epi_scaled_sq",
            f: ProxFunctional::EpiScaled {
                alpha: 0.5,
                inner: Box::new(ProxFunctional::SquaredL2),
            },
            lo: -inf,
            hi: inf,
            def: |z| z * z,
        },
        ScalarCase {
            name: "epi_scaled_support",
            f: ProxFunctional::EpiScaled {
                alpha: 2.0,
                inner: Box::new(ProxFunctional::BoxSupport {
                    lower: vec![-1.0],
                    upper: vec![3.0],
                }),
            },
            lo: -inf,
            hi: inf,
            def: |z| if z > tf(0.0) { z * 3.0 } else { -z },
        },
        ScalarCase {
            name: "shifted_l1",
            f: ProxFunctional::shifted(s1(1.2), ProxFunctional::l1()),
            lo: -inf,
            hi: inf,
            def: |z| (z - 1.2).abs(),
        },
        ScalarCase {
            name: "shifted_inf_ball",
            f: ProxFunctional::shifted(s1(-0.3), ProxFunctional::InfBallIndicator { radius: 1.0 }),
            lo: -1.3,
            hi: 0.7,
            def: |_| tf(0.0),
        },
        ScalarCase {
            name: "tilted_sq",
            f: ProxFunctional::tilted(s1(-0.4), ProxFunctional::SquaredL2),
            lo: -inf,
            hi: inf,
            def: |z| z * z * 0.5 - z * 0.4,
        },
        ScalarCase {
            name: "separable_l1",
            f: ProxFunctional::SeparableSum {
                terms: vec![ProxFunctional::L1 { weight: 2.0 }],
            },
            lo: -inf,
            hi: inf,
            def: |z| z.abs() * 2.0,
        },
    ]
}

/// Minimizer of `½(z − t)² + γ·def(z)` over `[lo, hi]` by golden-section
/// search, with the objective evaluated in double-double precision so the
/// bracket can shrink well below `√ε`.
pub fn golden_section_prox(case: &ScalarCase, gamma: f64, t: f64) -> f64 {
    let reach = 2.0 * t.abs() + 10.0 * gamma + 10.0;
    let mut a = case.lo.max(t - reach);
    let mut b = case.hi.min(t + reach);
    let phi = |z: f64| {
        let d = tf(z) - t;
        d * d * 0.5 + (case.def)(tf(z)) * gamma
    };
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (phi(c), phi(d));
    for _ in 0..400 {
        if b - a <= 1e-15 * a.abs().max(b.abs()).max(1.0) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = phi(d);
        }
    }
    0.5 * (a + b)
}

/// Dimension of the `seed`-th small lasso instance (2 through 8).
pub fn small_dim(seed: u64) -> usize {
    2 + (seed % 7) as usize
}

/// Lasso instances with `N ≤ 8` and `m = N + 4` rows.
pub fn small_lasso(seed: u64) -> ProblemSpec {
    let n = small_dim(seed);
    gen(
        &GenParams::Lasso {
            n,
            m: n + 4,
            alpha: 0.5,
        },
        seed,
    )
    .expect("valid parameters")
}

pub fn small_boxqp(seed: u64) -> ProblemSpec {
    gen(&GenParams::BoxQp { n: small_dim(seed) }, seed).expect("valid parameters")
}

pub fn lasso_data(spec: &ProblemSpec) -> (Matrix, Vector, f64) {
    match spec {
        ProblemSpec::Lasso { a, b, alpha, .. } => (a.clone(), b.clone(), *alpha),
        _ => panic!("not a lasso instance"),
    }
}

/// Largest violation of `d[k+1] ≤ d[k]`.
pub fn worst_increase(d: &[f64]) -> f64 {
    d.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}
