use crate::linalg::Vector;

use super::ProxFunctional;

/// One representative of every catalog kind on `ℝⁿ`, with fixed parameters.
///
/// Used by the property suites; the list is closed under conjugation only up
/// to parameters, so suites that need conjugates call
/// [`ProxFunctional::conjugate`].
pub fn sample_catalog(n: usize) -> Vec<(String, ProxFunctional)> {
    let ramp = |lo: f64, step: f64| (0..n).map(|i| lo + step * i as f64).collect::<Vec<f64>>();
    let lower = ramp(-1.0, -0.25);
    let upper = ramp(0.5, 0.5);
    let shift = Vector::from_slice(&ramp(0.5, -0.75));
    let base = vec![
        ("zero", ProxFunctional::Zero),
        ("squared_l2", ProxFunctional::SquaredL2),
        ("l1", ProxFunctional::L1 { weight: 0.7 }),
        ("l2_norm", ProxFunctional::L2Norm { weight: 1.3 }),
        (
            "box",
            ProxFunctional::BoxIndicator {
                lower: lower.clone(),
                upper: upper.clone(),
            },
        ),
        (
            "half_box",
            ProxFunctional::BoxIndicator {
                lower: vec![f64::NEG_INFINITY; n],
                upper: upper.clone(),
            },
        ),
        ("box_support", ProxFunctional::BoxSupport { lower, upper }),
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
            ProxFunctional::tilted(shift, ProxFunctional::InfBallIndicator { radius: 1.2 }),
        ),
        (
            "separable",
            ProxFunctional::SeparableSum {
                terms: (0..n)
                    .map(|i| match i % 3 {
                        0 => ProxFunctional::L1 { weight: 0.4 },
                        1 => ProxFunctional::box_uniform(-0.3, 2.0),
                        _ => ProxFunctional::SquaredL2,
                    })
                    .collect(),
            },
        ),
    ];
    base.into_iter().map(|(name, f)| (name.to_string(), f)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_valid_in_every_dimension() {
        for n in 1..6 {
            for (name, f) in sample_catalog(n) {
                f.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
                f.check_dim(n).unwrap();
                f.conjugate().validate().unwrap();
            }
        }
    }
}
