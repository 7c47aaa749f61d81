//! JSON form of [`ProxFunctional`]: `{"kind": ..., "params": {...}}`.
//!
//! | kind               | params                                        |
//! |--------------------|-----------------------------------------------|
//! | `Zero`             | `{}`                                          |
//! | `SquaredL2`        | `{}`                                          |
//! | `L1`, `L2Norm`     | `{"weight": w}` (default 1)                   |
//! | `BoxIndicator`     | `{"lower": [..], "upper": [..]}`, `null` = ∓∞ |
//! | `BoxSupport`       | same as `BoxIndicator`                        |
//! | `InfBallIndicator` | `{"radius": r}`                               |
//! | `L2BallIndicator`  | `{"radius": r}`                               |
//! | `Scaled`           | `{"alpha": a, "inner": F}`                    |
//! | `EpiScaled`        | `{"alpha": a, "inner": F}`                    |
//! | `Shifted`          | `{"shift": [..], "inner": F}`                 |
//! | `Tilted`           | `{"slope": [..], "inner": F}`                 |
//! | `SeparableSum`     | `{"terms": [F, ...]}`                         |

use serde::{Deserialize, Serialize};

use super::ProxFunctional;
use crate::error::Error;
use crate::linalg::Vector;

fn one() -> f64 {
    1.0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct Empty {}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub(super) enum Repr {
    Zero(#[serde(default)] Option<Empty>),
    SquaredL2(#[serde(default)] Option<Empty>),
    L1 {
        #[serde(default = "one")]
        weight: f64,
    },
    L2Norm {
        #[serde(default = "one")]
        weight: f64,
    },
    BoxIndicator {
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
    },
    BoxSupport {
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
    },
    InfBallIndicator {
        radius: f64,
    },
    L2BallIndicator {
        radius: f64,
    },
    Scaled {
        alpha: f64,
        inner: Box<ProxFunctional>,
    },
    EpiScaled {
        alpha: f64,
        inner: Box<ProxFunctional>,
    },
    Shifted {
        shift: Vector,
        inner: Box<ProxFunctional>,
    },
    Tilted {
        slope: Vector,
        inner: Box<ProxFunctional>,
    },
    SeparableSum {
        terms: Vec<ProxFunctional>,
    },
}

fn encode(bounds: &[f64]) -> Vec<Option<f64>> {
    bounds.iter().map(|&b| b.is_finite().then_some(b)).collect()
}

fn decode(bounds: Vec<Option<f64>>, missing: f64) -> Vec<f64> {
    bounds.into_iter().map(|b| b.unwrap_or(missing)).collect()
}

impl From<ProxFunctional> for Repr {
    fn from(f: ProxFunctional) -> Self {
        use ProxFunctional as P;
        match f {
            P::Zero => Repr::Zero(Some(Empty {})),
            P::SquaredL2 => Repr::SquaredL2(Some(Empty {})),
            P::L1 { weight } => Repr::L1 { weight },
            P::L2Norm { weight } => Repr::L2Norm { weight },
            P::BoxIndicator { lower, upper } => Repr::BoxIndicator {
                lower: encode(&lower),
                upper: encode(&upper),
            },
            P::BoxSupport { lower, upper } => Repr::BoxSupport {
                lower: encode(&lower),
                upper: encode(&upper),
            },
            P::InfBallIndicator { radius } => Repr::InfBallIndicator { radius },
            P::L2BallIndicator { radius } => Repr::L2BallIndicator { radius },
            P::Scaled { alpha, inner } => Repr::Scaled { alpha, inner },
            P::EpiScaled { alpha, inner } => Repr::EpiScaled { alpha, inner },
            P::Shifted { shift, inner } => Repr::Shifted { shift, inner },
            P::Tilted { slope, inner } => Repr::Tilted { slope, inner },
            P::SeparableSum { terms } => Repr::SeparableSum { terms },
        }
    }
}

impl TryFrom<Repr> for ProxFunctional {
    type Error = Error;

    fn try_from(r: Repr) -> Result<Self, Error> {
        use ProxFunctional as P;
        let f = match r {
            Repr::Zero(_) => P::Zero,
            Repr::SquaredL2(_) => P::SquaredL2,
            Repr::L1 { weight } => P::L1 { weight },
            Repr::L2Norm { weight } => P::L2Norm { weight },
            Repr::BoxIndicator { lower, upper } => P::BoxIndicator {
                lower: decode(lower, f64::NEG_INFINITY),
                upper: decode(upper, f64::INFINITY),
            },
            Repr::BoxSupport { lower, upper } => P::BoxSupport {
                lower: decode(lower, f64::NEG_INFINITY),
                upper: decode(upper, f64::INFINITY),
            },
            Repr::InfBallIndicator { radius } => P::InfBallIndicator { radius },
            Repr::L2BallIndicator { radius } => P::L2BallIndicator { radius },
            Repr::Scaled { alpha, inner } => P::Scaled { alpha, inner },
            Repr::EpiScaled { alpha, inner } => P::EpiScaled { alpha, inner },
            Repr::Shifted { shift, inner } => P::Shifted { shift, inner },
            Repr::Tilted { slope, inner } => P::Tilted { slope, inner },
            Repr::SeparableSum { terms } => P::SeparableSum { terms },
        };
        f.validate()?;
        if let P::Shifted { shift: v, inner } | P::Tilted { slope: v, inner } = &f {
            inner.check_dim(v.len())?;
        }
        Ok(f)
    }
}

impl std::fmt::Display for ProxFunctional {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match serde_json::to_string(self) {
            Ok(s) => f.write_str(&s),
            Err(_) => f.write_str(self.kind_name()),
        }
    }
}
