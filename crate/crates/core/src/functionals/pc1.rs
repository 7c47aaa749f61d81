use std::fmt;
use std::sync::Arc;

use crate::error::{ensure_positive, Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One continuously differentiable piece of a [`ScalarPC1`].
#[derive(Clone)]
pub struct Piece {
    value: ScalarFn,
    derivative: ScalarFn,
}

impl Piece {
    pub fn new(
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
        }
    }

    /// The affine piece `t ↦ slope·t + offset`.
    pub fn affine(slope: f64, offset: f64) -> Self {
        Self::new(move |t| slope * t + offset, move |_| slope)
    }
}

impl fmt::Debug for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Piece")
    }
}

/// A closed interval `[lo, hi]` of generalized derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClarkeInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ClarkeInterval {
    pub fn contains(&self, s: f64) -> bool {
        self.lo <= s && s <= self.hi
    }
}

/// A continuous scalar function built from C¹ pieces.
///
/// The real line is cut at `breakpoints` into `breakpoints.len() + 1` open
/// intervals; `selection[j]` names the piece that governs interval `j`.
/// A piece may govern several intervals, and pieces that govern none are
/// allowed (they are active somewhere but never essentially active).
#[derive(Clone, Debug)]
pub struct ScalarPC1 {
    pieces: Vec<Piece>,
    breakpoints: Vec<f64>,
    selection: Vec<usize>,
}

impl ScalarPC1 {
    pub fn new(pieces: Vec<Piece>, breakpoints: Vec<f64>, selection: Vec<usize>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidParameter { name: "pc1", reason };
        if selection.len() != breakpoints.len() + 1 {
            return Err(invalid(format!(
                "{} breakpoints need {} selections, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                selection.len()
            )));
        }
        if let Some(&j) = selection.iter().find(|&&j| j >= pieces.len()) {
            return Err(invalid(format!("selection refers to missing piece {j}")));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("breakpoints must be finite and strictly increasing".into()));
        }
        for (k, &b) in breakpoints.iter().enumerate() {
            let left = (pieces[selection[k]].value)(b);
            let right = (pieces[selection[k + 1]].value)(b);
            if (left - right).abs() > 1e-9 * (1.0 + left.abs().max(right.abs())) {
                return Err(invalid(format!("pieces disagree at breakpoint {b}: {left} vs {right}")));
            }
        }
        Ok(Self {
            pieces,
            breakpoints,
            selection,
        })
    }

    /// `|t|`
    pub fn abs() -> Self {
        Self::new(
            vec![Piece::affine(-1.0, 0.0), Piece::affine(1.0, 0.0)],
            vec![0.0],
            vec![0, 1],
        )
        .expect("valid by construction")
    }

    /// `max(0, t − c)`
    pub fn hinge(c: f64) -> Self {
        Self::new(
            vec![Piece::affine(0.0, 0.0), Piece::affine(1.0, -c)],
            vec![c],
            vec![0, 1],
        )
        .expect("valid by construction")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    fn interval_of(&self, t: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < t)
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.pieces[self.selection[self.interval_of(t)]].value)(t)
    }

    /// A Newton derivative: the derivative of the piece owning the interval
    /// at or to the left of `t`. At a breakpoint this picks the left piece.
    pub fn newton_derivative(&self, t: f64) -> f64 {
        (self.pieces[self.selection[self.interval_of(t)]].derivative)(t)
    }

    /// Clarke generalized derivative at `t`: the hull of the derivatives of
    /// pieces governing the intervals immediately left and right of `t`.
    ///
    /// A breakpoint within `eps` of `t` is treated as coinciding with it; two
    /// such breakpoints make the answer ambiguous and raise [`Error::Precision`].
    pub fn clarke_interval(&self, t: f64, eps: f64) -> Result<ClarkeInterval> {
        ensure_positive("eps", eps)?;
        let near: Vec<usize> = (0..self.breakpoints.len())
            .filter(|&k| (self.breakpoints[k] - t).abs() <= eps)
            .collect();
        let owners: Vec<usize> = match near.as_slice() {
            [] => vec![self.selection[self.interval_of(t)]],
            [k] => vec![self.selection[*k], self.selection[*k + 1]],
            _ => return Err(Error::Precision { t, eps }),
        };
        let slopes = owners.iter().map(|&j| (self.pieces[j].derivative)(t));
        let (lo, hi) = slopes.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)));
        Ok(ClarkeInterval { lo, hi })
    }
}

/// Free-function form of [`ScalarPC1::clarke_interval`].
pub fn clarke_interval(f: &ScalarPC1, t: f64, eps: f64) -> Result<ClarkeInterval> {
    f.clarke_interval(t, eps)
}
