use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};
use crate::linalg::Vector;

/// Iteration controls shared by all solvers.
///
/// Reads from JSON with every field optional, e.g.
/// `{"max_iter": 500, "tol": 1e-10, "step": 0.25}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub max_iter: usize,
    pub tol: f64,
    /// Step `γ`. Defaults to `1/L` for gradient methods and to 1 otherwise.
    pub step: Option<f64>,
    /// Primal step of the primal-dual method.
    pub tau: Option<f64>,
    /// Dual step of the primal-dual method.
    pub sigma: Option<f64>,
    /// Backtracking on the descent inequality instead of a fixed step.
    pub line_search: bool,
    /// Use the accelerated variant when running proximal gradient.
    pub fista: bool,
    pub seed: u64,
    /// Store every iterate in the trace.
    pub keep_iterates: bool,
    /// Solution to measure `‖x^k − x_ref‖` against in the trace.
    pub reference: Option<Vector>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-8,
            step: None,
            tau: None,
            sigma: None,
            line_search: false,
            fista: false,
            seed: 0,
            keep_iterates: false,
            reference: None,
        }
    }
}

impl SolverConfig {
    pub fn new(max_iter: usize, tol: f64) -> Self {
        Self {
            max_iter,
            tol,
            ..Self::default()
        }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn with_steps(mut self, tau: f64, sigma: f64) -> Self {
        self.tau = Some(tau);
        self.sigma = Some(sigma);
        self
    }

    pub fn with_line_search(mut self) -> Self {
        self.line_search = true;
        self
    }

    pub fn keeping_iterates(mut self) -> Self {
        self.keep_iterates = true;
        self
    }

    pub fn with_reference(mut self, reference: Vector) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("tol", self.tol)?;
        for (name, v) in [("step", self.step), ("tau", self.tau), ("sigma", self.sigma)] {
            if let Some(v) = v {
                ensure_positive(name, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_defaults_and_rejections() {
        let cfg: SolverConfig = serde_json::from_str(r#"{"tol": 1e-6, "step": 0.5}"#).unwrap();
        assert_eq!(cfg.max_iter, 1000);
        assert_eq!(cfg.step, Some(0.5));
        assert!(serde_json::from_str::<SolverConfig>(r#"{"stepsize": 1}"#).is_err());
        assert!(SolverConfig::new(10, 0.0).validate().is_err());
        assert!(SolverConfig::new(10, 1e-3).with_step(-1.0).validate().is_err());
    }
}
