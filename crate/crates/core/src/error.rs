use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Numerical non-convergence of an iterative solver is *not* an error: it is
/// reported through [`crate::trace::SolveStatus`] on the returned trace.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("step condition violated: sigma*tau*||A||^2 = {product:.6} must be < 1")]
    StepCondition { product: f64 },

    #[error("conjugate gradients broke down at iteration {iteration}: non-positive curvature {curvature:e}")]
    NegativeCurvature { iteration: usize, curvature: f64 },

    #[error("conjugate gradients did not reach relative residual {tol:e} within {iterations} iterations")]
    CgNotConverged { tol: f64, iterations: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("singular linear system (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("line search underflow at iterate {iteration}: step {step:e}")]
    LineSearchUnderflow { iteration: usize, step: f64 },

    #[error("Newton system could not be solved at iteration {iteration}: {source}")]
    NewtonStep {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("problem is missing a required term: {0}")]
    MissingTerm(&'static str),

    #[error("breakpoints closer than eps = {eps:e} around t = {t}")]
    Precision { t: f64, eps: f64 },

    #[error("superlinear diagnostic unavailable: only {usable} usable iterates")]
    DiagnosticUnavailable { usable: usize },

    #[error("oracle found no verified pattern; internal consistency violated")]
    OracleInconsistent,

    #[error("problem dimension {dim} exceeds oracle cap {cap}")]
    OracleTooLarge { dim: usize, cap: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}
