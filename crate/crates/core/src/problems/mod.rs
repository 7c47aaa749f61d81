//! Reproducible benchmark instances and brute-force ground truth.

mod kkt;
mod oracle;
mod spec;

pub use kkt::kkt_residual;
pub use oracle::{
    boxqp_pattern_solution, lasso_pattern_solution, oracle_boxqp, oracle_lasso, OracleSolution, ORACLE_MAX_DIM,
};
pub use spec::{gen, GenParams, ProblemSpec, LASSO_NOISE, LASSO_SPARSITY};
