//! First-order splitting methods for `min F(x) + G(Ax)`.
//!
//! All solvers share [`SolverConfig`] and return an [`IterTrace`](crate::trace::IterTrace)
//! whose row `k` describes iterate `x^k`. Running out of iterations is not an
//! error; it shows up as [`SolveStatus::MaxIterations`](crate::trace::SolveStatus).

mod config;
mod douglas_rachford;
mod forward_backward;
mod primal_dual;
mod problem;
mod proximal_point;

pub use config::SolverConfig;
pub use douglas_rachford::{douglas_rachford, dr_as_pdhg_check};
pub use forward_backward::{fista, fista_tau, prox_gradient};
pub use primal_dual::{check_step_condition, primal_dual};
pub use problem::{duality_gap, CompositeProblem, LeastSquaresTerm};
pub use proximal_point::proximal_point;
