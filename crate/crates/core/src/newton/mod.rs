//! Semismooth Newton methods.
//!
//! Each solver writes its optimality condition as a piecewise smooth
//! equation `Φ(x) = 0` and applies `x^{k+1} = x^k − D_NΦ(x^k)⁻¹Φ(x^k)`, where
//! `D_NΦ` is a Newton derivative built from a [`NewtonDerivativeMask`].
//! The methods are local: there is no globalization, only divergence
//! detection and, for the Moreau–Yosida variant, continuation in `γ`.

mod control;
mod driver;
mod l1;
mod moreau_yosida;
mod system;

pub use control::{control_residual, control_ssn};
pub use driver::{ssn_solve, superlinear_diagnostic, DIVERGENCE_FACTOR, NOISE_FLOOR_FACTOR};
pub use l1::{l1_newton_system, l1_residual, l1_ssn, L1_SSN_STEP_FACTOR};
pub use moreau_yosida::{
    continuation, h_gamma, h_gamma_derivative, moreau_yosida_residual, moreau_yosida_ssn, ContinuationSchedule,
};
pub use system::{NewtonDerivativeMask, NewtonStepSolution, NewtonSystem, DENSE_FALLBACK_DIM};
