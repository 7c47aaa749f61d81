pub mod error;
pub mod functionals;
pub mod linalg;
pub mod newton;
pub mod problems;
pub mod splitting;
pub mod trace;

pub use error::{Error, Result};
