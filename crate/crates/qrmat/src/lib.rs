//! Numerical R-matrices of U_q(sl2) and its affine extension, at generic q and at roots of unity.

pub mod cpotts;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod qnum;
pub mod raffine;
pub mod report;
pub mod repspace;
pub mod rfinite;

pub use error::{Error, Result};
