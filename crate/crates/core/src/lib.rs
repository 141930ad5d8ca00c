//! Exact evaluation of conformal invariants and correlators of 3D and 4D
//! free-field theories built from Weyl spinors.
//!
//! Every numeric routine is generic over [`scalar::Field`], so the same code
//! runs on exact Gaussian rationals (times powers of pi), on floats, and on
//! forward-mode dual numbers used for derivatives.

pub mod conformal;
pub mod correlators;
pub mod dual;
pub mod error;
pub mod frame;
pub mod invariants;
pub mod lie;
pub mod scalar;
pub mod spinor;
pub mod spinor_checks;
pub mod suites;
pub mod wick;
pub mod zpoly;

pub use error::{Error, Result};
pub use frame::Frame;
pub use scalar::Scalar;
