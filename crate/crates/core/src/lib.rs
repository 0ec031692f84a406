//! Numerical verification of elliptic hypergeometric identities.
//!
//! Both sides of every registered summation, expansion and transformation
//! formula are evaluated at random complex parameter points with MPFR
//! arithmetic and compared under a relative tolerance.

pub mod checks;
pub mod error;
pub mod expansion;
pub mod matrix;
pub mod numerics;
pub mod registry;
pub mod report;
pub mod series;
pub mod theta;
pub mod verifier;

pub use error::{Error, Result};
pub use numerics::{rel_error, CValue, NumericContext};
