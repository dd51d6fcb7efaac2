//! Regenerative composition structures: exact laws from decrement matrices and Lévy data,
//! samplers, and block-count statistics.

pub mod asympt;
pub mod checks;
pub mod combinat;
pub mod decrement;
pub mod error;
pub mod family;
pub mod levy;
mod quad;
pub mod samplers;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::{Param, Rational, Scalar};
