//! Exact polyhedral geometry for fans over ordered value groups.

pub mod error;
pub mod scalar;
pub mod linalg;
pub mod lp;
pub mod polyhedra;
pub mod gamma;
pub mod reduction;
pub mod completion;
pub mod toric;
pub mod fixtures;
pub mod random;

pub use error::{Error, Result};
pub use scalar::{Rat, Scalar, SymbolBasis};
