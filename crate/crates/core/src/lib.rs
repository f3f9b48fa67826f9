//! Caisson approximations of amoebas of exponential sums.
//!
//! Supports are exact matrices over a declared ℚ-basis of reals; coefficients
//! are floating complex numbers.

pub mod amoeba;
pub mod circuits;
pub mod error;
pub mod expsum;
pub mod linalg;
pub mod membership;
pub mod orders;
pub mod polytope;
pub mod problem;
pub mod raster;
pub mod ronkin;
pub mod roots;
pub mod scalars;
pub mod support_lattice;

pub use error::{Error, Result};
pub use num::complex::Complex64;
pub use expsum::{DeformationFamily, ExpSum};
pub use scalars::{ExtScalar, Rational, RealBasis};
pub use support_lattice::{ExponentMatrix, LiftRelation, SupportMatrix};
