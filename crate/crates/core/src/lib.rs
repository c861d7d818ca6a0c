//! Numerical toolkit for compact quantum metric spaces on finite-dimensional
//! operator systems.
//!
//! The dense matrix layer ([`matrix::Matrix`]) and the Fejér kernel are
//! generic over the real scalar; the metric machinery above them works in
//! double precision through [`CMatrix`].

pub mod berezin;
pub mod cli;
pub mod convex;
pub mod error;
pub mod lipnorms;
pub mod matrix;
pub mod metrics;
pub mod nctorus;
pub mod opsys;
pub mod real;
pub mod scalar;

pub use error::{Error, Result};
pub use matrix::{CMatrix, Matrix};
pub use num_complex::Complex;

/// Double precision complex scalar.
pub type C64 = Complex<f64>;
/// Single precision matrix, mostly useful for quick approximate work.
pub type CMatrix32 = Matrix<f32>;
