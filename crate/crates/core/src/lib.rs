#![no_std]
// Quadrature nodes and reference constants are quoted to more digits than f64 keeps.
#![allow(clippy::excessive_precision)]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub type Complex = num_complex::Complex64;

mod error;
pub use error::{Error, Result};

pub mod contour;
pub mod entropy;
pub mod loops;
pub mod oracle;
pub mod quad;
pub mod series;
pub mod specialfns;
pub mod trace;
