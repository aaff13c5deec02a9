//! Numerically stable coded matrix multiplication and Lagrange-style coded
//! computing built on Chebyshev polynomial bases.

pub mod cheb_vandermonde;
pub mod error;
pub mod lagrange_codes;
pub mod linalg;
pub mod matmul_codes;
pub mod poly_basis;
pub mod selftest;
pub mod sim_harness;
pub mod subsets;

pub use error::{Error, Result};
