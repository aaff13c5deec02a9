//! Dense real linear algebra: matrices, LU solves, condition numbers and a
//! seeded Gaussian generator.

mod lu;
mod matrix;
mod rng;
mod svd;

pub use lu::{invert, solve, Lu, SINGULARITY_THRESHOLD};
pub use matrix::{matmul, Matrix};
pub use rng::{derive_seed, gaussian_matrix, Rng};
pub use svd::singular_values;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Matrix norm used for condition numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Frobenius,
    /// Induced 2-norm.
    Spectral,
}

impl std::str::FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frobenius" | "fro" | "f" => Ok(Norm::Frobenius),
            "spectral" | "l2" | "2" => Ok(Norm::Spectral),
            other => Err(Error::invalid(format!("unknown norm '{other}'"))),
        }
    }
}

/// Outcome of a condition-number computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Condition {
    Finite(f64),
    /// LU hit a pivot below the singularity threshold.
    Singular,
}

impl Condition {
    /// The numeric value, with `+∞` standing in for a singular matrix.
    pub fn value(self) -> f64 {
        match self {
            Condition::Finite(v) => v,
            Condition::Singular => f64::INFINITY,
        }
    }

    pub fn is_singular(self) -> bool {
        matches!(self, Condition::Singular)
    }
}

/// `‖a‖·‖a⁻¹‖` in the requested norm.
///
/// Singularity is detected by the LU factorization in both norms, so the two
/// agree on which inputs count as singular.
pub fn cond(a: &Matrix, norm: Norm) -> Result<Condition> {
    if !a.is_square() {
        return Err(Error::invalid(format!(
            "condition number needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let lu = match Lu::factor(a) {
        Ok(lu) => lu,
        Err(Error::SingularMatrix { .. }) => return Ok(Condition::Singular),
        Err(e) => return Err(e),
    };
    match norm {
        Norm::Frobenius => {
            let inv = lu.solve(&Matrix::identity(a.rows()))?;
            Ok(Condition::Finite(a.frobenius_norm() * inv.frobenius_norm()))
        }
        Norm::Spectral => {
            let sv = singular_values(a);
            let (max, min) = (sv[0], sv[sv.len() - 1]);
            if min == 0.0 {
                Ok(Condition::Singular)
            } else {
                Ok(Condition::Finite(max / min))
            }
        }
    }
}
