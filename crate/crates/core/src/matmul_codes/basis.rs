use crate::cheb_vandermonde::GeneratorKind;
use crate::error::Result;
use crate::poly_basis::quad_rule;

/// A family of polynomials orthonormal under some weight, together with a
/// Gauss rule for that weight. OrthoMatDot-style codes are written against
/// this trait.
pub trait OrthonormalBasis: Send + Sync {
    /// The degree-`k` member evaluated at `x`.
    fn eval(&self, k: usize, x: f64) -> f64;

    /// Nodes and weights of the `n`-point Gauss rule.
    fn quadrature(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)>;
}

/// `T_0/√2, T_1, T_2, …` under `w(x) = 2 / (π√(1 − x²))`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChebyshevBasis;

impl OrthonormalBasis for ChebyshevBasis {
    fn eval(&self, k: usize, x: f64) -> f64 {
        GeneratorKind::ChebyshevNormalized.eval(k, x)
    }

    fn quadrature(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let q = quad_rule(n)?;
        Ok((q.nodes().to_vec(), q.weights().to_vec()))
    }
}
