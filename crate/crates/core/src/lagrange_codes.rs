//! Systematic Lagrange coded computing of a polynomial map over the
//! Chebyshev grid.
//!
//! The first `m` grid points anchor the data, so workers `0..m` receive the
//! data points themselves. Any `K = (m − 1)·deg f + 1` worker results
//! determine `f` at every data point.

use serde::{Deserialize, Serialize};

use crate::cheb_vandermonde::GeneratorKind;
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::matmul_codes::SurvivorSet;
use crate::poly_basis::cheb_grid;

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeConfig {
    m: usize,
    d: usize,
    deg_f: usize,
    points: Vec<f64>,
}

impl LagrangeConfig {
    /// `m` data points of dimension `d`, `p` workers, worker map of degree `deg_f`.
    pub fn new(m: usize, p: usize, d: usize, deg_f: usize) -> Result<Self> {
        if m == 0 || d == 0 || deg_f == 0 {
            return Err(Error::invalid(format!(
                "m, d and deg_f must be positive, got m={m}, d={d}, deg_f={deg_f}"
            )));
        }
        if m > p {
            return Err(Error::invalid(format!(
                "m = {m} data points need at least as many workers, got {p}"
            )));
        }
        let k = (m - 1) * deg_f + 1;
        if k > p {
            return Err(Error::invalid(format!("recovery threshold {k} exceeds {p} workers")));
        }
        Ok(Self {
            m,
            d,
            deg_f,
            points: cheb_grid(p)?.into_points(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn workers(&self) -> usize {
        self.points.len()
    }

    pub fn input_dim(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.deg_f
    }

    pub fn recovery_threshold(&self) -> usize {
        (self.m - 1) * self.deg_f + 1
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn anchors(&self) -> &[f64] {
        &self.points[..self.m]
    }
}

/// A polynomial map `ℝ^d → ℝ^v` whose total degree is declared by the caller.
pub trait PolyMap: Sync {
    fn input_dim(&self) -> usize;
    fn output_dim(&self) -> usize;
    fn degree(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Vec<f64>;
}

/// `x ↦ (Yᵀx)^p` taken entrywise, with `Y` of shape `d × v`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm {
    y: Matrix,
    power: usize,
}

impl LinearForm {
    pub fn new(y: Matrix, power: usize) -> Result<Self> {
        if power == 0 {
            return Err(Error::invalid("power must be at least 1"));
        }
        Ok(Self { y, power })
    }
}

impl PolyMap for LinearForm {
    fn input_dim(&self) -> usize {
        self.y.rows()
    }

    fn output_dim(&self) -> usize {
        self.y.cols()
    }

    fn degree(&self) -> usize {
        self.power
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        (0..self.y.cols())
            .map(|j| {
                let dot: f64 = x.iter().enumerate().map(|(i, &xi)| xi * self.y[(i, j)]).sum();
                dot.powi(self.power as i32)
            })
            .collect()
    }
}

/// Basis used by the decoder's interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeBasis {
    Chebyshev,
    Monomial,
}

impl DecodeBasis {
    fn kind(self) -> GeneratorKind {
        match self {
            DecodeBasis::Chebyshev => GeneratorKind::Chebyshev,
            DecodeBasis::Monomial => GeneratorKind::Monomial,
        }
    }
}

impl std::str::FromStr for DecodeBasis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chebyshev" => Ok(DecodeBasis::Chebyshev),
            "monomial" => Ok(DecodeBasis::Monomial),
            other => Err(Error::invalid(format!("unknown basis '{other}'"))),
        }
    }
}

/// Worker inputs `g(x_r)`, with `g` the interpolant of the data on the anchors.
pub fn lagrange_encode(config: &LagrangeConfig, data: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if data.len() != config.m {
        return Err(Error::invalid(format!(
            "expected {} data points, got {}",
            config.m,
            data.len()
        )));
    }
    if let Some(bad) = data.iter().find(|x| x.len() != config.d) {
        return Err(Error::invalid(format!(
            "data point has dimension {}, expected {}",
            bad.len(),
            config.d
        )));
    }
    let anchors = config.anchors();
    Ok(config
        .points
        .iter()
        .enumerate()
        .map(|(r, &x)| {
            if r < config.m {
                return data[r].clone();
            }
            let mut out = vec![0.0; config.d];
            for (i, xi) in data.iter().enumerate() {
                let li: f64 = anchors
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &aj)| (x - aj) / (anchors[i] - aj))
                    .product();
                for (o, v) in out.iter_mut().zip(xi) {
                    *o += li * v;
                }
            }
            out
        })
        .collect())
}

/// Applies `f` to every encoded input.
pub fn lagrange_workers(f: &dyn PolyMap, encoded: &[Vec<f64>]) -> Vec<Vec<f64>> {
    encoded.iter().map(|x| f.eval(x)).collect()
}

/// Estimates `f(X_1), …, f(X_m)` from exactly `K` worker results, given in
/// the survivor set's (ascending) order.
pub fn lagrange_decode(
    config: &LagrangeConfig,
    f: &dyn PolyMap,
    survivors: &SurvivorSet,
    outputs: &[Vec<f64>],
    basis: DecodeBasis,
) -> Result<Vec<Vec<f64>>> {
    let k = config.recovery_threshold();
    if f.degree() != config.deg_f {
        return Err(Error::invalid(format!(
            "map has degree {}, config expects {}",
            f.degree(),
            config.deg_f
        )));
    }
    if survivors.len() != k {
        return Err(Error::invalid(format!(
            "decoding needs exactly {k} survivors, got {}",
            survivors.len()
        )));
    }
    if let Some(&bad) = survivors.indices().iter().find(|&&w| w >= config.workers()) {
        return Err(Error::invalid(format!("worker {bad} out of range")));
    }
    if outputs.len() != k {
        return Err(Error::invalid(format!(
            "expected {k} worker outputs, got {}",
            outputs.len()
        )));
    }
    let v = f.output_dim();
    if outputs.iter().any(|o| o.len() != v) {
        return Err(Error::invalid(format!("worker outputs must have dimension {v}")));
    }
    let kind = basis.kind();
    let pts = &config.points;
    let g = Matrix::from_fn(k, k, |i, s| kind.eval(i, pts[survivors.indices()[s]]));
    let at_anchors = Matrix::from_fn(k, config.m, |i, a| kind.eval(i, pts[a]));
    let w = Lu::factor(&g)?.solve(&at_anchors)?;
    Ok((0..config.m)
        .map(|a| {
            let mut est = vec![0.0; v];
            for (s, o) in outputs.iter().enumerate() {
                let ws = w[(s, a)];
                for (e, &val) in est.iter_mut().zip(o) {
                    *e += ws * val;
                }
            }
            est
        })
        .collect())
}
