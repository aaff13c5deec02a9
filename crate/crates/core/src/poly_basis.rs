//! Chebyshev polynomials of the first kind, their root grids, and
//! Gauss–Chebyshev quadrature.
//!
//! All indices in this module are zero-based: grid point `i` is
//! `cos((2i + 1)π / 2n)`, which puts the points in strictly decreasing order.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Evaluates `T_k(x)`.
///
/// Inside `[-1, 1]` (with a `1e-12` slack for round-off) the trigonometric form
/// `cos(k·arccos x)` is used since it is uniformly accurate there; outside the
/// interval the three-term recurrence takes over.
pub fn cheb_t(k: usize, x: f64) -> f64 {
    if x.abs() <= 1.0 + 1e-12 {
        match k {
            0 => 1.0,
            1 => x,
            _ => (k as f64 * x.clamp(-1.0, 1.0).acos()).cos(),
        }
    } else {
        cheb_t_recurrence(k, x)
    }
}

/// `T_k(x)` through `T_k = 2x·T_{k-1} − T_{k-2}`, valid for every real `x`.
pub fn cheb_t_recurrence(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// The `n` roots of `T_n`, stored in decreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevGrid {
    points: Vec<f64>,
}

impl ChebyshevGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("Chebyshev grid size must be at least 1"));
        }
        let points = (0..n)
            .map(|i| ((2 * i + 1) as f64 * PI / (2 * n) as f64).cos())
            .collect();
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn into_points(self) -> Vec<f64> {
        self.points
    }
}

/// Shorthand for [`ChebyshevGrid::new`].
pub fn cheb_grid(n: usize) -> Result<ChebyshevGrid> {
    ChebyshevGrid::new(n)
}

/// An `n`-node Gauss rule for the weight `w(x) = 2 / (π√(1 − x²))` on `[-1, 1]`.
///
/// The weights are all `2/n` for this weight; they are still stored per node so
/// that rules with non-uniform weights fit the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: ChebyshevGrid,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(n: usize) -> Result<Self> {
        let nodes = ChebyshevGrid::new(n)?;
        let weights = vec![2.0 / n as f64; n];
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        self.nodes.points()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_i weights[i]·f(nodes[i])`. Exact for polynomials of degree `< 2n`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes().iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Shorthand for [`QuadratureRule::new`].
pub fn quad_rule(n: usize) -> Result<QuadratureRule> {
    QuadratureRule::new(n)
}

/// Inner product `⟨T_i, T_j⟩` under `w(x) = 2 / (π√(1 − x²))`.
pub fn cheb_inner_product(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 0) => 2.0,
        _ if i == j => 1.0,
        _ => 0.0,
    }
}

/// Compares the direct product `Π_{j≠i}(ρ_i − ρ_j)` over the `n`-point grid with
/// its closed form `(−1)^i · 2^{1−n} · n / sin((2i + 1)π / 2n)` (zero-based `i`).
///
/// Returns `(direct, closed_form)`.
pub fn trig_lemma_check(n: usize, i: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::invalid(format!("grid size must be at least 2, got {n}")));
    }
    if i >= n {
        return Err(Error::invalid(format!("index {i} out of range for a {n}-point grid")));
    }
    let grid = ChebyshevGrid::new(n)?;
    let pts = grid.points();
    let direct: f64 = pts
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &pj)| pts[i] - pj)
        .product();
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    let angle = (2 * i + 1) as f64 * PI / (2 * n) as f64;
    let closed = sign * 2f64.powi(1 - n as i32) * n as f64 / angle.sin();
    Ok((direct, closed))
}
