//! Generator matrices over a set of evaluation points, column-subset
//! selection, and worst-case conditioning of square submatrices.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cond, gaussian_matrix, Matrix, Norm, Rng};
use crate::poly_basis::cheb_t;
use crate::subsets::{self, binomial, SubsetMode, SubsetSpec};

/// Row basis of a generator matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Row `i` holds `x^i`.
    Monomial,
    /// Row `i` holds `T_i(x)`.
    Chebyshev,
    /// As `Chebyshev`, with the constant row scaled by `1/√2`.
    ChebyshevNormalized,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::Monomial => "monomial",
            GeneratorKind::Chebyshev => "chebyshev",
            GeneratorKind::ChebyshevNormalized => "chebyshev_normalized",
        }
    }

    /// Value of basis function `i` at `x`.
    pub fn eval(self, i: usize, x: f64) -> f64 {
        match self {
            GeneratorKind::Monomial => x.powi(i as i32),
            GeneratorKind::Chebyshev => cheb_t(i, x),
            GeneratorKind::ChebyshevNormalized if i == 0 => 1.0 / SQRT_2,
            GeneratorKind::ChebyshevNormalized => cheb_t(i, x),
        }
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monomial" => Ok(GeneratorKind::Monomial),
            "chebyshev" => Ok(GeneratorKind::Chebyshev),
            "chebyshev_normalized" => Ok(GeneratorKind::ChebyshevNormalized),
            other => Err(Error::invalid(format!("unknown generator kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub(crate) fn check_distinct(points: &[f64]) -> Result<()> {
    let mut sorted = points.to_vec();
    if sorted.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("evaluation points must be finite"));
    }
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("evaluation points must be pairwise distinct"));
    }
    Ok(())
}

/// The `k × len(points)` matrix with entry `(i, j)` equal to basis function `i`
/// at `points[j]`.
pub fn build_generator(kind: GeneratorKind, k: usize, points: &[f64]) -> Result<Matrix> {
    if k == 0 || points.is_empty() {
        return Err(Error::invalid("generator needs at least one row and one point"));
    }
    check_distinct(points)?;
    let m = Matrix::from_fn(k, points.len(), |i, j| kind.eval(i, points[j]));
    if !m.is_finite() {
        return Err(Error::invalid("generator entries overflowed"));
    }
    Ok(m)
}

/// Columns of `m` listed in `s`, in ascending order.
pub fn take_columns(m: &Matrix, s: &SubsetSpec) -> Result<Matrix> {
    if s.n() != m.cols() {
        return Err(Error::invalid(format!(
            "subset is over {} columns but the matrix has {}",
            s.n(),
            m.cols()
        )));
    }
    m.select_columns(s.indices())
}

/// Worst and mean condition number over a family of square submatrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CondStats {
    pub worst: f64,
    pub average: f64,
    /// First subset (in visiting order) attaining `worst`.
    pub worst_subset: SubsetSpec,
    pub evaluated: usize,
    pub singular: usize,
}

/// Condition numbers of `k × subset_size` column submatrices of the generator.
///
/// Only square submatrices make sense here, so `subset_size` must equal `k`.
/// Singular submatrices count as `+∞`. The mean is accumulated in visiting
/// order, so results do not depend on the thread count.
pub fn subset_cond_stats(
    kind: GeneratorKind,
    k: usize,
    points: &[f64],
    subset_size: usize,
    norm: Norm,
    mode: SubsetMode,
) -> Result<CondStats> {
    if subset_size > points.len() {
        return Err(Error::invalid(format!(
            "subset size {subset_size} exceeds the {} available columns",
            points.len()
        )));
    }
    if subset_size != k {
        return Err(Error::invalid(format!(
            "submatrices of a {k}-row generator need {k} columns, got {subset_size}"
        )));
    }
    let g = build_generator(kind, k, points)?;
    matrix_subset_cond_stats(&g, norm, mode)
}

/// [`subset_cond_stats`] for an arbitrary wide matrix.
pub fn matrix_subset_cond_stats(g: &Matrix, norm: Norm, mode: SubsetMode) -> Result<CondStats> {
    let (k, n) = g.shape();
    if k > n {
        return Err(Error::invalid(format!("matrix has {k} rows but only {n} columns")));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut worst_subset: Option<Vec<usize>> = None;
    let mut sum = 0.0;
    let mut evaluated = 0usize;
    let mut singular = 0usize;
    subsets::for_each_chunk(n, k, mode, |chunk| {
        let values: Vec<f64> = chunk
            .par_iter()
            .map(|idx| -> Result<f64> { Ok(cond(&g.select_columns(idx)?, norm)?.value()) })
            .collect::<Result<_>>()?;
        for (idx, v) in chunk.iter().zip(values) {
            if v.is_infinite() {
                singular += 1;
            }
            if v > worst {
                worst = v;
                worst_subset = Some(idx.clone());
            }
            sum += v;
            evaluated += 1;
        }
        Ok(())
    })?;
    let worst_subset = SubsetSpec::new(n, worst_subset.expect("at least one subset"))?;
    Ok(CondStats {
        worst,
        average: sum / evaluated as f64,
        worst_subset,
        evaluated,
        singular,
    })
}

/// `(n − s)·√(n·s·(n − s))·(2n²)^(s−1)`, the growth rate of the worst-case
/// Frobenius condition number of `(n − s)`-column Chebyshev submatrices.
pub fn theorem_bound_value(n: usize, s: usize) -> Result<f64> {
    if s == 0 || s >= n {
        return Err(Error::invalid(format!("redundancy {s} must lie in 1..{n}")));
    }
    let (nf, sf) = (n as f64, s as f64);
    let r = nf - sf;
    Ok(r * (nf * sf * r).sqrt() * (2.0 * nf * nf).powi(s as i32 - 1))
}

/// Outcome of a Monte Carlo check of the random-matrix conditioning bound.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianTrial {
    pub trials: usize,
    pub violations: usize,
    /// `m·P^(2(P−m))`.
    pub threshold: f64,
    /// `5.6 / P^(P−m)`.
    pub bound_prob: f64,
    /// Largest worst-case condition number seen across trials.
    pub max_seen: f64,
}

impl GaussianTrial {
    pub fn violation_fraction(&self) -> f64 {
        self.violations as f64 / self.trials as f64
    }
}

/// Draws `trials` Gaussian `m × p` matrices and counts how often the worst
/// spectral condition number over all `m`-column submatrices exceeds
/// `m·p^(2(p−m))`.
pub fn gaussian_bound_trial(m: usize, p: usize, trials: usize, rng: &mut Rng) -> Result<GaussianTrial> {
    if m < 3 {
        return Err(Error::invalid(format!("m must be at least 3, got {m}")));
    }
    if p < m {
        return Err(Error::invalid(format!("P = {p} must be at least m = {m}")));
    }
    if trials == 0 {
        return Err(Error::invalid("trials must be at least 1"));
    }
    if binomial(p, m) > 100_000 {
        return Err(Error::invalid(format!("C({p}, {m}) submatrices per trial is too many")));
    }
    let pf = p as f64;
    let threshold = m as f64 * pf.powi(2 * (p - m) as i32);
    let bound_prob = 5.6 / pf.powi((p - m) as i32);
    let mut violations = 0;
    let mut max_seen: f64 = 0.0;
    for _ in 0..trials {
        let h = gaussian_matrix(rng, m, p);
        let worst = matrix_subset_cond_stats(&h, Norm::Spectral, SubsetMode::Exhaustive)?.worst;
        if worst > threshold {
            violations += 1;
        }
        max_seen = max_seen.max(worst);
    }
    Ok(GaussianTrial {
        trials,
        violations,
        threshold,
        bound_prob,
        max_seen,
    })
}
