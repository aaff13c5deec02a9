//! Polynomial codes for straggler-tolerant distributed matrix products.
//!
//! Each scheme splits `A` and `B` into blocks, evaluates a matrix polynomial
//! in those blocks at one point per worker, and lets every worker multiply its
//! two evaluations. Any `threshold` worker products determine `A·B`.
//!
//! Decoding folds the post-interpolation step into the solve: for a scheme
//! whose answer is `c·R` (with `c` the coefficient vector of the product
//! polynomial and `R` a fixed readout matrix), the decoder solves
//! `G_S·W = R` once and returns `Σ_s W[s, t]·E_s` for each output block `t`.

mod basis;
mod hmap;

pub use basis::{ChebyshevBasis, OrthonormalBasis};
pub use hmap::{build_h_map, HMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cheb_vandermonde::{check_distinct, GeneratorKind};
use crate::error::{Error, Result};
use crate::linalg::{invert, Lu, Matrix};
use crate::poly_basis::cheb_grid;

/// Code family with its split parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Scheme {
    /// Monomial baseline with an inner-dimension split into `m` parts.
    MatDot {
        m: usize,
    },
    OrthoMatDot {
        m: usize,
    },
    /// Monomial baseline; `A` split into `m` row blocks, `B` into `n` column blocks.
    Polynomial {
        m: usize,
        n: usize,
    },
    OrthoPoly {
        m: usize,
        n: usize,
    },
    /// `A` split into an `m1 × m2` grid and `B` into `m2 × m3`.
    GenOrthoMatDot {
        m1: usize,
        m2: usize,
        m3: usize,
    },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::MatDot { .. } => "matdot",
            Scheme::OrthoMatDot { .. } => "orthomatdot",
            Scheme::Polynomial { .. } => "polynomial",
            Scheme::OrthoPoly { .. } => "orthopoly",
            Scheme::GenOrthoMatDot { .. } => "gen_orthomatdot",
        }
    }

    /// Builds a scheme from a family name and up to three split counts.
    /// Unused counts are ignored.
    pub fn from_parts(family: &str, splits: &[usize]) -> Result<Self> {
        let need = |k: usize| -> Result<()> {
            if splits.len() < k {
                return Err(Error::invalid(format!(
                    "{family} needs {k} split counts, got {}",
                    splits.len()
                )));
            }
            Ok(())
        };
        let s = match family {
            "matdot" => {
                need(1)?;
                Scheme::MatDot { m: splits[0] }
            }
            "orthomatdot" => {
                need(1)?;
                Scheme::OrthoMatDot { m: splits[0] }
            }
            "polynomial" => {
                need(2)?;
                Scheme::Polynomial {
                    m: splits[0],
                    n: splits[1],
                }
            }
            "orthopoly" => {
                need(2)?;
                Scheme::OrthoPoly {
                    m: splits[0],
                    n: splits[1],
                }
            }
            "gen_orthomatdot" => {
                need(3)?;
                Scheme::GenOrthoMatDot {
                    m1: splits[0],
                    m2: splits[1],
                    m3: splits[2],
                }
            }
            other => return Err(Error::invalid(format!("unknown scheme '{other}'"))),
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Scheme::MatDot { m } | Scheme::OrthoMatDot { m } => m >= 1,
            Scheme::Polynomial { m, n } | Scheme::OrthoPoly { m, n } => m >= 1 && n >= 1,
            Scheme::GenOrthoMatDot { m1, m2, m3 } => m1 >= 1 && m2 >= 1 && m3 >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("split counts of {self:?} must be positive")))
        }
    }

    /// Minimum number of worker products from which `A·B` is recoverable.
    pub fn recovery_threshold(&self) -> usize {
        match *self {
            Scheme::MatDot { m } | Scheme::OrthoMatDot { m } => 2 * m - 1,
            Scheme::Polynomial { m, n } | Scheme::OrthoPoly { m, n } => m * n,
            Scheme::GenOrthoMatDot { m1, m2, m3 } => {
                4 * m1 * m2 * m3 + m1 + 2 * m2 + m3 - 2 * (m1 * m2 + m2 * m3 + m3 * m1) - 1
            }
        }
    }

    /// Block grid of `A`: (row parts, column parts).
    pub fn a_grid(&self) -> (usize, usize) {
        match *self {
            Scheme::MatDot { m } | Scheme::OrthoMatDot { m } => (1, m),
            Scheme::Polynomial { m, .. } | Scheme::OrthoPoly { m, .. } => (m, 1),
            Scheme::GenOrthoMatDot { m1, m2, .. } => (m1, m2),
        }
    }

    /// Block grid of `B`: (row parts, column parts).
    pub fn b_grid(&self) -> (usize, usize) {
        match *self {
            Scheme::MatDot { m } | Scheme::OrthoMatDot { m } => (m, 1),
            Scheme::Polynomial { n, .. } | Scheme::OrthoPoly { n, .. } => (1, n),
            Scheme::GenOrthoMatDot { m2, m3, .. } => (m2, m3),
        }
    }

    /// Block grid of the product: (row parts, column parts).
    pub fn c_grid(&self) -> (usize, usize) {
        (self.a_grid().0, self.b_grid().1)
    }

    /// Basis in which worker products are interpolated.
    pub fn decode_basis(&self) -> GeneratorKind {
        match self {
            Scheme::MatDot { .. } | Scheme::Polynomial { .. } => GeneratorKind::Monomial,
            Scheme::OrthoMatDot { .. } => GeneratorKind::ChebyshevNormalized,
            Scheme::OrthoPoly { .. } | Scheme::GenOrthoMatDot { .. } => GeneratorKind::Chebyshev,
        }
    }

    /// Basis indices carried by the blocks of `A` and of `B`, in block order.
    pub fn encoding_indices(&self) -> (Vec<usize>, Vec<usize>) {
        let first = |v: Vec<(usize, f64)>| v.into_iter().map(|t| t.0).collect();
        (first(self.a_terms()), first(self.b_terms()))
    }

    /// For each block of `A` (row-major in its grid): basis index and scale.
    fn a_terms(&self) -> Vec<(usize, f64)> {
        match *self {
            Scheme::MatDot { m }
            | Scheme::OrthoMatDot { m }
            | Scheme::Polynomial { m, .. }
            | Scheme::OrthoPoly { m, .. } => (0..m).map(|i| (i, 1.0)).collect(),
            Scheme::GenOrthoMatDot { m1, m2, .. } => {
                let mut t = Vec::with_capacity(m1 * m2);
                for i in 0..m1 {
                    for j in 0..m2 {
                        t.push(halve_zero(m2 - 1 - j + i * (2 * m2 - 1)));
                    }
                }
                t
            }
        }
    }

    /// For each block of `B` (row-major in its grid): basis index and scale.
    fn b_terms(&self) -> Vec<(usize, f64)> {
        match *self {
            Scheme::MatDot { m } => (0..m).map(|i| (m - 1 - i, 1.0)).collect(),
            Scheme::OrthoMatDot { m } => (0..m).map(|i| (i, 1.0)).collect(),
            Scheme::Polynomial { m, n } | Scheme::OrthoPoly { m, n } => (0..n).map(|j| (j * m, 1.0)).collect(),
            Scheme::GenOrthoMatDot { m1, m2, m3 } => {
                let mut t = Vec::with_capacity(m2 * m3);
                for k in 0..m2 {
                    for l in 0..m3 {
                        t.push(halve_zero(k + l * (2 * m1 - 1) * (2 * m2 - 1)));
                    }
                }
                t
            }
        }
    }
}

/// `T'_0 = ½·T_0`, `T'_k = T_k` otherwise.
fn halve_zero(idx: usize) -> (usize, f64) {
    (idx, if idx == 0 { 0.5 } else { 1.0 })
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Scheme::MatDot { m } | Scheme::OrthoMatDot { m } => write!(f, "{}(m={m})", self.name()),
            Scheme::Polynomial { m, n } | Scheme::OrthoPoly { m, n } => write!(f, "{}(m={m},n={n})", self.name()),
            Scheme::GenOrthoMatDot { m1, m2, m3 } => write!(f, "{}({m1},{m2},{m3})", self.name()),
        }
    }
}

/// A scheme together with its worker count and evaluation points.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    scheme: Scheme,
    points: Vec<f64>,
}

impl SchemeConfig {
    /// `p` workers on the `p`-point Chebyshev grid.
    pub fn new(scheme: Scheme, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::invalid("worker count must be positive"));
        }
        Self::with_points(scheme, cheb_grid(p)?.into_points())
    }

    /// One worker per point.
    pub fn with_points(scheme: Scheme, points: Vec<f64>) -> Result<Self> {
        scheme.validate()?;
        check_distinct(&points)?;
        let k = scheme.recovery_threshold();
        if points.len() < k {
            return Err(Error::invalid(format!(
                "{scheme} needs at least {k} workers, got {}",
                points.len()
            )));
        }
        Ok(Self { scheme, points })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn workers(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn recovery_threshold(&self) -> usize {
        self.scheme.recovery_threshold()
    }

    fn basis_value(&self, kind: GeneratorKind, idx: usize, r: usize) -> f64 {
        kind.eval(idx, self.points[r])
    }

    /// Encoding basis; OrthoMatDot goes through the orthonormal-basis seam.
    fn encode_value(&self, idx: usize, r: usize) -> f64 {
        match self.scheme {
            Scheme::MatDot { .. } | Scheme::Polynomial { .. } => self.basis_value(GeneratorKind::Monomial, idx, r),
            Scheme::OrthoMatDot { .. } => ChebyshevBasis.eval(idx, self.points[r]),
            _ => self.basis_value(GeneratorKind::Chebyshev, idx, r),
        }
    }
}

/// The two encoded matrices sent to one worker.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerShard {
    pub worker: usize,
    pub a: Matrix,
    pub b: Matrix,
}

/// One worker's product `p_A(x_r)·p_B(x_r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerOutput {
    pub worker: usize,
    pub product: Matrix,
}

/// Sorted distinct zero-based worker indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SurvivorSet {
    workers: usize,
    indices: Vec<usize>,
}

impl SurvivorSet {
    pub fn new(workers: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("survivor indices must be distinct"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= workers) {
            return Err(Error::invalid(format!(
                "worker {bad} out of range for {workers} workers"
            )));
        }
        Ok(Self { workers, indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

fn combine(blocks: &[Matrix], terms: &[(usize, f64)], value: impl Fn(usize) -> f64) -> Matrix {
    let mut acc = Matrix::zeros(blocks[0].rows(), blocks[0].cols());
    for (blk, &(idx, scale)) in blocks.iter().zip(terms) {
        acc.add_scaled(scale * value(idx), blk).expect("blocks share a shape");
    }
    acc
}

/// Encoded shards for all workers.
pub fn encode(config: &SchemeConfig, a: &Matrix, b: &Matrix) -> Result<Vec<WorkerShard>> {
    if a.cols() != b.rows() {
        return Err(Error::invalid(format!(
            "A is {}x{} but B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let scheme = config.scheme;
    let (ar, ac) = scheme.a_grid();
    let (br, bc) = scheme.b_grid();
    let a_blocks = a
        .split_grid(ar, ac)
        .map_err(|e| Error::invalid(format!("splitting A: {e}")))?;
    let b_blocks = b
        .split_grid(br, bc)
        .map_err(|e| Error::invalid(format!("splitting B: {e}")))?;
    let (a_terms, b_terms) = (scheme.a_terms(), scheme.b_terms());
    Ok((0..config.workers())
        .into_par_iter()
        .map(|r| WorkerShard {
            worker: r,
            a: combine(&a_blocks, &a_terms, |i| config.encode_value(i, r)),
            b: combine(&b_blocks, &b_terms, |i| config.encode_value(i, r)),
        })
        .collect())
}

/// The worker's job: multiply its two shards.
pub fn worker_compute(shard: &WorkerShard) -> Result<WorkerOutput> {
    Ok(WorkerOutput {
        worker: shard.worker,
        product: shard.a.matmul(&shard.b)?,
    })
}

/// Encodes and runs every worker.
pub fn compute_all(config: &SchemeConfig, a: &Matrix, b: &Matrix) -> Result<Vec<WorkerOutput>> {
    encode(config, a, b)?.par_iter().map(worker_compute).collect()
}

/// Readout matrix `R`: the answer blocks are `c·R` for coefficient row `c`.
fn readout(scheme: Scheme) -> Result<Matrix> {
    let k = scheme.recovery_threshold();
    match scheme {
        Scheme::MatDot { m } => Ok(Matrix::from_fn(k, 1, |i, _| if i == m - 1 { 1.0 } else { 0.0 })),
        Scheme::OrthoMatDot { m } => {
            // AB is the weighted sum of p_C over the m-point Gauss rule.
            let basis = ChebyshevBasis;
            let (nodes, weights) = basis.quadrature(m)?;
            Ok(Matrix::from_fn(k, 1, |i, _| {
                nodes.iter().zip(&weights).map(|(&x, &w)| w * basis.eval(i, x)).sum()
            }))
        }
        Scheme::Polynomial { m, n } => {
            // Block (i, j) is the coefficient of x^(i + jm).
            Ok(Matrix::from_fn(k, m * n, |row, t| {
                let (i, j) = (t / n, t % n);
                if row == i + j * m {
                    1.0
                } else {
                    0.0
                }
            }))
        }
        Scheme::OrthoPoly { m, n } => {
            let hinv = invert(build_h_map(m, n)?.matrix())?;
            Ok(Matrix::from_fn(k, m * n, |row, t| {
                let (i, j) = (t / n, t % n);
                hinv[(j * m + i, row)]
            }))
        }
        Scheme::GenOrthoMatDot { m1, m2, m3 } => Ok(Matrix::from_fn(k, m1 * m3, |row, t| {
            let (kk, l) = (t / m3, t % m3);
            let idx = gen_claim_index(m1, m2, kk, l);
            if row != idx {
                0.0
            } else if idx == 0 {
                // Both factors carry T'_0 = ½T_0 here, so the coefficient is ¼C.
                4.0
            } else {
                2.0
            }
        })),
    }
}

/// Chebyshev index whose coefficient in the generalized scheme's product
/// polynomial is `½·C_{k,l}`.
pub fn gen_claim_index(m1: usize, m2: usize, k: usize, l: usize) -> usize {
    m2 - 1 + k * (2 * m2 - 1) + l * (2 * m1 - 1) * (2 * m2 - 1)
}

/// Precomputed decoding weights for one survivor set.
#[derive(Debug, Clone)]
pub struct Decoder {
    scheme: Scheme,
    survivors: SurvivorSet,
    /// `threshold × blocks`; column `t` holds the weights of output block `t`.
    weights: Matrix,
}

impl Decoder {
    pub fn new(config: &SchemeConfig, survivors: &SurvivorSet) -> Result<Self> {
        Self::with_readout(config, survivors, readout(config.scheme)?)
    }

    fn with_readout(config: &SchemeConfig, survivors: &SurvivorSet, r: Matrix) -> Result<Self> {
        let k = config.recovery_threshold();
        if survivors.workers != config.workers() {
            return Err(Error::invalid(format!(
                "survivor set is over {} workers, config has {}",
                survivors.workers,
                config.workers()
            )));
        }
        if survivors.len() != k {
            return Err(Error::invalid(format!(
                "{} needs exactly {k} survivors, got {}",
                config.scheme,
                survivors.len()
            )));
        }
        let kind = config.scheme.decode_basis();
        let g = Matrix::from_fn(k, k, |i, s| config.basis_value(kind, i, survivors.indices[s]));
        let weights = Lu::factor(&g)?.solve(&r)?;
        Ok(Self {
            scheme: config.scheme,
            survivors: survivors.clone(),
            weights,
        })
    }

    pub fn survivors(&self) -> &SurvivorSet {
        &self.survivors
    }

    /// Linear combinations of the survivors' products, one per output block.
    /// `ordered[s]` is the product of the `s`-th survivor in ascending order.
    fn combine(&self, ordered: &[&Matrix]) -> Result<Vec<Matrix>> {
        let (rows, cols) = ordered[0].shape();
        if ordered.iter().any(|p| p.shape() != (rows, cols)) {
            return Err(Error::invalid("worker outputs differ in shape"));
        }
        Ok((0..self.weights.cols())
            .map(|t| {
                let mut acc = Matrix::zeros(rows, cols);
                for (s, e) in ordered.iter().enumerate() {
                    acc.add_scaled(self.weights[(s, t)], e).expect("outputs share a shape");
                }
                acc
            })
            .collect())
    }

    /// Outputs matched to the canonical survivor order.
    fn order<'a>(&self, outputs: &'a [WorkerOutput]) -> Result<Vec<&'a Matrix>> {
        if outputs.len() != self.survivors.len() {
            return Err(Error::invalid(format!(
                "expected {} worker outputs, got {}",
                self.survivors.len(),
                outputs.len()
            )));
        }
        self.survivors
            .indices
            .iter()
            .map(|&w| {
                outputs
                    .iter()
                    .find(|o| o.worker == w)
                    .map(|o| &o.product)
                    .ok_or_else(|| Error::invalid(format!("no output from surviving worker {w}")))
            })
            .collect()
    }

    fn assemble(&self, blocks: Vec<Matrix>) -> Result<Matrix> {
        let (r, c) = self.scheme.c_grid();
        Matrix::assemble_grid(&blocks, r, c)
    }

    /// Recovers `A·B` from the survivors' outputs, in any order.
    pub fn decode(&self, outputs: &[WorkerOutput]) -> Result<Matrix> {
        let blocks = self.combine(&self.order(outputs)?)?;
        self.assemble(blocks)
    }

    /// Like [`Decoder::decode`], picking the survivors' products out of a full
    /// list indexed by worker.
    pub fn decode_from_all(&self, all: &[WorkerOutput]) -> Result<Matrix> {
        let picked: Vec<&Matrix> = self
            .survivors
            .indices
            .iter()
            .map(|&w| {
                all.get(w)
                    .filter(|o| o.worker == w)
                    .map(|o| &o.product)
                    .ok_or_else(|| Error::invalid(format!("no output from surviving worker {w}")))
            })
            .collect::<Result<_>>()?;
        let blocks = self.combine(&picked)?;
        self.assemble(blocks)
    }
}

/// Recovers `A·B` from exactly `threshold` worker outputs.
pub fn decode(config: &SchemeConfig, survivors: &SurvivorSet, outputs: &[WorkerOutput]) -> Result<Matrix> {
    Decoder::new(config, survivors)?.decode(outputs)
}

/// Matrix coefficients of the product polynomial in the decode basis, lowest
/// index first.
pub fn interpolate_coefficients(
    config: &SchemeConfig,
    survivors: &SurvivorSet,
    outputs: &[WorkerOutput],
) -> Result<Vec<Matrix>> {
    let k = config.recovery_threshold();
    let dec = Decoder::with_readout(config, survivors, Matrix::identity(k))?;
    dec.combine(&dec.order(outputs)?)
}
