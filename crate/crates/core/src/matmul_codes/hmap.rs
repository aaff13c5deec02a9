use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Linear map from the block products `A_i·B_j` to the Chebyshev coefficients
/// of `p_A·p_B` for OrthoPoly codes.
///
/// Column `j·m + i` belongs to the pair `(i, j)` and row `t` to `T_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct HMap {
    m: usize,
    n: usize,
    h: Matrix,
}

impl HMap {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.h
    }

    pub fn column_of(&self, i: usize, j: usize) -> usize {
        j * self.m + i
    }
}

/// Builds the map from `T_i·T_{jm} = ½(T_{jm+i} + T_{|jm−i|})`.
pub fn build_h_map(m: usize, n: usize) -> Result<HMap> {
    if m == 0 || n == 0 {
        return Err(Error::invalid(format!("split counts must be positive, got ({m}, {n})")));
    }
    let k = m * n;
    let mut h = Matrix::zeros(k, k);
    for j in 0..n {
        for i in 0..m {
            let col = j * m + i;
            if i == 0 {
                h[(j * m, col)] = 1.0;
            } else {
                h[(j * m + i, col)] += 0.5;
                h[((j * m).abs_diff(i), col)] += 0.5;
            }
        }
    }
    Ok(HMap { m, n, h })
}
