use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Dense row-major matrix of `f64`.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Rejects empty shapes, length
    /// mismatches and non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!("matrix shape {rows}x{cols} is empty")));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix data has {} entries, expected {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Triple-loop product accumulated in (row, col, inner) order.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (n, m) = (self.rows, other.cols);
        let mut out = Vec::with_capacity(n * m);
        for i in 0..n {
            let a_row = self.row(i);
            for j in 0..m {
                let mut acc = 0.0;
                for (l, &a) in a_row.iter().enumerate() {
                    acc += a * other.data[l * m + j];
                }
                out.push(acc);
            }
        }
        Ok(Matrix {
            rows: n,
            cols: m,
            data: out,
        })
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    /// `self += s·other`.
    pub fn add_scaled(&mut self, s: f64, other: &Matrix) -> Result<()> {
        self.check_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
        Ok(())
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Copy of the `nr x nc` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols, "block out of range");
        Matrix::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Splits into a `row_parts x col_parts` grid of equal blocks, returned in
    /// row-major block order.
    pub fn split_grid(&self, row_parts: usize, col_parts: usize) -> Result<Vec<Matrix>> {
        if row_parts == 0 || !self.rows.is_multiple_of(row_parts) {
            return Err(Error::invalid(format!(
                "row count {} is not divisible by {row_parts}",
                self.rows
            )));
        }
        if col_parts == 0 || !self.cols.is_multiple_of(col_parts) {
            return Err(Error::invalid(format!(
                "column count {} is not divisible by {col_parts}",
                self.cols
            )));
        }
        let (br, bc) = (self.rows / row_parts, self.cols / col_parts);
        let mut blocks = Vec::with_capacity(row_parts * col_parts);
        for i in 0..row_parts {
            for j in 0..col_parts {
                blocks.push(self.block(i * br, j * bc, br, bc));
            }
        }
        Ok(blocks)
    }

    /// Inverse of [`Matrix::split_grid`].
    pub fn assemble_grid(blocks: &[Matrix], row_parts: usize, col_parts: usize) -> Result<Matrix> {
        if blocks.len() != row_parts * col_parts || blocks.is_empty() {
            return Err(Error::invalid(format!(
                "{} blocks cannot fill a {row_parts}x{col_parts} grid",
                blocks.len()
            )));
        }
        let (br, bc) = blocks[0].shape();
        if blocks.iter().any(|b| b.shape() != (br, bc)) {
            return Err(Error::invalid("blocks of unequal shape"));
        }
        let mut out = Matrix::zeros(br * row_parts, bc * col_parts);
        for (idx, b) in blocks.iter().enumerate() {
            let (bi, bj) = (idx / col_parts, idx % col_parts);
            for i in 0..br {
                let dst = (bi * br + i) * out.cols + bj * bc;
                out.data[dst..dst + bc].copy_from_slice(b.row(i));
            }
        }
        Ok(out)
    }

    /// Columns at the given zero-based indices, in the order given.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Matrix> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::invalid(format!(
                "column {bad} out of range for {} columns",
                self.cols
            )));
        }
        Ok(Matrix::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])]))
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::invalid(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", &self.row(i)[..self.cols.min(8)])?;
        }
        write!(f, "]")
    }
}

/// Free-function form of [`Matrix::matmul`].
pub fn matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.matmul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_construction() {
        assert!(Matrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(Matrix::new(0, 2, vec![]).is_err());
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn matmul_examples() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(matmul(&a, &Matrix::identity(2)).unwrap(), a);

        let row = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        let col = Matrix::from_rows(&[[3.0], [4.0]]).unwrap();
        assert_eq!(matmul(&row, &col).unwrap().data(), &[11.0]);

        let z = Matrix::zeros(3, 2);
        let any = Matrix::from_fn(2, 4, |i, j| (i * 7 + j) as f64 - 2.5);
        assert_eq!(matmul(&z, &any).unwrap(), Matrix::zeros(3, 4));

        assert!(matches!(matmul(&a, &row), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn grid_split_roundtrip() {
        let a = Matrix::from_fn(6, 4, |i, j| (i * 10 + j) as f64);
        let blocks = a.split_grid(3, 2).unwrap();
        assert_eq!(blocks.len(), 6);
        assert_eq!(blocks[3], a.block(2, 2, 2, 2));
        assert_eq!(Matrix::assemble_grid(&blocks, 3, 2).unwrap(), a);
        assert!(a.split_grid(4, 1).is_err());
        assert!(a.split_grid(1, 3).is_err());
    }

    #[test]
    fn column_selection() {
        let i3 = Matrix::identity(3);
        let s = i3.select_columns(&[0, 2]).unwrap();
        assert_eq!(s, Matrix::from_rows(&[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]]).unwrap());
        assert!(i3.select_columns(&[3]).is_err());
    }
}
