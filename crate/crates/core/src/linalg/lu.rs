use super::Matrix;
use crate::error::{Error, Result};

/// Pivots smaller than this fraction of `‖A‖_F` are treated as zero.
pub const SINGULARITY_THRESHOLD: f64 = 1e-14;

/// LU factorization with partial (row) pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    /// Unit-lower `L` below the diagonal, `U` on and above it.
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::invalid(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let tol = SINGULARITY_THRESHOLD * a.frobenius_norm();
        let mut lu = a.data().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, mag) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag < tol || mag == 0.0 {
                return Err(Error::SingularMatrix {
                    pivot: k,
                    magnitude: mag,
                });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        lu[i * n + j] -= factor * lu[k * n + j];
                    }
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A·X = rhs` for every column of `rhs` at once.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        let n = self.n;
        if rhs.rows() != n {
            return Err(Error::invalid(format!(
                "right-hand side has {} rows, system has {n}",
                rhs.rows()
            )));
        }
        let k = rhs.cols();
        let mut x = vec![0.0; n * k];
        for (i, &src) in self.perm.iter().enumerate() {
            x[i * k..(i + 1) * k].copy_from_slice(rhs.row(src));
        }
        // Forward substitution with unit-lower L.
        for i in 1..n {
            let (done, rest) = x.split_at_mut(i * k);
            let xi = &mut rest[..k];
            for j in 0..i {
                let l = self.lu[i * n + j];
                if l != 0.0 {
                    for (v, &xj) in xi.iter_mut().zip(&done[j * k..(j + 1) * k]) {
                        *v -= l * xj;
                    }
                }
            }
        }
        // Back substitution with U.
        for i in (0..n).rev() {
            let (head, tail) = x.split_at_mut((i + 1) * k);
            let xi = &mut head[i * k..];
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                if u != 0.0 {
                    let xj = &tail[(j - i - 1) * k..(j - i) * k];
                    for (v, &w) in xi.iter_mut().zip(xj) {
                        *v -= u * w;
                    }
                }
            }
            let d = self.lu[i * n + i];
            xi.iter_mut().for_each(|v| *v /= d);
        }
        Ok(Matrix::from_fn(n, k, |i, j| x[i * k + j]))
    }
}

/// Solves `a·X = rhs` by LU with partial pivoting.
pub fn solve(a: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    Lu::factor(a)?.solve(rhs)
}

/// `a⁻¹`, computed by solving against the identity.
pub fn invert(a: &Matrix) -> Result<Matrix> {
    let lu = Lu::factor(a)?;
    lu.solve(&Matrix::identity(a.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_examples() {
        let b = Matrix::from_fn(3, 2, |i, j| (i + 2 * j) as f64 - 1.0);
        assert_eq!(solve(&Matrix::identity(3), &b).unwrap(), b);

        let a = Matrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        let rhs = Matrix::from_rows(&[[2.0], [8.0]]).unwrap();
        assert_eq!(solve(&a, &rhs).unwrap().data(), &[1.0, 2.0]);

        let rank1 = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(
            solve(&rank1, &rhs),
            Err(Error::SingularMatrix { pivot: 1, .. })
        ));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(invert(&Matrix::identity(4)).unwrap(), Matrix::identity(4));
        let d = Matrix::diag(&[2.0, 0.5]);
        assert_eq!(invert(&d).unwrap(), Matrix::diag(&[0.5, 2.0]));
        let deficient = Matrix::from_rows(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 1.0, 1.0]]).unwrap();
        assert!(matches!(invert(&deficient), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn pivoting_handles_zero_leading_entry() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let rhs = Matrix::from_rows(&[[3.0], [5.0]]).unwrap();
        assert_eq!(solve(&a, &rhs).unwrap().data(), &[5.0, 3.0]);
    }

    #[test]
    fn shape_errors() {
        assert!(Lu::factor(&Matrix::zeros(2, 3)).is_err());
        let lu = Lu::factor(&Matrix::identity(2)).unwrap();
        assert!(lu.solve(&Matrix::zeros(3, 1)).is_err());
    }
}
