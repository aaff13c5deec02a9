use super::Matrix;

/// Singular values in descending order, via cyclic one-sided (Hestenes) Jacobi.
///
/// Each rotation annihilates one off-diagonal entry of the implicit Gram matrix
/// `AᵀA`; the columns of the rotated matrix converge to `U·Σ`. A pair is left
/// alone once `|γ| ≤ 1e-15·√(αβ)`, which is tighter than requiring the total
/// off-diagonal mass of `AᵀA` to fall below `1e-12·‖AᵀA‖_F`.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    // Work on the orientation with at least as many rows as columns.
    let work = if a.rows() >= a.cols() { a.clone() } else { a.transpose() };
    let (m, n) = work.shape();
    // Column-major copy so that column rotations touch contiguous memory.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| work.column(j)).collect();

    const MAX_SWEEPS: usize = 80;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&cols[p], &cols[q]);
                    let mut al = 0.0;
                    let mut be = 0.0;
                    let mut ga = 0.0;
                    for i in 0..m {
                        al += cp[i] * cp[i];
                        be += cq[i] * cq[i];
                        ga += cp[i] * cq[i];
                    }
                    (al, be, ga)
                };
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                let (cp, cq) = (&mut lo[p], &mut hi[0]);
                for i in 0..m {
                    let (x, y) = (cp[i], cq[i]);
                    cp[i] = c * x - s * y;
                    cq[i] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_matrix() {
        let d = [3.0, -0.5, 10.0, 1e-3];
        let sv = singular_values(&Matrix::diag(&d));
        assert_eq!(sv, vec![10.0, 3.0, 0.5, 1e-3]);
    }

    #[test]
    fn rank_one() {
        let a = Matrix::from_fn(4, 3, |i, j| (i + 1) as f64 * (j + 1) as f64);
        let sv = singular_values(&a);
        // ‖u‖·‖v‖ with u = (1..4), v = (1..3)
        assert_relative_eq!(sv[0], (30f64 * 14.0).sqrt(), max_relative = 1e-14);
        assert!(sv[1] < 1e-12 && sv[2] < 1e-12);
    }

    #[test]
    fn wide_matrix_uses_transpose() {
        let a = Matrix::from_rows(&[[3.0, 0.0, 0.0], [0.0, 4.0, 0.0]]).unwrap();
        assert_eq!(singular_values(&a), vec![4.0, 3.0]);
    }
}
