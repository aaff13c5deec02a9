use approx::assert_abs_diff_eq;
use ccc_core::linalg::{gaussian_matrix, Matrix, Rng};
use ccc_core::matmul_codes::*;
use ccc_core::poly_basis::{cheb_grid, cheb_t};
use ccc_core::Error;
use itertools::Itertools;
use proptest::prelude::*;

fn rel_err(got: &Matrix, want: &Matrix) -> f64 {
    got.sub(want).unwrap().frobenius_norm() / want.frobenius_norm()
}

fn inputs(seed: u64, n1: usize, n2: usize, n3: usize) -> (Matrix, Matrix) {
    let mut rng = Rng::new(seed);
    (gaussian_matrix(&mut rng, n1, n2), gaussian_matrix(&mut rng, n2, n3))
}

fn check_every_subset(scheme: Scheme, p: usize, dims: (usize, usize, usize)) {
    let cfg = SchemeConfig::new(scheme, p).unwrap();
    let (a, b) = inputs(11, dims.0, dims.1, dims.2);
    let c = a.matmul(&b).unwrap();
    let outs = compute_all(&cfg, &a, &b).unwrap();
    let k = cfg.recovery_threshold();
    let mut count = 0;
    for subset in (0..p).combinations(k) {
        let s = SurvivorSet::new(p, subset.clone()).unwrap();
        let picked: Vec<_> = subset.iter().map(|&w| outs[w].clone()).collect();
        let got = decode(&cfg, &s, &picked).unwrap();
        let e = rel_err(&got, &c);
        assert!(e <= 1e-8, "{scheme} subset {subset:?}: {e:e}");
        count += 1;
    }
    assert_eq!(count, ccc_core::subsets::binomial(p, k) as usize);
}

#[test]
fn exact_recovery_from_every_subset() {
    for m in 1..=3 {
        check_every_subset(Scheme::OrthoMatDot { m }, 2 * m + 2, (4, 6, 5));
        check_every_subset(Scheme::MatDot { m }, 2 * m + 2, (4, 6, 5));
    }
    for (m, n) in [(2, 2), (3, 3)] {
        check_every_subset(Scheme::OrthoPoly { m, n }, m * n + 3, (6, 4, 6));
        check_every_subset(Scheme::Polynomial { m, n }, m * n + 3, (6, 4, 6));
    }
    check_every_subset(Scheme::GenOrthoMatDot { m1: 2, m2: 2, m3: 2 }, 18, (4, 4, 4));
}

#[test]
fn generalized_small_grids_recover() {
    for (m1, m2, m3) in [(1, 1, 1), (2, 1, 2), (1, 2, 1), (1, 3, 2), (2, 3, 2), (3, 1, 1)] {
        let s = Scheme::GenOrthoMatDot { m1, m2, m3 };
        let k = s.recovery_threshold();
        let cfg = SchemeConfig::new(s, k + 2).unwrap();
        let (a, b) = inputs(5, 2 * m1, 3 * m2, 2 * m3);
        let outs = compute_all(&cfg, &a, &b).unwrap();
        let surv = SurvivorSet::new(k + 2, (2..k + 2).collect()).unwrap();
        let dec = Decoder::new(&cfg, &surv).unwrap();
        let got = dec.decode_from_all(&outs).unwrap();
        assert!(rel_err(&got, &a.matmul(&b).unwrap()) < 1e-9, "({m1},{m2},{m3})");
    }
}

#[test]
fn orthopoly_example_any_nine_of_twelve() {
    let cfg = SchemeConfig::new(Scheme::OrthoPoly { m: 3, n: 3 }, 12).unwrap();
    let (a, b) = inputs(2024, 6, 6, 6);
    let c = a.matmul(&b).unwrap();
    let outs = compute_all(&cfg, &a, &b).unwrap();
    for subset in (0..12).combinations(9) {
        let s = SurvivorSet::new(12, subset).unwrap();
        let got = Decoder::new(&cfg, &s).unwrap().decode_from_all(&outs).unwrap();
        assert!(rel_err(&got, &c) <= 1e-9);
    }
}

#[test]
fn thresholds() {
    assert_eq!(Scheme::OrthoMatDot { m: 2 }.recovery_threshold(), 3);
    assert_eq!(Scheme::MatDot { m: 5 }.recovery_threshold(), 9);
    assert_eq!(Scheme::OrthoPoly { m: 3, n: 4 }.recovery_threshold(), 12);
    assert_eq!(Scheme::GenOrthoMatDot { m1: 2, m2: 2, m3: 2 }.recovery_threshold(), 15);
    for m in 1..10 {
        assert_eq!(
            Scheme::GenOrthoMatDot { m1: 1, m2: m, m3: 1 }.recovery_threshold(),
            2 * m - 1
        );
    }
}

#[test]
fn generalized_exponents() {
    let (a, b) = Scheme::GenOrthoMatDot { m1: 2, m2: 2, m3: 2 }.encoding_indices();
    // A blocks in order A00, A01, A10, A11; B blocks B00, B01, B10, B11.
    assert_eq!(a, vec![1, 0, 4, 3]);
    assert_eq!(b, vec![0, 9, 1, 10]);
    // Largest index of p_A is 3 + 1 = α + 1 with α = 3, smallest nonzero step of p_B is β = 9.
    assert_eq!(a.iter().max(), Some(&4));
    assert_eq!(b[1] - b[0], 9);
}

#[test]
fn matdot_scalar_example() {
    let cfg = SchemeConfig::with_points(Scheme::MatDot { m: 2 }, vec![1.0, -1.0, 0.5]).unwrap();
    let a = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
    let b = Matrix::from_rows(&[[3.0], [4.0]]).unwrap();
    let shards = encode(&cfg, &a, &b).unwrap();
    // x = 1: p_A = 1 + 2x = 3, p_B = 3x + 4 = 7.
    assert_eq!(shards[0].a[(0, 0)], 3.0);
    assert_eq!(shards[0].b[(0, 0)], 7.0);
    assert_eq!(worker_compute(&shards[0]).unwrap().product[(0, 0)], 21.0);
    assert_eq!(shards[2].a[(0, 0)], 2.0);
    assert_eq!(shards[2].b[(0, 0)], 5.5);

    let outs: Vec<_> = shards.iter().map(|s| worker_compute(s).unwrap()).collect();
    let all = SurvivorSet::new(3, vec![0, 1, 2]).unwrap();
    let coef = interpolate_coefficients(&cfg, &all, &outs).unwrap();
    for (c, want) in coef.iter().zip([4.0, 11.0, 6.0]) {
        assert_abs_diff_eq!(c[(0, 0)], want, epsilon = 1e-12);
    }
    assert_abs_diff_eq!(decode(&cfg, &all, &outs).unwrap()[(0, 0)], 11.0, epsilon = 1e-12);
}

#[test]
fn orthomatdot_single_block() {
    let cfg = SchemeConfig::new(Scheme::OrthoMatDot { m: 1 }, 3).unwrap();
    let (a, b) = inputs(1, 3, 2, 4);
    let shards = encode(&cfg, &a, &b).unwrap();
    for s in &shards {
        assert!(s.a.sub(&a.scaled(std::f64::consts::FRAC_1_SQRT_2)).unwrap().max_abs() < 1e-15);
        assert!(s.b.sub(&b.scaled(std::f64::consts::FRAC_1_SQRT_2)).unwrap().max_abs() < 1e-15);
    }
    let outs: Vec<_> = shards.iter().map(|s| worker_compute(s).unwrap()).collect();
    for w in 0..3 {
        let s = SurvivorSet::new(3, vec![w]).unwrap();
        let got = decode(&cfg, &s, &outs[w..w + 1]).unwrap();
        assert!(rel_err(&got, &a.matmul(&b).unwrap()) < 1e-14);
    }
}

#[test]
fn decode_ignores_presentation_order() {
    let cfg = SchemeConfig::new(Scheme::OrthoPoly { m: 2, n: 3 }, 9).unwrap();
    let (a, b) = inputs(3, 4, 5, 6);
    let outs = compute_all(&cfg, &a, &b).unwrap();
    let pick = [8, 1, 4, 0, 6, 3];
    let s = SurvivorSet::new(9, pick.to_vec()).unwrap();
    let forward: Vec<_> = pick.iter().map(|&w| outs[w].clone()).collect();
    let base = decode(&cfg, &s, &forward).unwrap();
    for perm in forward.iter().cloned().permutations(6).step_by(37) {
        assert_eq!(decode(&cfg, &s, &perm).unwrap(), base);
    }
}

/// `p_A(x)` for the orthonormal scheme, evaluated directly.
fn ortho_poly_eval(blocks: &[Matrix], x: f64) -> Matrix {
    let mut acc = blocks[0].scaled(std::f64::consts::FRAC_1_SQRT_2);
    for (i, blk) in blocks.iter().enumerate().skip(1) {
        acc.add_scaled(cheb_t(i, x), blk).unwrap();
    }
    acc
}

#[test]
fn quadrature_recovers_inner_products() {
    for m in 1..=6 {
        let (a, b) = inputs(40 + m as u64, 3, 2 * m, 4);
        let ab = a.split_grid(1, m).unwrap();
        let bb = b.split_grid(m, 1).unwrap();
        let direct = a.matmul(&b).unwrap();
        let mut sum = Matrix::zeros(3, 4);
        for &x in cheb_grid(m).unwrap().points() {
            let pc = ortho_poly_eval(&ab, x).matmul(&ortho_poly_eval(&bb, x)).unwrap();
            sum.add_scaled(2.0 / m as f64, &pc).unwrap();
        }
        assert!(rel_err(&sum, &direct) < 1e-9, "m = {m}");
    }
}

#[test]
#[allow(clippy::needless_range_loop)]
fn h_map_matches_interpolated_coefficients() {
    for m in 1..=4 {
        for n in 1..=4 {
            let k = m * n;
            let cfg = SchemeConfig::new(Scheme::OrthoPoly { m, n }, k).unwrap();
            let (a, b) = inputs((m * 10 + n) as u64, 2 * m, 3, 2 * n);
            let outs = compute_all(&cfg, &a, &b).unwrap();
            let s = SurvivorSet::new(k, (0..k).collect()).unwrap();
            let coef = interpolate_coefficients(&cfg, &s, &outs).unwrap();

            let ab = a.split_grid(m, 1).unwrap();
            let bb = b.split_grid(1, n).unwrap();
            let h = build_h_map(m, n).unwrap();
            for row in 0..k {
                let mut mapped = Matrix::zeros(2, 2);
                for j in 0..n {
                    for i in 0..m {
                        let w = h.matrix()[(row, h.column_of(i, j))];
                        if w != 0.0 {
                            mapped.add_scaled(w, &ab[i].matmul(&bb[j]).unwrap()).unwrap();
                        }
                    }
                }
                assert!(mapped.sub(&coef[row]).unwrap().max_abs() < 1e-9, "({m},{n}) row {row}");
            }
        }
    }
}

#[test]
fn generalized_coefficient_holds_half_the_block() {
    for (m1, m2, m3) in [(1, 2, 1), (2, 2, 2), (2, 3, 2), (1, 1, 2), (2, 1, 1)] {
        let s = Scheme::GenOrthoMatDot { m1, m2, m3 };
        let k = s.recovery_threshold();
        let cfg = SchemeConfig::new(s, k).unwrap();
        let (a, b) = inputs(77, 2 * m1, 2 * m2, 3 * m3);
        let outs = compute_all(&cfg, &a, &b).unwrap();
        let all = SurvivorSet::new(k, (0..k).collect()).unwrap();
        let coef = interpolate_coefficients(&cfg, &all, &outs).unwrap();
        let ab = a.split_grid(m1, m2).unwrap();
        let bb = b.split_grid(m2, m3).unwrap();
        for kk in 0..m1 {
            for l in 0..m3 {
                let mut c = Matrix::zeros(2, 3);
                for j in 0..m2 {
                    c.add_scaled(1.0, &ab[kk * m2 + j].matmul(&bb[j * m3 + l]).unwrap())
                        .unwrap();
                }
                let idx = gen_claim_index(m1, m2, kk, l);
                // Index 0 (only when m2 = 1) picks up ½ from each factor's T'_0.
                let factor = if idx == 0 { 0.25 } else { 0.5 };
                let diff = coef[idx].sub(&c.scaled(factor)).unwrap().max_abs();
                assert!(
                    diff < 1e-9 * c.max_abs().max(1.0),
                    "({m1},{m2},{m3}) block ({kk},{l}): {diff:e}"
                );
            }
        }
    }
}

#[test]
fn precondition_errors() {
    assert!(matches!(
        SchemeConfig::new(Scheme::OrthoPoly { m: 3, n: 3 }, 8),
        Err(Error::InvalidArgument(_))
    ));
    assert!(SchemeConfig::with_points(Scheme::MatDot { m: 1 }, vec![0.1, 0.1]).is_err());

    let cfg = SchemeConfig::new(Scheme::OrthoMatDot { m: 3 }, 7).unwrap();
    let few = SurvivorSet::new(7, vec![0, 1, 2, 3]).unwrap();
    assert!(matches!(Decoder::new(&cfg, &few), Err(Error::InvalidArgument(_))));

    let (a, b) = inputs(0, 4, 5, 4);
    let err = encode(&cfg, &a, &b).unwrap_err().to_string();
    assert!(err.contains("column count 5"), "{err}");
    let (a, b) = inputs(0, 4, 6, 4);
    let outs = compute_all(&cfg, &a, &b).unwrap();
    let s = SurvivorSet::new(7, vec![0, 1, 6, 3, 4]).unwrap();
    assert!(Decoder::new(&cfg, &s).unwrap().decode(&outs[..5]).is_err());
    assert!(SurvivorSet::new(7, vec![1, 1]).is_err());
    assert!(Scheme::from_parts("orthopoly", &[3]).is_err());
    assert_eq!(
        Scheme::from_parts("gen_orthomatdot", &[2, 2, 2])
            .unwrap()
            .recovery_threshold(),
        15
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_subsets_recover(seed in any::<u64>(), family in 0usize..5, extra in 0usize..5) {
        let scheme = [
            Scheme::MatDot { m: 3 },
            Scheme::OrthoMatDot { m: 3 },
            Scheme::Polynomial { m: 2, n: 3 },
            Scheme::OrthoPoly { m: 3, n: 2 },
            Scheme::GenOrthoMatDot { m1: 1, m2: 2, m3: 2 },
        ][family];
        let k = scheme.recovery_threshold();
        let p = k + extra;
        let cfg = SchemeConfig::new(scheme, p).unwrap();
        let (a, b) = inputs(seed, 6, 6, 6);
        let outs = compute_all(&cfg, &a, &b).unwrap();
        let mut rng = Rng::new(seed ^ 1);
        let picked = rand::seq::index::sample(&mut rng, p, k).into_vec();
        let s = SurvivorSet::new(p, picked).unwrap();
        let got = Decoder::new(&cfg, &s).unwrap().decode_from_all(&outs).unwrap();
        prop_assert!(rel_err(&got, &a.matmul(&b).unwrap()) < 1e-9);
    }
}
