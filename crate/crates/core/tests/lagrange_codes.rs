use ccc_core::lagrange_codes::*;
use ccc_core::linalg::{gaussian_matrix, Matrix, Rng};
use ccc_core::matmul_codes::SurvivorSet;
use ccc_core::Error;
use itertools::Itertools;
use proptest::prelude::*;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative ℓ2 error of the stacked estimates.
fn rel_err(got: &[Vec<f64>], want: &[Vec<f64>]) -> f64 {
    let diff: Vec<f64> = got
        .iter()
        .flatten()
        .zip(want.iter().flatten())
        .map(|(a, b)| a - b)
        .collect();
    norm(&diff) / norm(&want.iter().flatten().copied().collect::<Vec<_>>())
}

fn data(rng: &mut Rng, m: usize, d: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| (0..d).map(|_| rng.standard_normal()).collect())
        .collect()
}

struct Run {
    truth: Vec<Vec<f64>>,
    outputs: Vec<Vec<f64>>,
}

fn run(cfg: &LagrangeConfig, f: &dyn PolyMap, x: &[Vec<f64>]) -> Run {
    let enc = lagrange_encode(cfg, x).unwrap();
    Run {
        truth: x.iter().map(|xi| f.eval(xi)).collect(),
        outputs: lagrange_workers(f, &enc),
    }
}

fn decode_subset(
    cfg: &LagrangeConfig,
    f: &dyn PolyMap,
    r: &Run,
    mut subset: Vec<usize>,
    basis: DecodeBasis,
) -> Result<Vec<Vec<f64>>, Error> {
    subset.sort_unstable();
    let outs: Vec<_> = subset.iter().map(|&w| r.outputs[w].clone()).collect();
    let s = SurvivorSet::new(cfg.workers(), subset).unwrap();
    lagrange_decode(cfg, f, &s, &outs, basis)
}

#[test]
fn anchors_pass_through() {
    let mut rng = Rng::new(1);
    let cfg = LagrangeConfig::new(4, 9, 3, 1).unwrap();
    let f = LinearForm::new(gaussian_matrix(&mut rng, 3, 2), 1).unwrap();
    let r = run(&cfg, &f, &data(&mut rng, 4, 3));
    let got = decode_subset(&cfg, &f, &r, (0..4).collect(), DecodeBasis::Chebyshev).unwrap();
    for (g, o) in got.iter().zip(&r.outputs) {
        for (a, b) in g.iter().zip(o) {
            assert!((a - b).abs() <= 1e-9);
        }
    }
}

#[test]
fn doubling_map_from_any_pair() {
    let cfg = LagrangeConfig::new(2, 4, 1, 1).unwrap();
    let f = LinearForm::new(Matrix::from_rows(&[[2.0]]).unwrap(), 1).unwrap();
    let r = run(&cfg, &f, &[vec![0.7], vec![-1.3]]);
    for subset in (0..4).combinations(2) {
        for basis in [DecodeBasis::Chebyshev, DecodeBasis::Monomial] {
            let got = decode_subset(&cfg, &f, &r, subset.clone(), basis).unwrap();
            assert!((got[0][0] - 1.4).abs() < 1e-9 && (got[1][0] + 2.6).abs() < 1e-9);
        }
    }
}

#[test]
fn linear_map_every_subset() {
    for p in [6, 10, 20] {
        let m = p - 2;
        let mut rng = Rng::new(p as u64);
        let cfg = LagrangeConfig::new(m, p, 10, 1).unwrap();
        let f = LinearForm::new(gaussian_matrix(&mut rng, 10, 1), 1).unwrap();
        let r = run(&cfg, &f, &data(&mut rng, m, 10));
        for subset in (0..p).combinations(cfg.recovery_threshold()) {
            let got = decode_subset(&cfg, &f, &r, subset.clone(), DecodeBasis::Chebyshev).unwrap();
            let e = rel_err(&got, &r.truth);
            assert!(e <= 1e-7, "P = {p}, subset {subset:?}: {e:e}");
        }
    }
}

#[test]
fn squared_sum_map() {
    for m in 1..=5 {
        let p = 2 * m + 1;
        let cfg = LagrangeConfig::new(m, p, 4, 2).unwrap();
        let f = LinearForm::new(Matrix::from_fn(4, 1, |_, _| 1.0), 2).unwrap();
        let mut rng = Rng::new(m as u64);
        let x = data(&mut rng, m, 4);
        let r = run(&cfg, &f, &x);
        let direct: Vec<Vec<f64>> = x.iter().map(|xi| vec![xi.iter().sum::<f64>().powi(2)]).collect();
        assert_eq!(r.truth, direct);
        for subset in (0..p).combinations(2 * m - 1) {
            let got = decode_subset(&cfg, &f, &r, subset, DecodeBasis::Chebyshev).unwrap();
            assert!(rel_err(&got, &r.truth) <= 1e-6);
        }
    }
}

#[test]
fn chebyshev_beats_monomial_at_scale() {
    let mut rng = Rng::new(99);
    let d = 10;
    for p in [40, 60] {
        let m = p - 2;
        let cfg = LagrangeConfig::new(m, p, d, 1).unwrap();
        let f = LinearForm::new(gaussian_matrix(&mut rng, d, 1), 1).unwrap();
        let r = run(&cfg, &f, &data(&mut rng, m, d));
        for _ in 0..5 {
            let subset = rand::seq::index::sample(&mut rng, p, m).into_vec();
            let cheb = rel_err(
                &decode_subset(&cfg, &f, &r, subset.clone(), DecodeBasis::Chebyshev).unwrap(),
                &r.truth,
            );
            let mono = match decode_subset(&cfg, &f, &r, subset, DecodeBasis::Monomial) {
                Ok(est) => rel_err(&est, &r.truth),
                Err(Error::SingularMatrix { .. }) => f64::INFINITY,
                Err(e) => panic!("{e}"),
            };
            assert!(cheb <= mono, "P = {p}: {cheb:e} vs {mono:e}");
            assert!(cheb < 1e-6);
        }
    }
}

#[test]
fn decode_preconditions() {
    let cfg = LagrangeConfig::new(3, 6, 1, 1).unwrap();
    let f = LinearForm::new(Matrix::from_rows(&[[1.0]]).unwrap(), 1).unwrap();
    let s = SurvivorSet::new(6, vec![0, 1]).unwrap();
    let err = lagrange_decode(&cfg, &f, &s, &[vec![1.0], vec![2.0]], DecodeBasis::Chebyshev).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
    let f2 = LinearForm::new(Matrix::from_rows(&[[1.0]]).unwrap(), 2).unwrap();
    let s = SurvivorSet::new(6, vec![0, 1, 2]).unwrap();
    assert!(lagrange_decode(&cfg, &f2, &s, &vec![vec![1.0]; 3], DecodeBasis::Chebyshev).is_err());
    assert!(lagrange_encode(&cfg, &[vec![1.0]]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn encoding_is_systematic(seed in any::<u64>(), m in 1usize..6, extra in 0usize..6, d in 1usize..4) {
        let cfg = LagrangeConfig::new(m, m + extra, d, 1).unwrap();
        let mut rng = Rng::new(seed);
        let x = data(&mut rng, m, d);
        let enc = lagrange_encode(&cfg, &x).unwrap();
        prop_assert_eq!(&enc[..m], &x[..]);
    }

    #[test]
    fn random_subset_recovers(seed in any::<u64>(), m in 1usize..6, deg in 1usize..3) {
        let k = (m - 1) * deg + 1;
        let p = k + 3;
        let cfg = LagrangeConfig::new(m, p, 3, deg).unwrap();
        let mut rng = Rng::new(seed);
        let f = LinearForm::new(gaussian_matrix(&mut rng, 3, 2), deg).unwrap();
        let r = run(&cfg, &f, &data(&mut rng, m, 3));
        let subset = rand::seq::index::sample(&mut rng, p, k).into_vec();
        let got = decode_subset(&cfg, &f, &r, subset, DecodeBasis::Chebyshev).unwrap();
        prop_assert!(rel_err(&got, &r.truth) < 1e-6);
    }
}
