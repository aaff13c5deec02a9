use serde::{Deserialize, Serialize};

use super::record::{ExperimentRecord, Metric};
use super::{run_lagrange_trial, run_trial, FaultModel, TrialResult};
use crate::cheb_vandermonde::{gaussian_bound_trial, subset_cond_stats, theorem_bound_value, GeneratorKind};
use crate::error::{Error, Result};
use crate::lagrange_codes::{DecodeBasis, LagrangeConfig, LinearForm};
use crate::linalg::{derive_seed, gaussian_matrix, Norm, Rng};
use crate::matmul_codes::{Scheme, SchemeConfig, SurvivorSet};
use crate::poly_basis::cheb_grid;
use crate::subsets::{binomial, SubsetMode, SubsetSpec};

/// Side length of the input matrices unless a row says otherwise.
pub const DEFAULT_N: usize = 120;

/// Input realizations per error point.
pub const DEFAULT_SEEDS: usize = 5;

/// Stream offset separating subset sampling from input generation.
const SUBSET_STREAM: u64 = 1 << 32;

fn default_seeds() -> usize {
    DEFAULT_SEEDS
}

/// Survivor-set selection as written in a plan file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultSpec {
    /// Exhaustive for small subset counts, sampled otherwise.
    #[default]
    Auto,
    Exhaustive,
    WorstOnly,
    Random(usize),
    /// One-based indices of the workers that fail.
    Kill(Vec<usize>),
}

/// Coded matrix multiplication error experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatmulRow {
    pub scheme: String,
    pub workers: usize,
    /// Redundancy `P − threshold`; used to pick splits when `splits` is absent.
    #[serde(default)]
    pub delta: Option<usize>,
    #[serde(default)]
    pub splits: Option<Vec<usize>>,
    /// Explicit `[n1, n2, n3]`; overrides `size`.
    #[serde(default)]
    pub dims: Option<[usize; 3]>,
    /// Base side length, rounded up per dimension to fit the splits.
    /// Defaults to [`DEFAULT_N`].
    #[serde(default)]
    pub size: Option<usize>,
    #[serde(default)]
    pub fault: FaultSpec,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub seed: u64,
}

/// Worst/average conditioning of square generator submatrices on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondRow {
    pub basis: GeneratorKind,
    pub workers: usize,
    pub delta: usize,
    #[serde(default = "default_norm")]
    pub norm: Norm,
    /// Sample count; exhaustive when absent.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

fn default_norm() -> Norm {
    Norm::Spectral
}

/// Lagrange coded computing error experiment with `f(x) = (yᵀx)^degf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangeRow {
    pub basis: DecodeBasis,
    pub workers: usize,
    /// Data points; defaults to `workers − 2`.
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_degf")]
    pub degf: usize,
    /// Sampled survivor sets per realization; `null` means all of them.
    #[serde(default = "default_lagrange_samples")]
    pub samples: Option<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_dim() -> usize {
    10
}

fn default_degf() -> usize {
    1
}

fn default_lagrange_samples() -> Option<usize> {
    Some(50)
}

/// One line of a sweep plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum PlanRow {
    Matmul(MatmulRow),
    Cond(CondRow),
    Lagrange(LagrangeRow),
}

/// Split counts for a family at `workers` workers with `delta` redundancy.
///
/// MatDot-type schemes need an odd threshold. Polynomial-type schemes
/// factor the threshold as `m·n` with `n` the largest divisor not above its
/// square root. The generalized scheme always needs explicit splits.
pub fn splits_for(family: &str, workers: usize, delta: usize) -> Result<Scheme> {
    if delta >= workers {
        return Err(Error::invalid(format!(
            "redundancy {delta} leaves no survivors out of {workers}"
        )));
    }
    let k = workers - delta;
    match family {
        "matdot" | "orthomatdot" => {
            if k.is_multiple_of(2) {
                return Err(Error::invalid(format!(
                    "{family} needs an odd threshold, P − delta = {k}"
                )));
            }
            Scheme::from_parts(family, &[k.div_ceil(2)])
        }
        "polynomial" | "orthopoly" => {
            let n = (1..=k)
                .take_while(|d| d * d <= k)
                .filter(|d| k.is_multiple_of(*d))
                .max()
                .unwrap_or(1);
            Scheme::from_parts(family, &[k / n, n])
        }
        "gen_orthomatdot" => Err(Error::invalid("gen_orthomatdot needs explicit splits")),
        other => Err(Error::invalid(format!("unknown scheme '{other}'"))),
    }
}

fn round_up(n: usize, to: usize) -> usize {
    n.div_ceil(to) * to
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// `n × n × n` inputs, with each dimension rounded up to the next multiple
/// of the split counts that act on it.
pub fn default_dims(scheme: Scheme, n: usize) -> [usize; 3] {
    let (ar, ac) = scheme.a_grid();
    let (br, bc) = scheme.b_grid();
    [round_up(n, ar), round_up(n, lcm(ac, br)), round_up(n, bc)]
}

fn realization_seed(seed: u64, k: usize) -> u64 {
    derive_seed(seed, k as u64)
}

/// The fault model a spec resolves to for one realization.
fn resolve_fault(spec: &FaultSpec, workers: usize, threshold: usize, subset_seed: u64) -> Result<FaultModel> {
    Ok(match spec {
        FaultSpec::Auto => FaultModel::auto(workers, threshold, subset_seed),
        FaultSpec::Exhaustive => FaultModel::Exhaustive,
        FaultSpec::WorstOnly => FaultModel::WorstOnly,
        FaultSpec::Random(n) if (*n as u128) >= binomial(workers, threshold) => FaultModel::Exhaustive,
        FaultSpec::Random(n) => FaultModel::Random {
            samples: *n,
            seed: subset_seed,
        },
        FaultSpec::Kill(dead) => {
            if let Some(&bad) = dead.iter().find(|&&i| i == 0 || i > workers) {
                return Err(Error::invalid(format!("worker {bad} out of range 1..={workers}")));
            }
            let zero: Vec<usize> = dead.iter().map(|i| i - 1).collect();
            let alive = SubsetSpec::complement(workers, &zero)?;
            if alive.len() < threshold {
                return Err(Error::invalid(format!(
                    "{} survivors cannot reach the recovery threshold {threshold}",
                    alive.len()
                )));
            }
            FaultModel::Fixed(SurvivorSet::new(workers, alive.indices()[..threshold].to_vec())?)
        }
    })
}

struct Summary {
    worst: f64,
    average: f64,
    label: String,
    with_average: bool,
}

/// Means over realizations of the per-realization worst and average.
fn summarize(trials: &[(TrialResult, FaultModel)]) -> Summary {
    let n = trials.len() as f64;
    let fault = &trials[0].1;
    Summary {
        worst: trials.iter().map(|(t, _)| t.worst).sum::<f64>() / n,
        average: trials.iter().map(|(t, _)| t.average).sum::<f64>() / n,
        label: fault.label(),
        with_average: fault.reports_average(),
    }
}

struct Identity {
    scheme: String,
    workers: usize,
    threshold: usize,
    seed: u64,
    dims: [usize; 3],
}

impl Identity {
    fn record(&self, metric: Metric, value: f64, subset_mode: &str) -> ExperimentRecord {
        ExperimentRecord {
            scheme: self.scheme.clone(),
            workers: self.workers,
            threshold: self.threshold,
            delta: self.workers.saturating_sub(self.threshold),
            metric,
            value,
            seed: self.seed,
            dims: self.dims,
            subset_mode: subset_mode.to_string(),
            error: String::new(),
        }
    }

    fn error_summary(&self, s: &Summary) -> Vec<ExperimentRecord> {
        let mut out = vec![self.record(Metric::RelerrWorst, s.worst, &s.label)];
        if s.with_average {
            out.push(self.record(Metric::RelerrAvg, s.average, &s.label));
        }
        out
    }
}

/// Error records of one coded matrix multiplication experiment.
pub fn mm_records(row: &MatmulRow) -> Result<Vec<ExperimentRecord>> {
    let scheme = match &row.splits {
        Some(s) => Scheme::from_parts(&row.scheme, s)?,
        None => {
            let delta = row
                .delta
                .ok_or_else(|| Error::invalid("matmul rows need either splits or delta"))?;
            splits_for(&row.scheme, row.workers, delta)?
        }
    };
    if row.seeds == 0 {
        return Err(Error::invalid("seeds must be at least 1"));
    }
    let config = SchemeConfig::new(scheme, row.workers)?;
    let k = config.recovery_threshold();
    if let Some(d) = row.delta {
        if row.splits.is_some() && d + k != row.workers {
            return Err(Error::invalid(format!(
                "splits give threshold {k}, which does not match P − delta = {}",
                row.workers.saturating_sub(d)
            )));
        }
    }
    let dims = row
        .dims
        .unwrap_or_else(|| default_dims(scheme, row.size.unwrap_or(DEFAULT_N)));
    let mut trials = Vec::with_capacity(row.seeds);
    for r in 0..row.seeds {
        let s = realization_seed(row.seed, r);
        let mut rng = Rng::new(s);
        let a = gaussian_matrix(&mut rng, dims[0], dims[1]);
        let b = gaussian_matrix(&mut rng, dims[1], dims[2]);
        let fault = resolve_fault(&row.fault, row.workers, k, derive_seed(s, SUBSET_STREAM))?;
        trials.push((run_trial(&config, &a, &b, &fault)?, fault));
    }
    let id = Identity {
        scheme: scheme.name().into(),
        workers: row.workers,
        threshold: k,
        seed: row.seed,
        dims,
    };
    Ok(id.error_summary(&summarize(&trials)))
}

/// Condition-number records of one generator family.
pub fn cond_records(row: &CondRow) -> Result<Vec<ExperimentRecord>> {
    if row.delta >= row.workers {
        return Err(Error::invalid(format!("redundancy {} leaves no rows", row.delta)));
    }
    let k = row.workers - row.delta;
    let pts = cheb_grid(row.workers)?.into_points();
    let (mode, label) = match row.samples {
        Some(n) if (n as u128) < binomial(row.workers, k) => (
            SubsetMode::Sampled {
                count: n,
                seed: row.seed,
            },
            format!("sampled[{n}]"),
        ),
        _ => (SubsetMode::Exhaustive, "exhaustive".to_string()),
    };
    let stats = subset_cond_stats(row.basis, k, &pts, k, row.norm, mode)?;
    let id = Identity {
        scheme: row.basis.as_str().into(),
        workers: row.workers,
        threshold: k,
        seed: row.seed,
        dims: [k, row.workers, 0],
    };
    Ok(vec![
        id.record(Metric::CondWorst, stats.worst, &label),
        id.record(Metric::CondAvg, stats.average, &label),
    ])
}

/// Lagrange error records.
pub fn lagrange_records(row: &LagrangeRow) -> Result<Vec<ExperimentRecord>> {
    let m = match row.m {
        Some(m) => m,
        None => row
            .workers
            .checked_sub(2)
            .filter(|&m| m >= 1)
            .ok_or_else(|| Error::invalid("need at least 3 workers for the default m = P − 2"))?,
    };
    if row.seeds == 0 || row.samples == Some(0) {
        return Err(Error::invalid("seeds and samples must be at least 1"));
    }
    let config = LagrangeConfig::new(m, row.workers, row.dim, row.degf)?;
    let k = config.recovery_threshold();
    let mut trials = Vec::with_capacity(row.seeds);
    for r in 0..row.seeds {
        let s = realization_seed(row.seed, r);
        let mut rng = Rng::new(s);
        let f = LinearForm::new(gaussian_matrix(&mut rng, row.dim, 1), row.degf)?;
        let data: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..row.dim).map(|_| rng.standard_normal()).collect())
            .collect();
        let spec = row.samples.map_or(FaultSpec::Exhaustive, FaultSpec::Random);
        let fault = resolve_fault(&spec, row.workers, k, derive_seed(s, SUBSET_STREAM))?;
        trials.push((run_lagrange_trial(&config, &f, &data, row.basis, &fault)?, fault));
    }
    let id = Identity {
        scheme: lagrange_name(row.basis).into(),
        workers: row.workers,
        threshold: k,
        seed: row.seed,
        dims: [m, row.dim, 1],
    };
    Ok(id.error_summary(&summarize(&trials)))
}

/// Measured worst-case Frobenius condition number of `(n − s)`-column
/// Chebyshev submatrices on the `n`-point grid, the bound, and their ratio.
pub fn bound_records(n: usize, s: usize, samples: Option<usize>, seed: u64) -> Result<Vec<ExperimentRecord>> {
    let bound = theorem_bound_value(n, s)?;
    let row = CondRow {
        basis: GeneratorKind::Chebyshev,
        workers: n,
        delta: s,
        norm: Norm::Frobenius,
        samples,
        seed,
    };
    let mut recs = cond_records(&row)?;
    recs.truncate(1);
    let worst = recs[0].value;
    let label = recs[0].subset_mode.clone();
    let id = Identity {
        scheme: "chebyshev".into(),
        workers: n,
        threshold: n - s,
        seed,
        dims: [n - s, n, 0],
    };
    recs.push(id.record(Metric::Bound, bound, &label));
    recs.push(id.record(Metric::BoundRatio, worst / bound, &label));
    Ok(recs)
}

/// Monte Carlo check of the random-matrix conditioning bound.
pub fn gauss_records(m: usize, p: usize, trials: usize, seed: u64) -> Result<Vec<ExperimentRecord>> {
    let mut rng = Rng::new(seed);
    let t = gaussian_bound_trial(m, p, trials, &mut rng)?;
    let label = format!("trials[{trials}]");
    let id = Identity {
        scheme: "gaussian".into(),
        workers: p,
        threshold: m,
        seed,
        dims: [m, p, 0],
    };
    Ok(vec![
        id.record(Metric::ViolationFrac, t.violation_fraction(), &label),
        id.record(Metric::BoundProb, t.bound_prob, &label),
    ])
}

fn lagrange_name(basis: DecodeBasis) -> &'static str {
    match basis {
        DecodeBasis::Chebyshev => "lagrange_chebyshev",
        DecodeBasis::Monomial => "lagrange_monomial",
    }
}

fn failure_records(row: &PlanRow, err: &Error) -> Vec<ExperimentRecord> {
    let (scheme, workers, metrics) = match row {
        PlanRow::Matmul(r) => (
            r.scheme.clone(),
            r.workers,
            vec![Metric::RelerrWorst, Metric::RelerrAvg],
        ),
        PlanRow::Cond(r) => (
            r.basis.as_str().to_string(),
            r.workers,
            vec![Metric::CondWorst, Metric::CondAvg],
        ),
        PlanRow::Lagrange(r) => (
            lagrange_name(r.basis).to_string(),
            r.workers,
            vec![Metric::RelerrWorst, Metric::RelerrAvg],
        ),
    };
    let seed = match row {
        PlanRow::Matmul(r) => r.seed,
        PlanRow::Cond(r) => r.seed,
        PlanRow::Lagrange(r) => r.seed,
    };
    metrics
        .into_iter()
        .map(|metric| ExperimentRecord {
            scheme: scheme.clone(),
            workers,
            threshold: 0,
            delta: 0,
            metric,
            value: f64::INFINITY,
            seed,
            dims: [0, 0, 0],
            subset_mode: String::new(),
            error: format!("{}: {err}", err.kind()),
        })
        .collect()
}

/// Runs every row in order. A failing row yields records carrying the error
/// instead of aborting the sweep.
pub fn sweep(plan: &[PlanRow]) -> Vec<ExperimentRecord> {
    plan.iter()
        .flat_map(|row| {
            let res = match row {
                PlanRow::Matmul(r) => mm_records(r),
                PlanRow::Cond(r) => cond_records(r),
                PlanRow::Lagrange(r) => lagrange_records(r),
            };
            res.unwrap_or_else(|e| failure_records(row, &e))
        })
        .collect()
}

/// MatDot and OrthoMatDot at `P ∈ {30, 50, 80, 150}` with three redundant
/// workers, on inputs of base size `size` (default [`DEFAULT_N`]).
pub fn table1_plan(seed: u64, size: Option<usize>) -> Vec<PlanRow> {
    let mut plan = Vec::new();
    for p in [30, 50, 80, 150] {
        for scheme in ["matdot", "orthomatdot"] {
            plan.push(PlanRow::Matmul(MatmulRow {
                scheme: scheme.into(),
                workers: p,
                delta: Some(3),
                splits: None,
                dims: None,
                size,
                fault: FaultSpec::Auto,
                seeds: DEFAULT_SEEDS,
                seed,
            }));
        }
    }
    plan
}
