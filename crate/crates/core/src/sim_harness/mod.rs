//! In-process simulation of a master, `P` workers and a fusion node, with
//! erasure patterns, the relative-error metric and experiment sweeps.

mod plan;
mod record;

pub use plan::{
    bound_records, cond_records, default_dims, gauss_records, lagrange_records, mm_records, splits_for, sweep,
    table1_plan, CondRow, FaultSpec, LagrangeRow, MatmulRow, PlanRow, DEFAULT_N, DEFAULT_SEEDS,
};
pub use record::{write_csv, write_json, ExperimentRecord, Metric, CSV_HEADER};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lagrange_codes::{lagrange_decode, DecodeBasis, LagrangeConfig, PolyMap};
use crate::linalg::Matrix;
use crate::matmul_codes::{compute_all, Decoder, SchemeConfig, SurvivorSet};
use crate::subsets::{self, binomial, SubsetMode};

/// Subsets above this count are sampled instead of enumerated.
pub const AUTO_EXHAUSTIVE_LIMIT: u128 = 10_000;

/// Default number of sampled survivor sets.
pub const DEFAULT_TRIAL_SAMPLES: usize = 2_000;

/// `‖truth − estimate‖_F / ‖truth‖_F`.
pub fn relative_error(truth: &Matrix, estimate: &Matrix) -> Result<f64> {
    let diff = truth.sub(estimate)?;
    let denom = truth.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::invalid("relative error of a zero matrix is undefined"));
    }
    Ok(diff.frobenius_norm() / denom)
}

fn vector_relative_error(truth: &[Vec<f64>], estimate: &[Vec<f64>]) -> Result<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for (t, e) in truth.iter().zip(estimate) {
        if t.len() != e.len() {
            return Err(Error::invalid("estimate and truth differ in dimension"));
        }
        for (a, b) in t.iter().zip(e) {
            num += (a - b) * (a - b);
            den += a * a;
        }
    }
    if den == 0.0 {
        return Err(Error::invalid("relative error of a zero vector is undefined"));
    }
    Ok((num / den).sqrt())
}

/// Which survivor sets a trial decodes from.
#[derive(Debug, Clone, PartialEq)]
pub enum FaultModel {
    /// Every threshold-size subset; reports worst and mean.
    Exhaustive,
    /// Every threshold-size subset; only the worst case is of interest.
    WorstOnly,
    /// `samples` distinct subsets drawn with `seed`.
    Random { samples: usize, seed: u64 },
    /// One given survivor set.
    Fixed(SurvivorSet),
}

impl FaultModel {
    /// Exhaustive when there are at most [`AUTO_EXHAUSTIVE_LIMIT`] subsets,
    /// otherwise [`DEFAULT_TRIAL_SAMPLES`] random ones.
    pub fn auto(workers: usize, threshold: usize, seed: u64) -> Self {
        if binomial(workers, threshold) <= AUTO_EXHAUSTIVE_LIMIT {
            FaultModel::Exhaustive
        } else {
            FaultModel::Random {
                samples: DEFAULT_TRIAL_SAMPLES,
                seed,
            }
        }
    }

    /// Label used in the `subset_mode` column.
    pub fn label(&self) -> String {
        match self {
            FaultModel::Exhaustive => "exhaustive".into(),
            FaultModel::WorstOnly => "worst_only".into(),
            FaultModel::Random { samples, .. } => format!("sampled[{samples}]"),
            FaultModel::Fixed(s) => {
                let idx: Vec<String> = s.indices().iter().map(|i| (i + 1).to_string()).collect();
                format!("fixed[{}]", idx.join(";"))
            }
        }
    }

    pub fn reports_average(&self) -> bool {
        !matches!(self, FaultModel::WorstOnly)
    }

    fn subset_mode(&self) -> Option<SubsetMode> {
        match *self {
            FaultModel::Exhaustive | FaultModel::WorstOnly => Some(SubsetMode::Exhaustive),
            FaultModel::Random { samples, seed } => Some(SubsetMode::Sampled { count: samples, seed }),
            FaultModel::Fixed(_) => None,
        }
    }
}

/// Worst and mean error over the survivor sets of a fault model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub worst: f64,
    pub average: f64,
    pub worst_subset: SurvivorSet,
    pub evaluated: usize,
    /// Survivor sets whose decode was numerically singular (counted as `+∞`).
    pub singular: usize,
}

/// Runs `eval` on every survivor set of `fault` and reduces in visiting order.
fn reduce_trial(
    workers: usize,
    threshold: usize,
    fault: &FaultModel,
    eval: impl Fn(&SurvivorSet) -> Result<f64> + Sync,
) -> Result<TrialResult> {
    let one = |s: &SurvivorSet, strict: bool| -> Result<f64> {
        match eval(s) {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Ok(f64::INFINITY),
            Err(Error::SingularMatrix { .. }) if !strict => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    };
    let mut acc = Acc::default();
    match fault {
        FaultModel::Fixed(s) => {
            if s.len() != threshold {
                return Err(Error::invalid(format!(
                    "fixed survivor set has {} workers, threshold is {threshold}",
                    s.len()
                )));
            }
            acc.push(s, one(s, true)?);
        }
        other => {
            let mode = other.subset_mode().expect("non-fixed fault model");
            subsets::for_each_chunk(workers, threshold, mode, |chunk| {
                let sets: Vec<SurvivorSet> = chunk
                    .iter()
                    .map(|c| SurvivorSet::new(workers, c.clone()))
                    .collect::<Result<_>>()?;
                let values: Vec<f64> = sets.par_iter().map(|s| one(s, false)).collect::<Result<_>>()?;
                for (s, v) in sets.iter().zip(values) {
                    acc.push(s, v);
                }
                Ok(())
            })?;
        }
    }
    acc.finish()
}

#[derive(Default)]
struct Acc {
    worst: Option<(f64, SurvivorSet)>,
    sum: f64,
    count: usize,
    singular: usize,
}

impl Acc {
    fn push(&mut self, s: &SurvivorSet, v: f64) {
        if v.is_infinite() {
            self.singular += 1;
        }
        if self.worst.as_ref().is_none_or(|(w, _)| v > *w) {
            self.worst = Some((v, s.clone()));
        }
        self.sum += v;
        self.count += 1;
    }

    fn finish(self) -> Result<TrialResult> {
        let (worst, worst_subset) = self
            .worst
            .ok_or_else(|| Error::invalid("no survivor sets to evaluate"))?;
        Ok(TrialResult {
            worst,
            average: self.sum / self.count as f64,
            worst_subset,
            evaluated: self.count,
            singular: self.singular,
        })
    }
}

/// Encodes once, runs all `P` workers once, then decodes from each survivor
/// set of the fault model and compares against the direct product.
///
/// Numerically singular decodes count as `+∞` except under
/// [`FaultModel::Fixed`], where they are reported as errors.
pub fn run_trial(config: &SchemeConfig, a: &Matrix, b: &Matrix, fault: &FaultModel) -> Result<TrialResult> {
    let truth = a.matmul(b)?;
    let outputs = compute_all(config, a, b)?;
    reduce_trial(config.workers(), config.recovery_threshold(), fault, |s| {
        let est = Decoder::new(config, s)?.decode_from_all(&outputs)?;
        relative_error(&truth, &est)
    })
}

/// Lagrange analog of [`run_trial`], with ℓ2 relative error over the stacked
/// estimates of `f(X_1), …, f(X_m)`.
pub fn run_lagrange_trial(
    config: &LagrangeConfig,
    f: &dyn PolyMap,
    data: &[Vec<f64>],
    basis: DecodeBasis,
    fault: &FaultModel,
) -> Result<TrialResult> {
    let encoded = crate::lagrange_codes::lagrange_encode(config, data)?;
    let outputs = crate::lagrange_codes::lagrange_workers(f, &encoded);
    let truth: Vec<Vec<f64>> = data.iter().map(|x| f.eval(x)).collect();
    reduce_trial(config.workers(), config.recovery_threshold(), fault, |s| {
        let outs: Vec<Vec<f64>> = s.indices().iter().map(|&w| outputs[w].clone()).collect();
        let est = lagrange_decode(config, f, s, &outs, basis)?;
        vector_relative_error(&truth, &est)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_examples() {
        let c = Matrix::from_rows(&[[3.0, 4.0]]).unwrap();
        assert_eq!(relative_error(&c, &c).unwrap(), 0.0);
        assert_eq!(relative_error(&c, &Matrix::zeros(1, 2)).unwrap(), 1.0);
        let e = Matrix::from_rows(&[[3.0, 0.0]]).unwrap();
        assert!((relative_error(&c, &e).unwrap() - 0.8).abs() < 1e-15);
        assert!(relative_error(&Matrix::zeros(1, 2), &c).is_err());
        assert!(relative_error(&c, &Matrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn labels() {
        assert_eq!(FaultModel::Exhaustive.label(), "exhaustive");
        assert_eq!(FaultModel::Random { samples: 2000, seed: 1 }.label(), "sampled[2000]");
        let s = SurvivorSet::new(12, vec![1, 4, 8]).unwrap();
        assert_eq!(FaultModel::Fixed(s).label(), "fixed[2;5;9]");
        assert_eq!(FaultModel::auto(30, 27, 0), FaultModel::Exhaustive);
        assert!(matches!(FaultModel::auto(50, 47, 0), FaultModel::Random { .. }));
    }
}
