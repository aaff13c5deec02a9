use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 12] = [
    "scheme",
    "P",
    "threshold",
    "delta",
    "metric",
    "value",
    "seed",
    "n1",
    "n2",
    "n3",
    "subset_mode",
    "error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    CondWorst,
    CondAvg,
    RelerrWorst,
    RelerrAvg,
    /// Raw value of the worst-case condition bound.
    Bound,
    /// Measured worst-case condition number divided by the bound.
    BoundRatio,
    /// Fraction of random trials exceeding the random-matrix bound.
    ViolationFrac,
    /// Probability the random-matrix bound allows for a violation.
    BoundProb,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::CondWorst => "cond_worst",
            Metric::CondAvg => "cond_avg",
            Metric::RelerrWorst => "relerr_worst",
            Metric::RelerrAvg => "relerr_avg",
            Metric::Bound => "bound",
            Metric::BoundRatio => "bound_ratio",
            Metric::ViolationFrac => "violation_frac",
            Metric::BoundProb => "bound_prob",
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One output row of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub scheme: String,
    pub workers: usize,
    pub threshold: usize,
    pub delta: usize,
    pub metric: Metric,
    /// `+∞` marks singular decodes or failed rows.
    pub value: f64,
    pub seed: u64,
    pub dims: [usize; 3],
    pub subset_mode: String,
    /// Empty unless the row failed; then `<kind>: <message>`.
    pub error: String,
}

impl ExperimentRecord {
    pub fn failed(&self) -> bool {
        !self.error.is_empty()
    }

    fn fields(&self) -> [String; 12] {
        [
            self.scheme.clone(),
            self.workers.to_string(),
            self.threshold.to_string(),
            self.delta.to_string(),
            self.metric.to_string(),
            format_value(self.value),
            self.seed.to_string(),
            self.dims[0].to_string(),
            self.dims[1].to_string(),
            self.dims[2].to_string(),
            self.subset_mode.clone(),
            self.error.clone(),
        ]
    }
}

/// Shortest round-trip decimal; non-finite values as `inf`, `-inf`, `nan`.
pub(crate) fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:?}")
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::invalid(format!("write failed: {e}"))
}

pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in records {
        w.write_record(r.fields()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn write_json<W: Write>(records: &[ExperimentRecord], mut out: W) -> Result<()> {
    let rows: Vec<serde_json::Value> = records
        .iter()
        .map(|r| {
            let value = if r.value.is_finite() {
                serde_json::json!(r.value)
            } else {
                serde_json::json!(format_value(r.value))
            };
            serde_json::json!({
                "scheme": r.scheme,
                "P": r.workers,
                "threshold": r.threshold,
                "delta": r.delta,
                "metric": r.metric.as_str(),
                "value": value,
                "seed": r.seed,
                "n1": r.dims[0],
                "n2": r.dims[1],
                "n3": r.dims[2],
                "subset_mode": r.subset_mode,
                "error": r.error,
            })
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &rows).map_err(io_err)?;
    writeln!(out).map_err(io_err)
}
