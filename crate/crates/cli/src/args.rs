use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ccc", version, about = "Chebyshev coded computing experiments")]
pub struct Cli {
    /// Write records here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Suppress progress messages on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Worst and average condition number of square generator submatrices.
    Cond(CondArgs),
    /// Coded matrix multiplication under erasures.
    Mm(MmArgs),
    /// MatDot against OrthoMatDot at P = 30, 50, 80, 150 with three redundant workers.
    Table1(Table1Args),
    /// Run a JSON plan file.
    Sweep(SweepArgs),
    /// Lagrange coded computing of a linear form.
    Lagrange(LagrangeArgs),
    /// Worst-case conditioning against its growth bound, or the Gaussian bound check.
    Bound(BoundArgs),
    /// Quick property checks of every module.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Args)]
pub struct CondArgs {
    #[arg(long, default_value = "chebyshev")]
    pub basis: String,
    /// Generator rows K; defaults to points − redundancy.
    #[arg(long)]
    pub rows: Option<usize>,
    /// Number of grid points P.
    #[arg(long)]
    pub points: usize,
    /// P − K; defaults to points − rows.
    #[arg(long)]
    pub redundancy: Option<usize>,
    /// l2 or frobenius.
    #[arg(long, default_value = "l2")]
    pub norm: String,
    #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
    pub mode: Mode,
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MmArgs {
    /// matdot, orthomatdot, polynomial, orthopoly or gen_orthomatdot.
    #[arg(long)]
    pub scheme: String,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m1: Option<usize>,
    #[arg(long)]
    pub m2: Option<usize>,
    #[arg(long)]
    pub m3: Option<usize>,
    /// Number of workers P.
    #[arg(long)]
    pub workers: usize,
    /// One-based indices of failed workers, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["exhaustive", "samples"])]
    pub kill: Option<Vec<usize>>,
    /// Decode from every threshold-size survivor set.
    #[arg(long, conflicts_with = "samples")]
    pub exhaustive: bool,
    /// Decode from this many random survivor sets.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, requires_all = ["n2", "n3"])]
    pub n1: Option<usize>,
    #[arg(long, requires_all = ["n1", "n3"])]
    pub n2: Option<usize>,
    #[arg(long, requires_all = ["n1", "n2"])]
    pub n3: Option<usize>,
    /// Input realizations averaged per record.
    #[arg(long, default_value_t = 1)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Base side length of the inputs, rounded up to fit each split.
    #[arg(long)]
    pub dims: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub plan: PathBuf,
}

#[derive(Debug, Args)]
pub struct LagrangeArgs {
    /// Data points; defaults to workers − 2.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub workers: usize,
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    #[arg(long, default_value_t = 1)]
    pub degf: usize,
    /// chebyshev or monomial.
    #[arg(long, default_value = "chebyshev")]
    pub basis: String,
    #[arg(long, value_enum, default_value_t = Mode::Sampled)]
    pub mode: Mode,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    #[arg(long, default_value_t = 5)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Grid size.
    #[arg(long, required_unless_present = "gauss", conflicts_with = "gauss")]
    pub n: Option<usize>,
    /// Redundancy.
    #[arg(long, required_unless_present = "gauss", conflicts_with = "gauss")]
    pub s: Option<usize>,
    /// Sample this many submatrices instead of enumerating them.
    #[arg(long, conflicts_with = "gauss")]
    pub samples: Option<usize>,
    /// Check the Gaussian random-matrix bound instead.
    #[arg(long, requires_all = ["m", "workers"])]
    pub gauss: bool,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
