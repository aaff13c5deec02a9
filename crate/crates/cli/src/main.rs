mod args;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;

use args::{BoundArgs, Cli, Command, CondArgs, Format, LagrangeArgs, MmArgs, Mode};
use ccc_core::matmul_codes::Scheme;
use ccc_core::sim_harness::{
    bound_records, cond_records, gauss_records, lagrange_records, mm_records, sweep, table1_plan, write_csv,
    write_json, CondRow, ExperimentRecord, FaultSpec, LagrangeRow, MatmulRow, PlanRow,
};

/// A failure, reported as `error=<kind> message=<text>`. Kind `usage`
/// exits with status 2, everything else with 1.
#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
}

impl From<ccc_core::Error> for Failure {
    fn from(e: ccc_core::Error) -> Self {
        Failure {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure {
        kind: "io",
        message: e.to_string(),
    }
}

fn seed_override(seed: u64) -> Result<u64, Failure> {
    match std::env::var("CCC_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure {
            kind: "invalid_argument",
            message: format!("CCC_SEED must be an unsigned integer, got '{v}'"),
        }),
        Err(_) => Ok(seed),
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        kind: "usage",
        message: message.into(),
    }
}

fn parse<T: std::str::FromStr<Err = ccc_core::Error>>(s: &str) -> Result<T, Failure> {
    s.parse::<T>().map_err(|e| usage(e.to_string()))
}

fn cond(a: &CondArgs) -> Result<Vec<ExperimentRecord>, Failure> {
    let delta = match (a.rows, a.redundancy) {
        (Some(k), Some(d)) if k + d != a.points => {
            return Err(usage(format!(
                "rows {k} + redundancy {d} must equal points {}",
                a.points
            )))
        }
        (_, Some(d)) => d,
        (Some(k), None) => a
            .points
            .checked_sub(k)
            .ok_or_else(|| usage(format!("rows {k} exceed points {}", a.points)))?,
        (None, None) => return Err(usage("give --rows or --redundancy")),
    };
    let row = CondRow {
        basis: parse(&a.basis)?,
        workers: a.points,
        delta,
        norm: parse(&a.norm)?,
        samples: (a.mode == Mode::Sampled).then_some(a.samples),
        seed: seed_override(a.seed)?,
    };
    Ok(cond_records(&row)?)
}

fn mm(a: &MmArgs) -> Result<Vec<ExperimentRecord>, Failure> {
    let missing = |name: &str| usage(format!("{} needs --{name}", a.scheme));
    let splits = match a.scheme.as_str() {
        "matdot" | "orthomatdot" => vec![a.m.ok_or_else(|| missing("m"))?],
        "polynomial" | "orthopoly" => vec![a.m.ok_or_else(|| missing("m"))?, a.n.ok_or_else(|| missing("n"))?],
        "gen_orthomatdot" => vec![
            a.m1.ok_or_else(|| missing("m1"))?,
            a.m2.ok_or_else(|| missing("m2"))?,
            a.m3.ok_or_else(|| missing("m3"))?,
        ],
        other => return Err(usage(format!("unknown scheme '{other}'"))),
    };
    Scheme::from_parts(&a.scheme, &splits).map_err(|e| usage(e.to_string()))?;
    let fault = match (&a.kill, a.exhaustive, a.samples) {
        (Some(k), _, _) => FaultSpec::Kill(k.clone()),
        (None, true, _) => FaultSpec::Exhaustive,
        (None, false, Some(n)) => FaultSpec::Random(n),
        (None, false, None) => FaultSpec::Auto,
    };
    let dims = match (a.n1, a.n2, a.n3) {
        (Some(x), Some(y), Some(z)) => Some([x, y, z]),
        _ => None,
    };
    let row = MatmulRow {
        scheme: a.scheme.clone(),
        workers: a.workers,
        delta: None,
        splits: Some(splits),
        dims,
        size: None,
        fault,
        seeds: a.seeds,
        seed: seed_override(a.seed)?,
    };
    Ok(mm_records(&row)?)
}

fn lagrange(a: &LagrangeArgs) -> Result<Vec<ExperimentRecord>, Failure> {
    let row = LagrangeRow {
        basis: parse(&a.basis)?,
        workers: a.workers,
        m: a.m,
        dim: a.dim,
        degf: a.degf,
        samples: (a.mode == Mode::Sampled).then_some(a.samples),
        seeds: a.seeds,
        seed: seed_override(a.seed)?,
    };
    Ok(lagrange_records(&row)?)
}

fn bound(a: &BoundArgs) -> Result<Vec<ExperimentRecord>, Failure> {
    let seed = seed_override(a.seed)?;
    if a.gauss {
        let (m, p) = (a.m.unwrap_or_default(), a.workers.unwrap_or_default());
        Ok(gauss_records(m, p, a.trials, seed)?)
    } else {
        Ok(bound_records(
            a.n.unwrap_or_default(),
            a.s.unwrap_or_default(),
            a.samples,
            seed,
        )?)
    }
}

fn read_plan(path: &std::path::Path) -> Result<Vec<PlanRow>, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| io_failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure {
        kind: "invalid_plan",
        message: e.to_string(),
    })
}

fn emit(cli: &Cli, records: &[ExperimentRecord]) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(File::create(p).map_err(|e| io_failure(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    match cli.format {
        Format::Csv => write_csv(records, &mut sink)?,
        Format::Json => write_json(records, &mut sink)?,
    }
    sink.flush().map_err(io_failure)?;
    if !cli.quiet {
        if let Some(p) = &cli.out {
            eprintln!("wrote {} records to {}", records.len(), p.display());
        }
    }
    Ok(())
}

fn selftest(quiet: bool) -> ExitCode {
    let outcomes = ccc_core::selftest::run_all();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    for o in &outcomes {
        if !quiet || !o.passed {
            println!("{} {} {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        }
    }
    if failed > 0 {
        eprintln!(
            "error=selftest message=\"{failed} of {} checks failed\"",
            outcomes.len()
        );
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: &Cli) -> Result<Vec<ExperimentRecord>, Failure> {
    match &cli.command {
        Command::Cond(a) => cond(a),
        Command::Mm(a) => mm(a),
        Command::Table1(a) => {
            if !cli.quiet {
                eprintln!("running 8 experiments; the P = 150 rows take a while");
            }
            Ok(sweep(&table1_plan(seed_override(a.seed)?, a.dims)))
        }
        Command::Sweep(a) => Ok(sweep(&read_plan(&a.plan)?)),
        Command::Lagrange(a) => lagrange(a),
        Command::Bound(a) => bound(a),
        Command::Selftest => unreachable!("handled before dispatch"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("error=threads message=\"{e}\"");
            return ExitCode::from(1);
        }
    }
    if matches!(cli.command, Command::Selftest) {
        return selftest(cli.quiet);
    }
    match run(&cli).and_then(|recs| emit(&cli, &recs)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error={} message={:?}", f.kind, f.message);
            ExitCode::from(if f.kind == "usage" { 2 } else { 1 })
        }
    }
}
