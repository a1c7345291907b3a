//! `permcorr`: permutation tests, condition diagnostics, convergence sweeps
//! and the moment oracle check from the command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 I/O or input
//! parse error, 3 numerical failure (degenerate statistic under `--strict`,
//! or an oracle check above tolerance).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use permcorr::builders::{Bandwidth, PRule};
use permcorr::engine::EnumerationCap;
use permcorr::report::{
    render, run_diagnose, run_oracle_check, run_sweep, run_test, Command, OutputFormat, RunConfig,
};
use permcorr::statistic::Statistic;
use permcorr::{Error, NormalizerKind};

#[derive(Parser, Debug)]
#[command(name = "permcorr", version, about = "Permutation inference for generalized correlation coefficients")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Observed statistic, exact moments, normal and permutation p-values.
    Test(Shared),
    /// Finite-N condition ratios for every applicable theorem.
    Diagnose(Shared),
    /// KS distance, skewness and normalizer ratios over a range of N.
    Sweep(Shared),
    /// Closed-form moments against full enumeration.
    OracleCheck(Shared),
}

#[derive(Args, Debug, Default)]
struct Shared {
    /// Points CSV, one point per row.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Second points CSV (mantel_centered).
    #[arg(long)]
    points_b: Option<PathBuf>,
    /// Labels CSV, one 0/1 per row.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    matrix_a: Option<PathBuf>,
    #[arg(long)]
    matrix_b: Option<PathBuf>,
    /// wilcoxon, edge_count, mmd, weighted_edge_count, pearson, spearman,
    /// mantel_centered, raw_matrices, complete
    #[arg(long)]
    statistic: Option<String>,
    /// exact_sd, daniels, pham2, pham3
    #[arg(long)]
    normalizer: Option<String>,
    #[arg(long)]
    draws: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Enumerate all N! permutations instead of sampling.
    #[arg(long)]
    exact: bool,
    /// Largest N allowed for enumeration (default 8, at most 9).
    #[arg(long)]
    exact_cap: Option<usize>,
    /// m_over_N, m1_over_N2, or an explicit p in [0, 1]
    #[arg(long)]
    p_rule: Option<String>,
    /// Positive number or 'median'.
    #[arg(long)]
    bandwidth: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or text
    #[arg(long)]
    format: Option<String>,
    /// Key-value (TOML) file with defaults for any of these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads for Monte Carlo sampling.
    #[arg(long)]
    threads: Option<usize>,
    /// Exit with code 3 when the statistic is degenerate.
    #[arg(long)]
    strict: bool,
    /// Also write the raw null values as CSV.
    #[arg(long)]
    raw_values: Option<PathBuf>,
    /// Comma-separated N values (sweep).
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<usize>>,
    /// Seed of the synthetic data rule (sweep).
    #[arg(long)]
    data_seed: Option<u64>,
    /// Matrix order for random oracle pairs (oracle-check).
    #[arg(long)]
    n: Option<usize>,
    /// Number of random oracle pairs (oracle-check).
    #[arg(long)]
    pairs: Option<usize>,
    /// Exponents sampled for the "for all r" conditions.
    #[arg(long, value_delimiter = ',')]
    r_values: Option<Vec<u32>>,
}

/// Config-file keys; flags win over these.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    points: Option<PathBuf>,
    points_b: Option<PathBuf>,
    labels: Option<PathBuf>,
    matrix_a: Option<PathBuf>,
    matrix_b: Option<PathBuf>,
    statistic: Option<String>,
    normalizer: Option<String>,
    draws: Option<u64>,
    seed: Option<u64>,
    exact: Option<bool>,
    exact_cap: Option<usize>,
    p_rule: Option<String>,
    bandwidth: Option<String>,
    out: Option<PathBuf>,
    format: Option<String>,
    threads: Option<usize>,
    strict: Option<bool>,
    n_values: Option<Vec<usize>>,
    data_seed: Option<u64>,
    n: Option<usize>,
    pairs: Option<usize>,
    r_values: Option<Vec<u32>>,
}

enum Failure {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Parse { .. } => Failure::Io(e.to_string()),
            Error::Degenerate(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read_file_config(path: &Path) -> Result<FileConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn resolve(command: Command, flags: Shared) -> Result<(RunConfig, Option<PathBuf>), Failure> {
    let file = match &flags.config {
        Some(p) => read_file_config(p)?,
        None => FileConfig::default(),
    };
    let d = RunConfig::default();
    let parse = |flag: Option<String>, file: Option<String>| flag.or(file);

    let statistic = match parse(flags.statistic, file.statistic) {
        Some(s) => s.parse::<Statistic>()?,
        None if flags.matrix_a.is_some() || file.matrix_a.is_some() => Statistic::RawMatrices,
        None => return Err(Failure::Usage("--statistic is required".into())),
    };
    let normalizer = parse(flags.normalizer, file.normalizer)
        .map(|s| s.parse::<NormalizerKind>())
        .transpose()?
        .unwrap_or(d.normalizer);
    let exact_cap = flags
        .exact_cap
        .or(file.exact_cap)
        .map(EnumerationCap::new)
        .transpose()?
        .unwrap_or(d.exact_cap);
    let p_rule = parse(flags.p_rule, file.p_rule)
        .map(|s| s.parse::<PRule>())
        .transpose()?
        .unwrap_or(d.p_rule);
    let bandwidth = parse(flags.bandwidth, file.bandwidth)
        .map(|s| s.parse::<Bandwidth>())
        .transpose()?
        .unwrap_or(d.bandwidth);
    let format = match parse(flags.format, file.format).as_deref() {
        None | Some("json") => OutputFormat::Json,
        Some("text") => OutputFormat::Text,
        Some(other) => return Err(Failure::Usage(format!("unknown format '{other}'"))),
    };
    let draws = flags.draws.or(file.draws).unwrap_or(d.draws);
    if draws == 0 {
        return Err(Failure::Usage("--draws must be at least 1".into()));
    }
    let config = RunConfig {
        command,
        statistic,
        points: flags.points.or(file.points),
        points_b: flags.points_b.or(file.points_b),
        labels: flags.labels.or(file.labels),
        matrix_a: flags.matrix_a.or(file.matrix_a),
        matrix_b: flags.matrix_b.or(file.matrix_b),
        normalizer,
        draws,
        seed: flags.seed.or(file.seed).unwrap_or(d.seed),
        exact: flags.exact || file.exact.unwrap_or(false),
        exact_cap,
        p_rule,
        bandwidth,
        out: flags.out.or(file.out),
        format,
        workers: flags.threads.or(file.threads),
        strict: flags.strict || file.strict.unwrap_or(false),
        n_values: flags.n_values.or(file.n_values).unwrap_or(d.n_values),
        data_seed: flags.data_seed.or(file.data_seed).unwrap_or(d.data_seed),
        oracle_n: flags.n.or(file.n).unwrap_or(d.oracle_n),
        oracle_pairs: flags.pairs.or(file.pairs).unwrap_or(d.oracle_pairs),
        r_values: flags.r_values.or(file.r_values).unwrap_or(d.r_values),
    };
    Ok((config, flags.raw_values))
}

fn emit(config: &RunConfig, text: &str) -> Result<(), Failure> {
    match &config.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (command, flags) = match cli.command {
        Sub::Test(f) => (Command::Test, f),
        Sub::Diagnose(f) => (Command::Diagnose, f),
        Sub::Sweep(f) => (Command::Sweep, f),
        Sub::OracleCheck(f) => (Command::OracleCheck, f),
    };
    // oracle-check without inputs only needs random pairs
    let flags = if command == Command::OracleCheck && flags.statistic.is_none() && flags.config.is_none() {
        Shared {
            statistic: Some(Statistic::RawMatrices.as_str().into()),
            ..flags
        }
    } else {
        flags
    };
    let (config, raw_values) = resolve(command, flags)?;
    match command {
        Command::Test => {
            let (report, dist) = run_test(&config)?;
            emit(&config, &render(&report, config.format)?)?;
            if let Some(path) = raw_values {
                fs::write(&path, dist.values_csv()).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            }
            if config.strict && report.degenerate() {
                return Err(Failure::Numerical("degenerate permutation variance".into()));
            }
        }
        Command::Diagnose => {
            let report = run_diagnose(&config)?;
            emit(&config, &render(&report, config.format)?)?;
        }
        Command::Sweep => {
            let report = run_sweep(&config)?;
            emit(&config, &render(&report, config.format)?)?;
            if config.strict && report.rows.iter().any(|r| r.degenerate) {
                return Err(Failure::Numerical("degenerate rows in sweep".into()));
            }
        }
        Command::OracleCheck => {
            let report = run_oracle_check(&config)?;
            emit(&config, &render(&report, config.format)?)?;
            if !report.outcome.passed {
                return Err(Failure::Numerical(format!(
                    "oracle check failed: max relative error {:e} / {:e} above {:e}",
                    report.outcome.max_relative_error_mean,
                    report.outcome.max_relative_error_second_moment,
                    report.outcome.tolerance
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
