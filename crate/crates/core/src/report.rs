//! End-to-end runs behind the CLI subcommands and their JSON reports.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Serialize, Serializer};
use serde_json::{Map, Value};

use crate::builders::{Bandwidth, PRule};
use crate::conditions::{
    applicable_theorems, bounded_entries_matrix, diagnose_with, matching_theorem, scenario_bounded_entries,
    ConditionReport, Ratio, ScenarioReports, DEFAULT_R_VALUES,
};
use crate::engine::{
    enumerate_exact, p_value, sample_null, serialize_opt, standard_normal_cdf, EnumerationCap, NullDistribution,
    Sidedness,
};
use crate::error::{Error, Result};
use crate::io::{read_labels, read_matrix, read_sample};
use crate::matrix::{gamma, CoefficientMatrix, Permutation};
use crate::moments::{moment_report, normalizer, MomentReport, NormalizerKind, Standardizer};
use crate::oracle::{oracle_check, OracleOutcome};
use crate::statistic::{build_pair, BuildOptions, Inputs, Statistic};
use crate::sweep::{convergence_sweep, SweepRow, SweepSpec};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
/// Significant digits of every floating-point value in a rendered report.
pub const REPORT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Test,
    Diagnose,
    Sweep,
    OracleCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Text,
}

fn display<T: std::fmt::Display, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Resolved configuration of one run. Output destination and worker count
/// are not echoed into reports; neither changes the results.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub statistic: Statistic,
    pub points: Option<PathBuf>,
    pub points_b: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub matrix_a: Option<PathBuf>,
    pub matrix_b: Option<PathBuf>,
    pub normalizer: NormalizerKind,
    pub draws: u64,
    pub seed: u64,
    pub exact: bool,
    #[serde(serialize_with = "serialize_cap")]
    pub exact_cap: EnumerationCap,
    #[serde(serialize_with = "display")]
    pub p_rule: PRule,
    #[serde(serialize_with = "display")]
    pub bandwidth: Bandwidth,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: OutputFormat,
    #[serde(skip)]
    pub workers: Option<usize>,
    pub strict: bool,
    // sweep
    pub n_values: Vec<usize>,
    pub data_seed: u64,
    // oracle-check
    pub oracle_n: usize,
    pub oracle_pairs: usize,
    pub r_values: Vec<u32>,
}

fn serialize_cap<S: Serializer>(c: &EnumerationCap, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(c.get() as u64)
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Test,
            statistic: Statistic::RawMatrices,
            points: None,
            points_b: None,
            labels: None,
            matrix_a: None,
            matrix_b: None,
            normalizer: NormalizerKind::ExactSd,
            draws: 9999,
            seed: 0,
            exact: false,
            exact_cap: EnumerationCap::default(),
            p_rule: PRule::MOverN,
            bandwidth: Bandwidth::Median,
            out: None,
            format: OutputFormat::Json,
            workers: None,
            strict: false,
            n_values: vec![20, 50, 100],
            data_seed: 1,
            oracle_n: 5,
            oracle_pairs: 20,
            r_values: DEFAULT_R_VALUES.to_vec(),
        }
    }
}

impl RunConfig {
    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            bandwidth: self.bandwidth,
            p_rule: self.p_rule,
        }
    }

    /// Reads whatever input files are configured.
    pub fn load_inputs(&self) -> Result<Inputs> {
        Ok(Inputs {
            points: self.points.as_deref().map(read_sample).transpose()?,
            points_b: self.points_b.as_deref().map(read_sample).transpose()?,
            labels: self.labels.as_deref().map(read_labels).transpose()?,
            matrix_a: self.matrix_a.as_deref().map(read_matrix).transpose()?,
            matrix_b: self.matrix_b.as_deref().map(read_matrix).transpose()?,
        })
    }

    pub fn load_pair(&self) -> Result<(CoefficientMatrix, CoefficientMatrix)> {
        build_pair(self.statistic, &self.load_inputs()?, &self.build_options())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PValues {
    #[serde(serialize_with = "serialize_opt")]
    pub greater: Option<f64>,
    #[serde(serialize_with = "serialize_opt")]
    pub less: Option<f64>,
    #[serde(serialize_with = "serialize_opt")]
    pub two_sided: Option<f64>,
}

impl PValues {
    const UNDEFINED: PValues = PValues {
        greater: None,
        less: None,
        two_sided: None,
    };

    fn normal(z: Option<f64>) -> PValues {
        match z {
            Some(z) => {
                let less = standard_normal_cdf(z);
                let greater = standard_normal_cdf(-z);
                PValues {
                    greater: Some(greater),
                    less: Some(less),
                    two_sided: Some((2.0 * greater.min(less)).min(1.0)),
                }
            }
            None => PValues::UNDEFINED,
        }
    }

    fn permutation(dist: &NullDistribution, g: f64) -> PValues {
        PValues {
            greater: Some(p_value(dist, g, Sidedness::Greater)),
            less: Some(p_value(dist, g, Sidedness::Less)),
            two_sided: Some(p_value(dist, g, Sidedness::TwoSided)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PValueReport {
    pub normalizer: NormalizerKind,
    /// Normal approximation under the configured normalizer.
    pub normal_approximation: PValues,
    /// Normal approximation under the exact standard deviation.
    pub normal_approximation_exact_sd: PValues,
    pub permutation_method: &'static str,
    pub permutation: PValues,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub config: RunConfig,
    pub n: usize,
    pub gamma_observed: f64,
    pub moments: MomentReport,
    pub standardized: BTreeMap<&'static str, Ratio>,
    pub p_values: PValueReport,
    pub null_distribution: NullDistribution,
    pub conditions: ConditionReport,
    pub wall_clock_seconds: f64,
}

impl TestReport {
    pub fn degenerate(&self) -> bool {
        self.moments.degenerate
    }
}

/// Γ at the identity labeling, exact moments, standardized values, and
/// normal and permutation p-values.
pub fn run_test(config: &RunConfig) -> Result<(TestReport, NullDistribution)> {
    let started = Instant::now();
    let (a, b) = config.load_pair()?;
    test_pair(config, &a, &b, started)
}

pub fn test_pair(
    config: &RunConfig,
    a: &CoefficientMatrix,
    b: &CoefficientMatrix,
    started: Instant,
) -> Result<(TestReport, NullDistribution)> {
    let n = a.n();
    let g = gamma(a, b, &Permutation::identity(n))?;
    let moments = moment_report(a, b)?;
    let z = |kind| Standardizer::new(a, b, kind).ok().map(|s| s.apply(g));
    let standardized: BTreeMap<&'static str, Ratio> = NormalizerKind::ALL
        .iter()
        .map(|&k| (k.as_str(), z(k).map_or(Ratio::Undefined, Ratio::Value)))
        .collect();

    let (dist, method) = if config.exact {
        (enumerate_exact(a, b, config.exact_cap)?, "exact")
    } else {
        (sample_null(a, b, config.draws, config.seed, config.workers)?, "monte_carlo")
    };
    let p_values = PValueReport {
        normalizer: config.normalizer,
        normal_approximation: PValues::normal(z(config.normalizer)),
        normal_approximation_exact_sd: PValues::normal(z(NormalizerKind::ExactSd)),
        permutation_method: method,
        permutation: PValues::permutation(&dist, g),
    };
    let conditions = diagnose_with(a, b, matching_theorem(a, b), &config.r_values)?;
    let report = TestReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        config: config.clone(),
        n,
        gamma_observed: g,
        moments,
        standardized,
        p_values,
        null_distribution: dist.clone(),
        conditions,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    Ok((report, dist))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnoseReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub config: RunConfig,
    pub n: usize,
    pub symmetry_a: &'static str,
    pub symmetry_b: &'static str,
    pub normalizers: BTreeMap<&'static str, f64>,
    pub theorems: Vec<ConditionReport>,
    /// Present when `a` is the all-ones-off-diagonal matrix.
    pub bounded_entries_scenario: Option<ScenarioReports>,
}

/// Condition reports for every theorem the pair's symmetry class admits.
pub fn run_diagnose(config: &RunConfig) -> Result<DiagnoseReport> {
    let (a, b) = config.load_pair()?;
    diagnose_pair(config, &a, &b)
}

pub fn diagnose_pair(config: &RunConfig, a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<DiagnoseReport> {
    let theorems = applicable_theorems(a, b)
        .into_iter()
        .map(|t| diagnose_with(a, b, t, &config.r_values))
        .collect::<Result<Vec<_>>>()?;
    let normalizers = NormalizerKind::ALL
        .iter()
        .map(|&k| Ok((k.as_str(), normalizer(a, b, k)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let bounded = a.n() >= 3 && *a == bounded_entries_matrix(a.n())?;
    Ok(DiagnoseReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        config: config.clone(),
        n: a.n(),
        symmetry_a: a.symmetry_class().as_str(),
        symmetry_b: b.symmetry_class().as_str(),
        normalizers,
        theorems,
        bounded_entries_scenario: if bounded {
            Some(scenario_bounded_entries(a.n())?)
        } else {
            None
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub config: RunConfig,
    pub rows: Vec<SweepRow>,
}

pub fn run_sweep(config: &RunConfig) -> Result<SweepReport> {
    let rows = convergence_sweep(&SweepSpec {
        statistic: config.statistic,
        n_values: config.n_values.clone(),
        draws: config.draws,
        seed: config.seed,
        data_seed: config.data_seed,
        options: config.build_options(),
        workers: config.workers,
    })?;
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        config: config.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub config: RunConfig,
    pub outcome: OracleOutcome,
}

/// Runs the enumeration comparison on random pairs plus the configured
/// inputs, when any are given.
pub fn run_oracle_check(config: &RunConfig) -> Result<OracleReport> {
    let has_inputs = config.points.is_some() || config.matrix_a.is_some() || config.labels.is_some();
    let pair = if has_inputs { Some(config.load_pair()?) } else { None };
    let n = pair.as_ref().map_or(config.oracle_n, |(a, _)| a.n());
    let outcome = oracle_check(
        n,
        config.oracle_pairs,
        config.seed,
        config.exact_cap,
        pair.as_ref().map(|(a, b)| (a, b)),
    )?;
    Ok(OracleReport {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        config: config.clone(),
        outcome,
    })
}

/// Rounds `x` to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(x) = num.as_f64() {
                if let Some(r) = serde_json::Number::from_f64(round_sig(x, REPORT_DIGITS)) {
                    *num = r;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serializes a report with every float rounded to 12 significant digits.
pub fn to_json_value<T: Serialize>(report: &T) -> Result<Value> {
    let mut v = serde_json::to_value(report).map_err(|e| Error::invalid(format!("serialize: {e}")))?;
    round_value(&mut v);
    Ok(v)
}

pub fn render_json<T: Serialize>(report: &T) -> Result<String> {
    let v = to_json_value(report)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::invalid(format!("serialize: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn render_text_into(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => render_map(map, prefix, out),
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                render_text_into(item, &format!("{prefix}[{i}]"), out);
            }
            if items.is_empty() {
                out.push_str(&format!("{prefix}: []\n"));
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn render_map(map: &Map<String, Value>, prefix: &str, out: &mut String) {
    for (k, v) in map {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        render_text_into(v, &key, out);
    }
}

/// Flat `path.to.field: value` rendering of the JSON structure.
pub fn render_text<T: Serialize>(report: &T) -> Result<String> {
    let v = to_json_value(report)?;
    let mut out = String::new();
    render_text_into(&v, "", &mut out);
    Ok(out)
}

pub fn render<T: Serialize>(report: &T, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Json => render_json(report),
        OutputFormat::Text => render_text(report),
    }
}
