//! Pham's prime/star transforms and finite-N snapshots of the condition
//! sets for the Daniels, Pham and symmetric-setting theorems.
//!
//! Structural conditions (symmetry, hollow diagonal, zero sums) are exact
//! checks. Asymptotic ones (`≍`, `o(1)`, `O(·)`, `limsup`) are reported as
//! the finite-N ratio they constrain; whether a ratio "is small" or "stays
//! bounded" can only be judged across a range of N.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{elementary_sums, CoefficientMatrix, SymmetryClass};

/// Default sample of exponents for the "for all integers r" conditions.
pub const DEFAULT_R_VALUES: [u32; 4] = [3, 4, 5, 6];

const ADVISORY: &str = "ratios are finite-N snapshots of asymptotic conditions (≍, o(1), O(·), limsup); \
judge them by their trend over increasing N, not by a single value";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    Daniels,
    Pham1,
    Pham2,
    Pham3,
    Main,
}

impl TheoremId {
    pub const ALL: [TheoremId; 5] = [
        TheoremId::Daniels,
        TheoremId::Pham1,
        TheoremId::Pham2,
        TheoremId::Pham3,
        TheoremId::Main,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Daniels => "daniels",
            TheoremId::Pham1 => "pham1",
            TheoremId::Pham2 => "pham2",
            TheoremId::Pham3 => "pham3",
            TheoremId::Main => "main",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown theorem '{s}'")))
    }
}

/// A ratio that is undefined when its denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ratio {
    Value(f64),
    Undefined,
}

impl Ratio {
    pub fn of(num: f64, den: f64) -> Ratio {
        if den == 0.0 {
            return Ratio::Undefined;
        }
        Ratio::from_value(num / den)
    }

    fn from_value(v: f64) -> Ratio {
        if v.is_finite() {
            Ratio::Value(v)
        } else {
            Ratio::Undefined
        }
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Ratio::Value(v) => Some(v),
            Ratio::Undefined => None,
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ratio::Value(v) => s.serialize_f64(*v),
            Ratio::Undefined => s.serialize_str("undefined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub theorem: TheoremId,
    pub structural_checks: BTreeMap<String, bool>,
    pub ratio_diagnostics: BTreeMap<String, Ratio>,
    pub advisory: String,
}

impl ConditionReport {
    pub fn check(&self, name: &str) -> Option<bool> {
        self.structural_checks.get(name).copied()
    }

    pub fn ratio(&self, name: &str) -> Option<Ratio> {
        self.ratio_diagnostics.get(name).copied()
    }
}

/// Which branch of the star transform to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    Symmetric,
    Antisymmetric,
}

/// `a′_ij = (a_ij − Σ_{k≠l} a_kl / (N(N−1))) · I(i ≠ j)`.
pub fn prime_transform(a: &CoefficientMatrix) -> CoefficientMatrix {
    let n = a.n();
    let mean = elementary_sums(a).sum_offdiag / (n * (n - 1)) as f64;
    let class = a.symmetry_class();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            data[i * n + j] = match class {
                // mirror so the result is exactly (anti)symmetric
                SymmetryClass::Symmetric if j < i => data[j * n + i],
                SymmetryClass::Antisymmetric if j < i => -data[j * n + i],
                _ => a.get(i, j) - mean,
            };
        }
    }
    CoefficientMatrix::from_row_major(n, data, class, true).expect("prime transform preserves structure")
}

fn row_col_sums(a: &CoefficientMatrix) -> (Vec<f64>, Vec<f64>) {
    let e = elementary_sums(a);
    (e.row_sums, e.col_sums)
}

/// Pham's star transform.
///
/// Symmetric setting: `a*_ij = (a′_ij − (a′_{i+} + a′_{+j}) / (N−2)) · I(i ≠ j)`.
/// Antisymmetric setting: `a*_ij = (a_ij − (a′_{i+} + a′_{+j}) / N) · I(i ≠ j)`,
/// which starts from the raw `a_ij`.
pub fn star_transform(a: &CoefficientMatrix, setting: Setting) -> Result<CoefficientMatrix> {
    let n = a.n();
    if setting == Setting::Symmetric && n < 3 {
        return Err(Error::invalid("symmetric star transform needs N >= 3"));
    }
    let prime = prime_transform(a);
    let (rows, cols) = row_col_sums(&prime);
    let (base, divisor) = match setting {
        Setting::Symmetric => (&prime, (n - 2) as f64),
        Setting::Antisymmetric => (a, n as f64),
    };
    let class = match (setting, a.symmetry_class()) {
        (Setting::Symmetric, SymmetryClass::Symmetric) => SymmetryClass::Symmetric,
        (Setting::Antisymmetric, SymmetryClass::Antisymmetric) => SymmetryClass::Antisymmetric,
        _ => SymmetryClass::General,
    };
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            data[i * n + j] = match class {
                SymmetryClass::Symmetric if j < i => data[j * n + i],
                SymmetryClass::Antisymmetric if j < i => -data[j * n + i],
                _ => base.get(i, j) - (rows[i] + cols[j]) / divisor,
            };
        }
    }
    CoefficientMatrix::from_row_major(n, data, class, true)
}

fn check_sizes(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// Zero to rounding: within `1e-12 · Σ|entries|`.
fn near_zero(value: f64, scale: f64) -> bool {
    value.abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE)
}

fn abs_total(a: &CoefficientMatrix) -> f64 {
    a.as_slice().iter().map(|x| x.abs()).sum()
}

fn zero_total_sum(a: &CoefficientMatrix) -> bool {
    a.max_abs() == 0.0 || near_zero(a.total_sum(), abs_total(a))
}

fn zero_row_sums(a: &CoefficientMatrix) -> (bool, bool) {
    let e = elementary_sums(a);
    let scale = abs_total(a);
    (
        e.row_sums.iter().all(|&r| near_zero(r, scale)),
        e.col_sums.iter().all(|&c| near_zero(c, scale)),
    )
}

fn sum_sq(a: &CoefficientMatrix) -> f64 {
    a.as_slice().iter().map(|x| x * x).sum()
}

fn max_abs_row_sum(a: &CoefficientMatrix) -> f64 {
    (0..a.n())
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `Σ_{i,j,k} a_ij a_ik / (N³ max|a_ij|²)`.
pub fn h_ratio(a: &CoefficientMatrix) -> Ratio {
    let e = elementary_sums(a);
    let n = a.n() as f64;
    Ratio::of(e.triple_sum, n.powi(3) * e.max_abs * e.max_abs)
}

fn setting_of(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Option<Setting> {
    match (a.symmetry_class(), b.symmetry_class()) {
        (SymmetryClass::Symmetric, SymmetryClass::Symmetric) => Some(Setting::Symmetric),
        (SymmetryClass::Antisymmetric, SymmetryClass::Antisymmetric) => Some(Setting::Antisymmetric),
        _ => None,
    }
}

struct Builder {
    checks: BTreeMap<String, bool>,
    ratios: BTreeMap<String, Ratio>,
}

impl Builder {
    fn new() -> Self {
        Builder {
            checks: BTreeMap::new(),
            ratios: BTreeMap::new(),
        }
    }

    fn check(&mut self, name: &str, v: bool) -> &mut Self {
        self.checks.insert(name.to_string(), v);
        self
    }

    fn ratio(&mut self, name: impl Into<String>, v: Ratio) -> &mut Self {
        self.ratios.insert(name.into(), v);
        self
    }

    fn finish(self, theorem: TheoremId) -> ConditionReport {
        ConditionReport {
            theorem,
            structural_checks: self.checks,
            ratio_diagnostics: self.ratios,
            advisory: ADVISORY.to_string(),
        }
    }
}

fn symmetric(a: &CoefficientMatrix) -> bool {
    a.symmetry_class() == SymmetryClass::Symmetric
}

fn antisymmetric(a: &CoefficientMatrix) -> bool {
    a.symmetry_class() == SymmetryClass::Antisymmetric
}

/// Condition report for one theorem with the default `r` sample.
pub fn diagnose(a: &CoefficientMatrix, b: &CoefficientMatrix, theorem: TheoremId) -> Result<ConditionReport> {
    diagnose_with(a, b, theorem, &DEFAULT_R_VALUES)
}

pub fn diagnose_with(
    a: &CoefficientMatrix,
    b: &CoefficientMatrix,
    theorem: TheoremId,
    r_values: &[u32],
) -> Result<ConditionReport> {
    check_sizes(a, b)?;
    let n = a.n() as f64;
    let mut rb = Builder::new();
    match theorem {
        TheoremId::Daniels => {
            rb.check("a_antisymmetric", antisymmetric(a))
                .check("b_antisymmetric", antisymmetric(b))
                .check("a_hollow", a.has_zero_diagonal())
                .check("b_hollow", b.has_zero_diagonal())
                .ratio("h_a", h_ratio(a))
                .ratio("h_b", h_ratio(b));
        }
        TheoremId::Main => {
            rb.check("a_symmetric", symmetric(a))
                .check("b_symmetric", symmetric(b))
                .check("a_zero_sum", zero_total_sum(a))
                .check("b_zero_sum", zero_total_sum(b))
                .ratio("h_a", h_ratio(a))
                .ratio("h_b", h_ratio(b));
        }
        TheoremId::Pham1 => {
            let setting = setting_of(a, b);
            rb.check("symmetric_setting", setting == Some(Setting::Symmetric))
                .check("antisymmetric_setting", setting == Some(Setting::Antisymmetric))
                .check("a_hollow", a.has_zero_diagonal())
                .check("b_hollow", b.has_zero_diagonal());
            let (ra, _) = row_col_sums(&prime_transform(a));
            let (rbs, _) = row_col_sums(&prime_transform(b));
            let sa2: f64 = ra.iter().map(|x| x * x).sum();
            let sb2: f64 = rbs.iter().map(|x| x * x).sum();
            let star_ratio = match setting {
                Some(s) if !(s == Setting::Symmetric && a.n() < 3) => {
                    let qa = sum_sq(&star_transform(a, s)?);
                    let qb = sum_sq(&star_transform(b, s)?);
                    Ratio::of(n * qa * qb, sa2 * sb2)
                }
                _ => Ratio::Undefined,
            };
            rb.ratio("star_ratio", star_ratio);
            for &r in r_values {
                let num: f64 = ra.iter().map(|x| x.powi(r as i32)).sum();
                let moment = Ratio::of(num, sa2.powf(r as f64 / 2.0));
                rb.ratio(format!("a_rowsum_moment_r{r}"), moment);
                // O(N^{1−r/2}) holds iff this stays bounded
                let scaled = match moment {
                    Ratio::Value(v) => Ratio::from_value(v * n.powf(r as f64 / 2.0 - 1.0)),
                    Ratio::Undefined => Ratio::Undefined,
                };
                rb.ratio(format!("a_rowsum_moment_r{r}_scaled"), scaled);
                let num_b: f64 = rbs.iter().map(|x| x.abs().powi(r as i32)).sum();
                rb.ratio(format!("b_rowsum_abs_moment_r{r}"), Ratio::of(num_b, sb2.powf(r as f64 / 2.0)));
            }
            let max_b = rbs.iter().map(|x| x * x).fold(0.0, f64::max);
            rb.ratio("b_rowsum_max_share", Ratio::of(max_b, sb2));
        }
        TheoremId::Pham2 => {
            let setting = setting_of(a, b);
            let (rows_zero, cols_zero) = zero_row_sums(b);
            rb.check("symmetric_setting", setting == Some(Setting::Symmetric))
                .check("antisymmetric_setting", setting == Some(Setting::Antisymmetric))
                .check("a_hollow", a.has_zero_diagonal())
                .check("b_hollow", b.has_zero_diagonal())
                .check("b_zero_row_sums", rows_zero)
                .check("b_zero_col_sums", cols_zero);
            let (qa, qb) = (sum_sq(a), sum_sq(b));
            let amax = a.max_abs();
            rb.ratio("a_max_abs_rowsum_scaled", Ratio::of(max_abs_row_sum(a) * n * amax, qa))
                .ratio("a_sq_over_n2_max_sq", Ratio::of(qa, n * n * amax * amax));
            let mean_sq = qb / (n * n);
            for &r in r_values {
                let num: f64 = b.as_slice().iter().map(|x| x.abs().powi(r as i32)).sum::<f64>() / (n * n);
                rb.ratio(format!("b_abs_moment_r{r}"), Ratio::of(num, mean_sq.powf(r as f64 / 2.0)));
            }
        }
        TheoremId::Pham3 => {
            let setting = setting_of(a, b);
            rb.check("symmetric_setting", setting == Some(Setting::Symmetric))
                .check("antisymmetric_setting", setting == Some(Setting::Antisymmetric))
                .check("a_hollow", a.has_zero_diagonal())
                .check("b_hollow", b.has_zero_diagonal())
                .check("a_zero_sum", zero_total_sum(a))
                .check("b_zero_sum", zero_total_sum(b));
            let amax = a.max_abs();
            let eb = elementary_sums(b);
            let row_sq: f64 = eb.row_sums.iter().map(|x| x * x).sum();
            rb.ratio("a_max_abs_rowsum_over_max", Ratio::of(max_abs_row_sum(a), amax))
                .ratio("a_sq_over_n_max_sq", Ratio::of(sum_sq(a), n * amax * amax))
                .ratio("b_rowsum_sq_share", Ratio::of(row_sq / n, sum_sq(b)));
        }
    }
    Ok(rb.finish(theorem))
}

/// Theorems whose symmetry prerequisite the pair can satisfy.
pub fn applicable_theorems(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Vec<TheoremId> {
    match setting_of(a, b) {
        Some(Setting::Symmetric) => vec![TheoremId::Pham1, TheoremId::Pham2, TheoremId::Pham3, TheoremId::Main],
        Some(Setting::Antisymmetric) => {
            vec![TheoremId::Daniels, TheoremId::Pham1, TheoremId::Pham2, TheoremId::Pham3]
        }
        None => vec![],
    }
}

/// The theorem a statistic's symmetry class points to.
pub fn matching_theorem(a: &CoefficientMatrix, b: &CoefficientMatrix) -> TheoremId {
    match setting_of(a, b) {
        Some(Setting::Symmetric) => TheoremId::Main,
        Some(Setting::Antisymmetric) => TheoremId::Daniels,
        None => TheoremId::Pham1,
    }
}

/// The all-ones-off-diagonal matrix `a_ij = 1 − δ_ij`.
pub fn bounded_entries_matrix(n: usize) -> Result<CoefficientMatrix> {
    CoefficientMatrix::from_fn(n, SymmetryClass::Symmetric, true, |i, j| (i != j) as u8 as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReports {
    pub pham2: ConditionReport,
    pub pham3: ConditionReport,
    pub main: ConditionReport,
}

/// Bounded dense entries: Pham's second and third condition sets fail
/// (`Σa²/(N² max a²) → 1`, `max row sum / max entry = N − 1`) while the
/// symmetric-setting ratio `h_a → 1` stays bounded away from zero.
pub fn scenario_bounded_entries(n: usize) -> Result<ScenarioReports> {
    if n < 3 {
        return Err(Error::invalid("scenario needs n >= 3"));
    }
    let a = bounded_entries_matrix(n)?;
    Ok(ScenarioReports {
        pham2: diagnose(&a, &a, TheoremId::Pham2)?,
        pham3: diagnose(&a, &a, TheoremId::Pham3)?,
        main: diagnose(&a, &a, TheoremId::Main)?,
    })
}
