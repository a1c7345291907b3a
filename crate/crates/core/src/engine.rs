//! The permutation null of Γ: exact enumeration, a seeded Monte Carlo
//! sampler, and distances to the normal limit.
//!
//! Draw `t` of [`sample_null`] uses its own ChaCha8 stream: the generator
//! is keyed with `ChaCha8Rng::seed_from_u64(seed)` (rand_core's PCG32 seed
//! expansion) and then switched to stream `t` with `set_stream(t)`. The
//! permutation is a Fisher–Yates shuffle of the identity, walking `i` from
//! `N−1` down to 1 and swapping with `random_range(0..=i)`. Draw `t` is
//! therefore a function of `(seed, t)` only, whatever the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::matrix::{gamma_unchecked, CoefficientMatrix};
use crate::moments::{NormalizerKind, Standardizer};

pub const DEFAULT_ENUMERATION_CAP: usize = 8;
pub const MAX_ENUMERATION_CAP: usize = 9;

/// Largest N for which all N! permutations are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap(usize);

impl EnumerationCap {
    pub fn new(cap: usize) -> Result<Self> {
        if cap == 0 || cap > MAX_ENUMERATION_CAP {
            return Err(Error::invalid(format!(
                "enumeration cap must be in 1..={MAX_ENUMERATION_CAP}, got {cap}"
            )));
        }
        Ok(EnumerationCap(cap))
    }

    pub fn get(self) -> usize {
        self.0
    }

    pub fn check(self, n: usize) -> Result<()> {
        if n > self.0 {
            return Err(Error::CapExceeded {
                n,
                cap: self.0,
                count: factorial(n),
            });
        }
        Ok(())
    }
}

impl Default for EnumerationCap {
    fn default() -> Self {
        EnumerationCap(DEFAULT_ENUMERATION_CAP)
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistributionKind {
    Exact,
    Empirical,
}

pub(crate) fn serialize_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_finite() => s.serialize_f64(*x),
        _ => s.serialize_str("undefined"),
    }
}

fn serialize_opt_u64<S: Serializer>(v: &Option<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_u64(*x),
        None => s.serialize_str("undefined"),
    }
}

/// Summary statistics of a set of Γ values. Higher standardized moments
/// are undefined when the values have zero spread.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub variance: f64,
    #[serde(serialize_with = "serialize_opt")]
    pub skewness: Option<f64>,
    #[serde(serialize_with = "serialize_opt")]
    pub excess_kurtosis: Option<f64>,
}

impl Summary {
    /// Population moments of `values`.
    pub fn of(values: &[f64]) -> Summary {
        let m = values.len() as f64;
        let mean = values.iter().sum::<f64>() / m;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= m;
        m3 /= m;
        m4 /= m;
        // spread below the rounding noise of summing N² products counts as none
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let spread = m2 > (1e-12 * peak).powi(2) && m2 > 0.0;
        let (skewness, excess_kurtosis) = if spread {
            (Some(m3 / m2.powf(1.5)), Some(m4 / (m2 * m2) - 3.0))
        } else {
            (None, None)
        };
        Summary {
            mean,
            variance: m2,
            skewness,
            excess_kurtosis,
        }
    }
}

/// The exact or empirical permutation law of Γ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullDistribution {
    pub kind: DistributionKind,
    #[serde(skip)]
    pub values: Vec<f64>,
    pub n: usize,
    pub sample_count: u64,
    #[serde(serialize_with = "serialize_opt_u64")]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub summary: Summary,
}

impl NullDistribution {
    fn build(kind: DistributionKind, values: Vec<f64>, n: usize, seed: Option<u64>) -> Self {
        let summary = Summary::of(&values);
        NullDistribution {
            kind,
            sample_count: values.len() as u64,
            values,
            n,
            seed,
            summary,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.summary.skewness.is_none()
    }

    /// One value per line, full precision.
    pub fn values_csv(&self) -> String {
        let mut out = String::from("# gamma\n");
        for v in &self.values {
            out.push_str(&format!("{v:?}\n"));
        }
        out
    }
}

fn check_sizes(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub(crate) fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Γ under every one of the N! permutations.
pub fn enumerate_exact(
    a: &CoefficientMatrix,
    b: &CoefficientMatrix,
    cap: EnumerationCap,
) -> Result<NullDistribution> {
    check_sizes(a, b)?;
    let n = a.n();
    cap.check(n)?;
    let mut values = Vec::with_capacity(factorial(n) as usize);
    for_each_permutation(n, |p| values.push(gamma_unchecked(a, b, p)));
    Ok(NullDistribution::build(DistributionKind::Exact, values, n, None))
}

/// `E(Γ^order)` over all N! permutations.
pub fn exact_moment(
    a: &CoefficientMatrix,
    b: &CoefficientMatrix,
    order: u32,
    cap: EnumerationCap,
) -> Result<f64> {
    if order == 0 {
        return Err(Error::invalid("moment order must be at least 1"));
    }
    let dist = enumerate_exact(a, b, cap)?;
    Ok(dist.values.iter().map(|g| g.powi(order as i32)).sum::<f64>() / dist.values.len() as f64)
}

/// The permutation used by draw `t` under `seed`.
pub fn draw_permutation(n: usize, seed: u64, t: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

/// Monte Carlo permutation null with `draws` samples. `workers` of `None`
/// uses rayon's global pool; the output does not depend on it.
pub fn sample_null(
    a: &CoefficientMatrix,
    b: &CoefficientMatrix,
    draws: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<NullDistribution> {
    check_sizes(a, b)?;
    if draws == 0 {
        return Err(Error::invalid("draws must be at least 1"));
    }
    let n = a.n();
    let run = || -> Vec<f64> {
        (0..draws)
            .into_par_iter()
            .map(|t| gamma_unchecked(a, b, &draw_permutation(n, seed, t)))
            .collect()
    };
    let values = match workers {
        None => run(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::invalid(format!("thread pool: {e}")))?
            .install(run),
    };
    Ok(NullDistribution::build(DistributionKind::Empirical, values, n, Some(seed)))
}

pub fn standard_normal_cdf(z: f64) -> f64 {
    Normal::standard().cdf(z)
}

/// Sup-distance between the empirical CDF of `z` and Φ.
pub fn ks_statistic(z: &[f64]) -> f64 {
    let mut sorted = z.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = standard_normal_cdf(x);
            let above = (i + 1) as f64 / m - f;
            let below = f - i as f64 / m;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Kolmogorov–Smirnov distance of the standardized null from N(0, 1).
pub fn ks_normal(
    dist: &NullDistribution,
    a: &CoefficientMatrix,
    b: &CoefficientMatrix,
    kind: NormalizerKind,
) -> Result<f64> {
    if dist.values.is_empty() || dist.is_constant() {
        return Err(Error::Degenerate("null distribution has a single support point".into()));
    }
    let st = Standardizer::new(a, b, kind)?;
    let z: Vec<f64> = dist.values.iter().map(|&g| st.apply(g)).collect();
    Ok(ks_statistic(&z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sidedness {
    Greater,
    Less,
    TwoSided,
}

/// Permutation p-value. Values within `1e-10` relative of `gamma_obs`
/// count as ties and fall in both tails. Empirical distributions use the
/// `(1 + hits) / (M + 1)` correction; exact ones use plain proportions.
pub fn p_value(dist: &NullDistribution, gamma_obs: f64, sidedness: Sidedness) -> f64 {
    let scale = dist
        .values
        .iter()
        .fold(gamma_obs.abs(), |m, v| m.max(v.abs()));
    let tol = 1e-10 * scale;
    let count = dist.values.len() as f64;
    let tail = |hits: usize| match dist.kind {
        DistributionKind::Exact => hits as f64 / count,
        DistributionKind::Empirical => (1.0 + hits as f64) / (count + 1.0),
    };
    let greater = || tail(dist.values.iter().filter(|&&v| v >= gamma_obs - tol).count());
    let less = || tail(dist.values.iter().filter(|&&v| v <= gamma_obs + tol).count());
    match sidedness {
        Sidedness::Greater => greater(),
        Sidedness::Less => less(),
        Sidedness::TwoSided => (2.0 * greater().min(less())).min(1.0),
    }
}
