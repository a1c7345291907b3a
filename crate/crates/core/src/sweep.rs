//! Convergence sweeps: how far the permutation null sits from its normal
//! limit as N grows, for one statistic family.

use serde::Serialize;

use crate::engine::{ks_normal, sample_null, serialize_opt};
use crate::error::{Error, Result};
use crate::moments::{exact_variance_flagged, normalizer, NormalizerKind};
use crate::statistic::{build_pair, synthetic_inputs, BuildOptions, Statistic};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub statistic: Statistic,
    pub n_values: Vec<usize>,
    pub draws: u64,
    /// Seed of the permutation sampler.
    pub seed: u64,
    /// Seed of the synthetic data rule.
    pub data_seed: u64,
    pub options: BuildOptions,
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub degenerate: bool,
    #[serde(serialize_with = "serialize_opt")]
    pub ks: Option<f64>,
    #[serde(serialize_with = "serialize_opt")]
    pub skewness: Option<f64>,
    #[serde(serialize_with = "serialize_opt")]
    pub excess_kurtosis: Option<f64>,
    /// daniels normalizer / exact standard deviation
    #[serde(serialize_with = "serialize_opt")]
    pub ratio_daniels: Option<f64>,
    /// pham3 normalizer / exact standard deviation
    #[serde(serialize_with = "serialize_opt")]
    pub ratio_pham3: Option<f64>,
}

pub fn convergence_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.n_values.is_empty() {
        return Err(Error::invalid("sweep needs at least one N"));
    }
    spec.n_values
        .iter()
        .map(|&n| {
            let inputs = synthetic_inputs(spec.statistic, n, spec.data_seed)?;
            let (a, b) = build_pair(spec.statistic, &inputs, &spec.options)?;
            let (var, degenerate) = exact_variance_flagged(&a, &b)?;
            if degenerate {
                return Ok(SweepRow {
                    n,
                    degenerate,
                    ks: None,
                    skewness: None,
                    excess_kurtosis: None,
                    ratio_daniels: None,
                    ratio_pham3: None,
                });
            }
            let dist = sample_null(&a, &b, spec.draws, spec.seed, spec.workers)?;
            let sd = var.sqrt();
            let ks = match ks_normal(&dist, &a, &b, NormalizerKind::ExactSd) {
                Ok(v) => Some(v),
                Err(Error::Degenerate(_)) => None,
                Err(e) => return Err(e),
            };
            Ok(SweepRow {
                n,
                degenerate,
                ks,
                skewness: dist.summary.skewness,
                excess_kurtosis: dist.summary.excess_kurtosis,
                ratio_daniels: Some(normalizer(&a, &b, NormalizerKind::Daniels)? / sd),
                ratio_pham3: Some(normalizer(&a, &b, NormalizerKind::Pham3)? / sd),
            })
        })
        .collect()
}
