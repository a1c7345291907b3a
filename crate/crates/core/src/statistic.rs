//! Named statistics: which builders produce `a` and `b` from raw inputs.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::builders::{
    abs_label_diff, centered_distance_matrix, diff_matrix, kernel_matrix, mmd_label_matrix, mst_adjacency,
    rank_diff_matrix, sign_diff_matrix, weighted_label_matrix, Bandwidth, LabelVector, PRule, Sample,
};
use crate::conditions::bounded_entries_matrix;
use crate::error::{Error, Result};
use crate::matrix::CoefficientMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Wilcoxon,
    EdgeCount,
    Mmd,
    WeightedEdgeCount,
    Pearson,
    Spearman,
    MantelCentered,
    RawMatrices,
    /// `a_ij = 1 − δ_ij` against cross-group indicators; Γ is constant.
    Complete,
}

impl Statistic {
    pub const ALL: [Statistic; 9] = [
        Statistic::Wilcoxon,
        Statistic::EdgeCount,
        Statistic::Mmd,
        Statistic::WeightedEdgeCount,
        Statistic::Pearson,
        Statistic::Spearman,
        Statistic::MantelCentered,
        Statistic::RawMatrices,
        Statistic::Complete,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Statistic::Wilcoxon => "wilcoxon",
            Statistic::EdgeCount => "edge_count",
            Statistic::Mmd => "mmd",
            Statistic::WeightedEdgeCount => "weighted_edge_count",
            Statistic::Pearson => "pearson",
            Statistic::Spearman => "spearman",
            Statistic::MantelCentered => "mantel_centered",
            Statistic::RawMatrices => "raw_matrices",
            Statistic::Complete => "complete",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('-', "_");
        Statistic::ALL
            .into_iter()
            .find(|t| t.as_str() == norm)
            .ok_or_else(|| Error::invalid(format!("unknown statistic '{s}'")))
    }
}

/// Raw data a statistic is built from. Which fields are required depends
/// on the statistic.
#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub points: Option<Sample>,
    /// Second sample, for the Mantel-type statistic.
    pub points_b: Option<Sample>,
    pub labels: Option<LabelVector>,
    pub matrix_a: Option<CoefficientMatrix>,
    pub matrix_b: Option<CoefficientMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    pub bandwidth: Bandwidth,
    pub p_rule: PRule,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            bandwidth: Bandwidth::Median,
            p_rule: PRule::MOverN,
        }
    }
}

fn need<'a, T>(v: &'a Option<T>, what: &str, stat: Statistic) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::invalid(format!("statistic '{stat}' needs {what}")))
}

fn one_dim(sample: &Sample, stat: Statistic) -> Result<Vec<f64>> {
    if sample.dim() != 1 {
        return Err(Error::invalid(format!(
            "statistic '{stat}' needs one-dimensional points, got dimension {}",
            sample.dim()
        )));
    }
    Ok(sample.points().iter().map(|p| p[0]).collect())
}

fn two_columns(sample: &Sample, stat: Statistic) -> Result<(Vec<f64>, Vec<f64>)> {
    if sample.dim() != 2 {
        return Err(Error::invalid(format!(
            "statistic '{stat}' needs points with two columns (x, y), got {}",
            sample.dim()
        )));
    }
    Ok(sample.points().iter().map(|p| (p[0], p[1])).unzip())
}

fn same_len(n1: usize, n2: usize) -> Result<()> {
    if n1 != n2 {
        return Err(Error::SizeMismatch(n1, n2));
    }
    Ok(())
}

/// Builds `(a, b)` for `stat`.
pub fn build_pair(
    stat: Statistic,
    inputs: &Inputs,
    opts: &BuildOptions,
) -> Result<(CoefficientMatrix, CoefficientMatrix)> {
    let pair = match stat {
        Statistic::Wilcoxon => {
            let x = one_dim(need(&inputs.points, "--points", stat)?, stat)?;
            let labels = need(&inputs.labels, "--labels", stat)?;
            same_len(x.len(), labels.len())?;
            (sign_diff_matrix(&x)?, sign_diff_matrix(&labels.as_f64())?)
        }
        Statistic::EdgeCount => {
            let s = need(&inputs.points, "--points", stat)?;
            let labels = need(&inputs.labels, "--labels", stat)?;
            same_len(s.len(), labels.len())?;
            (mst_adjacency(s)?, abs_label_diff(labels)?)
        }
        Statistic::Mmd => {
            let s = need(&inputs.points, "--points", stat)?;
            let labels = need(&inputs.labels, "--labels", stat)?;
            same_len(s.len(), labels.len())?;
            (kernel_matrix(s, opts.bandwidth, false)?, mmd_label_matrix(labels)?)
        }
        Statistic::WeightedEdgeCount => {
            let s = need(&inputs.points, "--points", stat)?;
            let labels = need(&inputs.labels, "--labels", stat)?;
            same_len(s.len(), labels.len())?;
            (mst_adjacency(s)?, weighted_label_matrix(labels, opts.p_rule)?)
        }
        Statistic::Pearson => {
            let (x, y) = two_columns(need(&inputs.points, "--points", stat)?, stat)?;
            (diff_matrix(&x)?, diff_matrix(&y)?)
        }
        Statistic::Spearman => {
            let (x, y) = two_columns(need(&inputs.points, "--points", stat)?, stat)?;
            (rank_diff_matrix(&x)?, rank_diff_matrix(&y)?)
        }
        Statistic::MantelCentered => {
            let s = need(&inputs.points, "--points", stat)?;
            let t = need(&inputs.points_b, "--points-b", stat)?;
            same_len(s.len(), t.len())?;
            (centered_distance_matrix(s)?, centered_distance_matrix(t)?)
        }
        Statistic::RawMatrices => (
            need(&inputs.matrix_a, "--matrix-a", stat)?.clone(),
            need(&inputs.matrix_b, "--matrix-b", stat)?.clone(),
        ),
        Statistic::Complete => {
            let labels = need(&inputs.labels, "--labels", stat)?;
            (bounded_entries_matrix(labels.len())?, abs_label_diff(labels)?)
        }
    };
    if pair.0.n() != pair.1.n() {
        return Err(Error::SizeMismatch(pair.0.n(), pair.1.n()));
    }
    Ok(pair)
}

/// Synthetic inputs of size `n` for `stat`: standard normal coordinates
/// (1-d for rank and distance statistics, 2-d for graph and kernel ones)
/// and balanced labels, the first `⌊n/2⌋` in group 0. Stream `n` of the
/// ChaCha8 generator keyed by `data_seed` drives the draw.
pub fn synthetic_inputs(stat: Statistic, n: usize, data_seed: u64) -> Result<Inputs> {
    if n < 4 {
        return Err(Error::invalid("synthetic inputs need n >= 4"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(data_seed);
    rng.set_stream(n as u64);
    let mut normal = |d: usize| -> Result<Sample> {
        Sample::new(
            (0..n)
                .map(|_| (0..d).map(|_| StandardNormal.sample(&mut rng)).collect())
                .collect(),
        )
    };
    let labels = LabelVector::new((0..n).map(|i| (i >= n / 2) as u8).collect())?;
    let inputs = match stat {
        Statistic::Wilcoxon => Inputs {
            points: Some(normal(1)?),
            labels: Some(labels),
            ..Inputs::default()
        },
        Statistic::EdgeCount | Statistic::Mmd | Statistic::WeightedEdgeCount => Inputs {
            points: Some(normal(2)?),
            labels: Some(labels),
            ..Inputs::default()
        },
        Statistic::Pearson | Statistic::Spearman => Inputs {
            points: Some(normal(2)?),
            ..Inputs::default()
        },
        Statistic::MantelCentered => {
            let x = normal(1)?;
            let y = normal(1)?;
            Inputs {
                points: Some(x),
                points_b: Some(y),
                ..Inputs::default()
            }
        }
        Statistic::Complete => Inputs {
            labels: Some(labels),
            ..Inputs::default()
        },
        Statistic::RawMatrices => {
            return Err(Error::invalid("raw_matrices has no synthetic data rule"));
        }
    };
    Ok(inputs)
}
