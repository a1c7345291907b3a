//! Coefficient matrices for the statistics that fit the Γ form: Pearson and
//! Spearman (up to standardization), Wilcoxon/Mann–Whitney, the MST
//! edge-count test, kernel MMD, the weighted edge-count test, and a
//! centered distance (Mantel-type) matrix.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::matrix::{CoefficientMatrix, SymmetryClass};

/// `N` points in `d` dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl Sample {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooSmall(points.len()));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::invalid("points must have at least one coordinate"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "point {} has {} coordinates, expected {dim}",
                    i + 1,
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::invalid(format!("point {} has a non-finite coordinate", i + 1)));
            }
        }
        Ok(Sample { points, dim })
    }

    /// One-dimensional sample.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| vec![v]).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.points[i]
            .iter()
            .zip(&self.points[j])
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    /// The `N(N−1)/2` distances for `i < j`, in row order.
    pub fn pairwise_distances(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                out.push(self.distance(i, j));
            }
        }
        out
    }
}

/// Group labels in `{0, 1}` with both groups non-empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector {
    labels: Vec<u8>,
    m: usize,
    n_count: usize,
}

impl LabelVector {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if let Some(pos) = labels.iter().position(|&l| l > 1) {
            return Err(Error::invalid(format!(
                "label {} is {}, expected 0 or 1",
                pos + 1,
                labels[pos]
            )));
        }
        let n_count = labels.iter().filter(|&&l| l == 1).count();
        let m = labels.len() - n_count;
        if m == 0 || n_count == 0 {
            return Err(Error::invalid(format!(
                "both groups must be non-empty (group 0: {m}, group 1: {n_count})"
            )));
        }
        Ok(LabelVector { labels, m, n_count })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Size of group 0.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Size of group 1.
    pub fn n_count(&self) -> usize {
        self.n_count
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.labels.iter().map(|&l| l as f64).collect()
    }
}

fn antisymmetric_from(values: &[f64], f: impl Fn(f64, f64) -> f64) -> Result<CoefficientMatrix> {
    if values.len() < 2 {
        return Err(Error::TooSmall(values.len()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }
    CoefficientMatrix::from_fn(values.len(), SymmetryClass::Antisymmetric, true, |i, j| {
        if i == j {
            0.0
        } else {
            f(values[i], values[j])
        }
    })
}

/// `a_ij = x_i − x_j` (Pearson form).
pub fn diff_matrix(values: &[f64]) -> Result<CoefficientMatrix> {
    antisymmetric_from(values, |x, y| x - y)
}

/// Midranks, 1-based.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end share ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

/// `a_ij = rank(x_i) − rank(x_j)` with midranks for ties (Spearman form).
pub fn rank_diff_matrix(values: &[f64]) -> Result<CoefficientMatrix> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("values must be finite"));
    }
    diff_matrix(&average_ranks(values))
}

/// `a_ij = sign(x_i − x_j)` with `sign(0) = 0` (Wilcoxon form).
pub fn sign_diff_matrix(values: &[f64]) -> Result<CoefficientMatrix> {
    antisymmetric_from(values, |x, y| match x.partial_cmp(&y) {
        Some(Ordering::Greater) => 1.0,
        Some(Ordering::Less) => -1.0,
        _ => 0.0,
    })
}

/// Edges of the Euclidean minimum spanning tree, each as `(i, j)` with
/// `i < j`. Kruskal over edges sorted by `(distance, i, j)`.
pub fn mst_edges(sample: &Sample) -> Vec<(usize, usize)> {
    let n = sample.len();
    let mut edges: Vec<(f64, usize, usize)> = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((sample.distance(i, j), i, j));
        }
    }
    edges.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut parent: Vec<usize> = (0..n).collect();
    let mut rank = vec![0u8; n];
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut tree = Vec::with_capacity(n - 1);
    for (_, i, j) in edges {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri == rj {
            continue;
        }
        match rank[ri].cmp(&rank[rj]) {
            Ordering::Less => parent[ri] = rj,
            Ordering::Greater => parent[rj] = ri,
            Ordering::Equal => {
                parent[rj] = ri;
                rank[ri] += 1;
            }
        }
        tree.push((i, j));
        if tree.len() == n - 1 {
            break;
        }
    }
    tree
}

/// 0/1 adjacency of the Euclidean minimum spanning tree.
pub fn mst_adjacency(sample: &Sample) -> Result<CoefficientMatrix> {
    let n = sample.len();
    let mut data = vec![0.0; n * n];
    for (i, j) in mst_edges(sample) {
        data[i * n + j] = 1.0;
        data[j * n + i] = 1.0;
    }
    CoefficientMatrix::from_row_major(n, data, SymmetryClass::Symmetric, true)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Fixed(f64),
    /// Median of the pairwise distances.
    Median,
}

impl std::fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bandwidth::Fixed(s) => write!(f, "{s}"),
            Bandwidth::Median => f.write_str("median"),
        }
    }
}

impl std::str::FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "median" {
            return Ok(Bandwidth::Median);
        }
        s.parse::<f64>()
            .map(Bandwidth::Fixed)
            .map_err(|_| Error::invalid(format!("bandwidth must be a positive number or 'median', got '{s}'")))
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

/// Resolves the bandwidth rule to a concrete σ.
pub fn resolve_bandwidth(sample: &Sample, bandwidth: Bandwidth) -> Result<f64> {
    let sigma = match bandwidth {
        Bandwidth::Fixed(s) => s,
        Bandwidth::Median => median(sample.pairwise_distances()),
    };
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(match bandwidth {
            Bandwidth::Median => "median bandwidth is zero: points are identical".to_string(),
            Bandwidth::Fixed(s) => format!("bandwidth must be positive, got {s}"),
        }));
    }
    Ok(sigma)
}

/// Gaussian kernel `exp(−‖x_i − x_j‖² / (2σ²))`. The diagonal is zero
/// unless `keep_diagonal` is set.
pub fn kernel_matrix(sample: &Sample, bandwidth: Bandwidth, keep_diagonal: bool) -> Result<CoefficientMatrix> {
    let sigma = resolve_bandwidth(sample, bandwidth)?;
    let n = sample.len();
    let denom = 2.0 * sigma * sigma;
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        if keep_diagonal {
            data[i * n + i] = 1.0;
        }
        for j in (i + 1)..n {
            let d = sample.distance(i, j);
            let k = (-(d * d) / denom).exp();
            data[i * n + j] = k;
            data[j * n + i] = k;
        }
    }
    CoefficientMatrix::from_row_major(n, data, SymmetryClass::Symmetric, !keep_diagonal)
}

/// Label contrast for the unbiased MMD statistic, with a zero diagonal.
pub fn mmd_label_matrix(labels: &LabelVector) -> Result<CoefficientMatrix> {
    let (m, nn) = (labels.m(), labels.n_count());
    if m < 2 || nn < 2 {
        return Err(Error::invalid(format!(
            "MMD needs at least 2 observations per group (group 0: {m}, group 1: {nn})"
        )));
    }
    let (mf, nf) = (m as f64, nn as f64);
    let within0 = 1.0 / (mf * (mf - 1.0));
    let within1 = 1.0 / (nf * (nf - 1.0));
    let cross = -1.0 / (mf * nf);
    let y = labels.labels();
    CoefficientMatrix::from_fn(labels.len(), SymmetryClass::Symmetric, true, |i, j| {
        if i == j {
            0.0
        } else {
            match (y[i], y[j]) {
                (0, 0) => within0,
                (1, 1) => within1,
                _ => cross,
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PRule {
    /// p = m / N
    MOverN,
    /// p = (m − 1) / (N − 2)
    M1OverN2,
    Explicit(f64),
}

impl std::fmt::Display for PRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PRule::MOverN => f.write_str("m_over_N"),
            PRule::M1OverN2 => f.write_str("m1_over_N2"),
            PRule::Explicit(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for PRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m_over_N" | "m_over_n" | "m/N" => Ok(PRule::MOverN),
            "m1_over_N2" | "m1_over_n2" | "(m-1)/(N-2)" => Ok(PRule::M1OverN2),
            other => other
                .parse::<f64>()
                .map(PRule::Explicit)
                .map_err(|_| Error::invalid(format!("unknown p rule '{other}'"))),
        }
    }
}

impl PRule {
    pub fn resolve(self, labels: &LabelVector) -> Result<f64> {
        let (m, n) = (labels.m() as f64, labels.len() as f64);
        let p = match self {
            PRule::MOverN => m / n,
            PRule::M1OverN2 => {
                if labels.len() < 3 {
                    return Err(Error::invalid("p = (m-1)/(N-2) needs N >= 3"));
                }
                (m - 1.0) / (n - 2.0)
            }
            PRule::Explicit(p) => p,
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("p must lie in [0, 1], got {p}")));
        }
        Ok(p)
    }
}

/// `b_ij = (1−p)(1−y_i)(1−y_j) + p y_i y_j`, diagonal included.
pub fn weighted_label_matrix(labels: &LabelVector, rule: PRule) -> Result<CoefficientMatrix> {
    let p = rule.resolve(labels)?;
    let y = labels.as_f64();
    CoefficientMatrix::from_fn(labels.len(), SymmetryClass::Symmetric, false, |i, j| {
        (1.0 - p) * (1.0 - y[i]) * (1.0 - y[j]) + p * y[i] * y[j]
    })
}

/// `b_ij = |y_i − y_j|`: 1 for cross-group pairs.
pub fn abs_label_diff(labels: &LabelVector) -> Result<CoefficientMatrix> {
    let y = labels.labels();
    CoefficientMatrix::from_fn(labels.len(), SymmetryClass::Symmetric, true, |i, j| {
        (y[i] != y[j]) as u8 as f64
    })
}

/// `a_ij = ‖x_i − x_j‖ − d̄` off the diagonal, where `d̄` is the mean
/// pairwise distance. Symmetric, hollow, zero total.
pub fn centered_distance_matrix(sample: &Sample) -> Result<CoefficientMatrix> {
    let n = sample.len();
    let dists = sample.pairwise_distances();
    let mean = dists.iter().sum::<f64>() / dists.len() as f64;
    let mut data = vec![0.0; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let v = dists[k] - mean;
            k += 1;
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    CoefficientMatrix::from_row_major(n, data, SymmetryClass::Symmetric, true)
}
