//! Exact permutation moments of Γ and the theorem normalizers.
//!
//! The mean holds for any pair of matrices. The second moment has two
//! routes: the seven-term formula for symmetric pairs, and a general form
//! that sums over all fifteen ways the four subscripts of `a_ij a_kl` can
//! coincide. Each coincidence pattern with `f` distinct values contributes
//! `S_P(a) S_P(b) / (N(N−1)⋯(N−f+1))`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{enumerate_exact, EnumerationCap};
use crate::error::{Error, Result};
use crate::matrix::{elementary_sums, CoefficientMatrix, DistinctSumPattern, KernelSums, SymmetryClass};

/// Relative variance floor: variances below `1e-12 · (N² a_max b_max)²`
/// are treated as zero.
pub const VARIANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizerKind {
    ExactSd,
    Daniels,
    Pham2,
    Pham3,
}

impl NormalizerKind {
    pub const ALL: [NormalizerKind; 4] = [
        NormalizerKind::ExactSd,
        NormalizerKind::Daniels,
        NormalizerKind::Pham2,
        NormalizerKind::Pham3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NormalizerKind::ExactSd => "exact_sd",
            NormalizerKind::Daniels => "daniels",
            NormalizerKind::Pham2 => "pham2",
            NormalizerKind::Pham3 => "pham3",
        }
    }
}

impl fmt::Display for NormalizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormalizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_sd" | "exact-sd" => Ok(NormalizerKind::ExactSd),
            "daniels" | "main" => Ok(NormalizerKind::Daniels),
            "pham2" => Ok(NormalizerKind::Pham2),
            "pham3" => Ok(NormalizerKind::Pham3),
            other => Err(Error::invalid(format!("unknown normalizer '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub normalizer_daniels: f64,
    pub normalizer_pham2: f64,
    pub normalizer_pham3: f64,
    pub degenerate: bool,
}

fn check_sizes(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// N (N−1) ⋯ (N−k+1); zero when k > N.
pub(crate) fn falling(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).map(|t| (n - t) as f64).product()
}

/// `E(Γ) = (N−2)!/N! · Σ_{j≠k}a_jk · Σ_{i≠l}b_il + (N−1)!/N! · Σa_jj · Σb_ii`.
pub fn exact_mean(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<f64> {
    check_sizes(a, b)?;
    let ea = elementary_sums(a);
    let eb = elementary_sums(b);
    let n = a.n();
    Ok(ea.sum_offdiag * eb.sum_offdiag / falling(n, 2) + ea.sum_diag * eb.sum_diag / n as f64)
}

/// Seven-term second moment for symmetric `a` and `b`.
///
/// The arrangement counts 4, 2, 4 on the three- and two-subscript terms
/// only hold when both matrices are symmetric; other classes are refused.
pub fn exact_second_moment(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<f64> {
    check_sizes(a, b)?;
    for m in [a, b] {
        if m.symmetry_class() != SymmetryClass::Symmetric {
            return Err(Error::RequiresSymmetric(m.symmetry_class().as_str()));
        }
    }
    let ka = KernelSums::of(a);
    let kb = KernelSums::of(b);
    let n = a.n();
    use DistinctSumPattern::*;
    let terms: [(f64, DistinctSumPattern, usize); 7] = [
        (1.0, P4, 4),
        (4.0, P3Shared, 3),
        (2.0, P3Diag, 3),
        (2.0, P2Sq, 2),
        (1.0, P2Diag2, 2),
        (4.0, P2Mixed, 2),
        (1.0, P1, 1),
    ];
    Ok(terms
        .iter()
        .filter(|&&(_, _, f)| f <= n)
        .map(|&(count, p, f)| count * ka.pattern(p) * kb.pattern(p) / falling(n, f))
        .sum())
}

/// The fifteen coincidence-pattern sums of `a_ij a_kl`, grouped by the
/// number of distinct subscript values.
fn partition_sums(k: &KernelSums) -> [(f64, usize); 15] {
    let p4 = k.pattern(DistinctSumPattern::P4);
    let diag3 = k.pattern(DistinctSumPattern::P3Diag);
    let row_shared = k.rr - k.q;
    let col_shared = k.cc - k.q;
    let chain = k.rc - k.qt;
    let diag2 = k.d * k.d - k.dd;
    [
        (p4, 4),
        // {ij}{k}{l}, {kl}{i}{j}
        (diag3, 3),
        (diag3, 3),
        // {ik}{j}{l}
        (row_shared, 3),
        // {jl}{i}{k}
        (col_shared, 3),
        // {il}{j}{k}, {jk}{i}{l}
        (chain, 3),
        (chain, 3),
        // {ij}{kl}, {ik}{jl}, {il}{jk}
        (diag2, 2),
        (k.q, 2),
        (k.qt, 2),
        // {ijk}{l}, {ijl}{k}, {ikl}{j}, {jkl}{i}
        (k.dr, 2),
        (k.dc, 2),
        (k.dr, 2),
        (k.dc, 2),
        (k.dd, 1),
    ]
}

/// Second moment for matrices of any symmetry class.
pub fn exact_second_moment_any(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<f64> {
    check_sizes(a, b)?;
    let n = a.n();
    let pa = partition_sums(&KernelSums::of(a));
    let pb = partition_sums(&KernelSums::of(b));
    Ok(pa
        .iter()
        .zip(&pb)
        .filter(|((_, f), _)| *f <= n)
        .map(|((sa, f), (sb, _))| sa * sb / falling(n, *f))
        .sum())
}

fn second_moment_dispatch(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<f64> {
    if a.symmetry_class() == SymmetryClass::Symmetric && b.symmetry_class() == SymmetryClass::Symmetric {
        exact_second_moment(a, b)
    } else {
        exact_second_moment_any(a, b)
    }
}

pub(crate) fn variance_floor(a: &CoefficientMatrix, b: &CoefficientMatrix) -> f64 {
    let n = a.n() as f64;
    VARIANCE_FLOOR * (n * n * a.max_abs() * b.max_abs()).powi(2)
}

/// Variance with its degeneracy flag. Values below the floor clamp to 0.
pub fn exact_variance_flagged(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<(f64, bool)> {
    let mean = exact_mean(a, b)?;
    let second = second_moment_dispatch(a, b)?;
    let var = second - mean * mean;
    if var < variance_floor(a, b) || var <= 0.0 {
        Ok((0.0, true))
    } else {
        Ok((var, false))
    }
}

pub fn exact_variance(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<f64> {
    exact_variance_flagged(a, b).map(|(v, _)| v)
}

/// Closed-form normalizer of the requested kind. Always non-negative.
pub fn normalizer(a: &CoefficientMatrix, b: &CoefficientMatrix, kind: NormalizerKind) -> Result<f64> {
    check_sizes(a, b)?;
    let n = a.n() as f64;
    Ok(match kind {
        NormalizerKind::ExactSd => exact_variance(a, b)?.sqrt(),
        NormalizerKind::Daniels => {
            let ta = elementary_sums(a).triple_sum;
            let tb = elementary_sums(b).triple_sum;
            2.0 * (ta * tb / n.powi(3)).sqrt()
        }
        NormalizerKind::Pham2 => {
            let (qa, qb) = (sum_sq(a), sum_sq(b));
            (2.0 * qa * qb / (n * n)).sqrt()
        }
        NormalizerKind::Pham3 => {
            let sa = KernelSums::of(a).pattern(DistinctSumPattern::P3Shared);
            let sb = KernelSums::of(b).pattern(DistinctSumPattern::P3Shared);
            let (qa, qb) = (sum_sq(a), sum_sq(b));
            // the distinct-pair product can be negative for small or
            // unbalanced inputs
            (4.0 * sa * sb / n.powi(3) + 2.0 * qa * qb / (n * n)).max(0.0).sqrt()
        }
    })
}

fn sum_sq(a: &CoefficientMatrix) -> f64 {
    a.as_slice().iter().map(|x| x * x).sum()
}

pub fn moment_report(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<MomentReport> {
    let mean = exact_mean(a, b)?;
    let second_moment = second_moment_dispatch(a, b)?;
    let (variance, degenerate) = exact_variance_flagged(a, b)?;
    Ok(MomentReport {
        mean,
        second_moment,
        variance,
        normalizer_daniels: normalizer(a, b, NormalizerKind::Daniels)?,
        normalizer_pham2: normalizer(a, b, NormalizerKind::Pham2)?,
        normalizer_pham3: normalizer(a, b, NormalizerKind::Pham3)?,
        degenerate,
    })
}

/// Precomputed affine map `γ ↦ (γ − center) / scale` for one normalizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardizer {
    pub kind: NormalizerKind,
    pub center: f64,
    pub scale: f64,
}

impl Standardizer {
    pub fn new(a: &CoefficientMatrix, b: &CoefficientMatrix, kind: NormalizerKind) -> Result<Self> {
        let (center, scale) = match kind {
            NormalizerKind::ExactSd => {
                let (var, degenerate) = exact_variance_flagged(a, b)?;
                if degenerate {
                    return Err(Error::Degenerate(
                        "permutation variance is zero (Γ is constant)".into(),
                    ));
                }
                (exact_mean(a, b)?, var.sqrt())
            }
            other => (0.0, normalizer(a, b, other)?),
        };
        if !(scale > 0.0) {
            return Err(Error::Degenerate(format!("{kind} normalizer is zero")));
        }
        Ok(Standardizer { kind, center, scale })
    }

    #[inline]
    pub fn apply(&self, gamma: f64) -> f64 {
        (gamma - self.center) / self.scale
    }
}

/// Exact-sd standardization centers at `E(Γ)`; the theorem normalizers
/// divide the raw statistic.
pub fn standardize(
    gamma_obs: f64,
    a: &CoefficientMatrix,
    b: &CoefficientMatrix,
    kind: NormalizerKind,
) -> Result<f64> {
    Ok(Standardizer::new(a, b, kind)?.apply(gamma_obs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledMoment {
    pub order: u32,
    pub moment: f64,
    /// moment / (N^{3p/2} a_max^p b_max^p)
    pub scaled: f64,
}

pub const MAX_SCALING_ORDER: u32 = 6;

/// Exact moments of orders `1..=max_order` by enumeration, with the
/// `N^{3p/2} a_max^p b_max^p` scaling applied.
pub fn moment_scaling_report(
    a: &CoefficientMatrix,
    b: &CoefficientMatrix,
    max_order: u32,
    cap: EnumerationCap,
) -> Result<Vec<ScaledMoment>> {
    if max_order == 0 || max_order > MAX_SCALING_ORDER {
        return Err(Error::invalid(format!(
            "max_order must be in 1..={MAX_SCALING_ORDER}, got {max_order}"
        )));
    }
    let dist = enumerate_exact(a, b, cap)?;
    let n = a.n() as f64;
    let unit = n.powf(1.5) * a.max_abs() * b.max_abs();
    let count = dist.values.len() as f64;
    Ok((1..=max_order)
        .map(|p| {
            let moment = dist.values.iter().map(|g| g.powi(p as i32)).sum::<f64>() / count;
            let scaled = if unit > 0.0 {
                moment / unit.powi(p as i32)
            } else {
                0.0
            };
            ScaledMoment { order: p, moment, scaled }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k3() -> CoefficientMatrix {
        CoefficientMatrix::from_fn(3, SymmetryClass::Symmetric, true, |i, j| (i != j) as u8 as f64).unwrap()
    }

    fn pair3() -> CoefficientMatrix {
        CoefficientMatrix::from_fn(3, SymmetryClass::Symmetric, true, |i, j| {
            ((i, j) == (0, 1) || (i, j) == (1, 0)) as u8 as f64
        })
        .unwrap()
    }

    fn sign_diff(x: &[f64]) -> CoefficientMatrix {
        CoefficientMatrix::from_fn(x.len(), SymmetryClass::Antisymmetric, true, |i, j| {
            (x[i] - x[j]).signum() * ((x[i] != x[j]) as u8 as f64)
        })
        .unwrap()
    }

    #[test]
    fn mean_examples() {
        assert_eq!(exact_mean(&k3(), &pair3()).unwrap(), 2.0);
        let a = sign_diff(&[0.3, -1.0, 2.0, 0.5]);
        let b = CoefficientMatrix::from_fn(4, SymmetryClass::General, false, |i, j| (i * 4 + j) as f64).unwrap();
        assert_eq!(exact_mean(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn second_moment_examples() {
        assert_relative_eq!(exact_second_moment(&k3(), &pair3()).unwrap(), 4.0, max_relative = 1e-14);
        let z = CoefficientMatrix::zeros(5).unwrap();
        assert_eq!(exact_second_moment(&z, &z).unwrap(), 0.0);
        let w = sign_diff(&[1.0, 2.0, 3.0]);
        assert!(matches!(
            exact_second_moment(&w, &w),
            Err(Error::RequiresSymmetric("antisymmetric"))
        ));
    }

    #[test]
    fn variance_degenerate_for_constant_statistic() {
        let (v, degenerate) = exact_variance_flagged(&k3(), &pair3()).unwrap();
        assert_eq!(v, 0.0);
        assert!(degenerate);
        assert!(matches!(
            standardize(2.0, &k3(), &pair3(), NormalizerKind::ExactSd),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn wilcoxon_three_point_normalizers() {
        let a = sign_diff(&[1.0, 2.0, 3.0]);
        let b = sign_diff(&[0.0, 0.0, 1.0]);
        assert_relative_eq!(normalizer(&a, &b, NormalizerKind::Daniels).unwrap(), 8.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(
            normalizer(&a, &b, NormalizerKind::Pham2).unwrap(),
            4.0 * 3f64.sqrt() / 3.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            normalizer(&a, &b, NormalizerKind::Pham3).unwrap(),
            (160.0f64 / 27.0).sqrt(),
            max_relative = 1e-14
        );
        assert_relative_eq!(standardize(4.0, &a, &b, NormalizerKind::Daniels).unwrap(), 1.5, max_relative = 1e-14);
    }

    #[test]
    fn centering_and_scaling() {
        let a = CoefficientMatrix::from_fn(5, SymmetryClass::Symmetric, true, |i, j| {
            if i == j {
                0.0
            } else {
                ((i + j) as f64).sin()
            }
        })
        .unwrap();
        let b = CoefficientMatrix::from_fn(5, SymmetryClass::Symmetric, true, |i, j| {
            if i == j {
                0.0
            } else {
                ((i * j) as f64 + 0.5).cos()
            }
        })
        .unwrap();
        let mean = exact_mean(&a, &b).unwrap();
        assert_relative_eq!(standardize(mean, &a, &b, NormalizerKind::ExactSd).unwrap(), 0.0, epsilon = 1e-12);
        let v = exact_variance(&a, &b).unwrap();
        let v2 = exact_variance(&a.scaled(2.0).unwrap(), &b).unwrap();
        assert_relative_eq!(v2, 4.0 * v, max_relative = 1e-12);
    }

    #[test]
    fn general_route_matches_symmetric_formula() {
        let a = CoefficientMatrix::from_fn(6, SymmetryClass::Symmetric, false, |i, j| {
            ((i + 1) * (j + 1)) as f64 / 7.0 - 0.6
        })
        .unwrap();
        let b = CoefficientMatrix::from_fn(6, SymmetryClass::Symmetric, false, |i, j| {
            ((i + j) as f64 * 0.37).sin()
        })
        .unwrap();
        assert_relative_eq!(
            exact_second_moment(&a, &b).unwrap(),
            exact_second_moment_any(&a, &b).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn scaling_report_bounds() {
        let cap = EnumerationCap::default();
        assert!(moment_scaling_report(&k3(), &pair3(), 0, cap).is_err());
        assert!(moment_scaling_report(&k3(), &pair3(), 7, cap).is_err());
        let rows = moment_scaling_report(&k3(), &pair3(), 3, cap).unwrap();
        assert_eq!(rows.len(), 3);
        assert_relative_eq!(rows[1].moment, 4.0, max_relative = 1e-14);
        assert_relative_eq!(rows[0].scaled, 2.0 / 3f64.powf(1.5), max_relative = 1e-14);
    }

    #[test]
    fn normalizer_kind_parse() {
        for k in NormalizerKind::ALL {
            assert_eq!(k.as_str().parse::<NormalizerKind>().unwrap(), k);
        }
        assert!("bogus".parse::<NormalizerKind>().is_err());
    }
}
