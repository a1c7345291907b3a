//! Closed-form moments checked against full enumeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{enumerate_exact, EnumerationCap};
use crate::error::Result;
use crate::matrix::{CoefficientMatrix, SymmetryClass};
use crate::moments::{exact_mean, exact_second_moment_any};

pub const ORACLE_TOLERANCE: f64 = 1e-9;

/// Symmetric hollow matrix with off-diagonal entries uniform on [−1, 1].
pub fn random_symmetric_hollow<R: Rng>(n: usize, rng: &mut R) -> CoefficientMatrix {
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random_range(-1.0..=1.0);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    CoefficientMatrix::from_row_major(n, data, SymmetryClass::Symmetric, true).expect("valid by construction")
}

/// Antisymmetric matrix with entries above the diagonal uniform on [−1, 1].
pub fn random_antisymmetric<R: Rng>(n: usize, rng: &mut R) -> CoefficientMatrix {
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random_range(-1.0..=1.0);
            data[i * n + j] = v;
            data[j * n + i] = -v;
        }
    }
    CoefficientMatrix::from_row_major(n, data, SymmetryClass::Antisymmetric, true).expect("valid by construction")
}

pub fn relative_error(value: f64, reference: f64) -> f64 {
    let scale = value.abs().max(reference.abs());
    if scale == 0.0 {
        0.0
    } else {
        (value - reference).abs() / scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub n: usize,
    pub pairs_checked: usize,
    pub max_relative_error_mean: f64,
    pub max_relative_error_second_moment: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// `(E Γ, E Γ²)` for a pair.
pub type MomentFormula<'a> = dyn Fn(&CoefficientMatrix, &CoefficientMatrix) -> Result<(f64, f64)> + 'a;

pub fn closed_form_moments(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<(f64, f64)> {
    Ok((exact_mean(a, b)?, exact_second_moment_any(a, b)?))
}

/// Compares the closed forms with enumeration on `extra` (if any) and on
/// `pairs` random symmetric hollow pairs of order `n`.
pub fn oracle_check(
    n: usize,
    pairs: usize,
    seed: u64,
    cap: EnumerationCap,
    extra: Option<(&CoefficientMatrix, &CoefficientMatrix)>,
) -> Result<OracleOutcome> {
    oracle_check_with(n, pairs, seed, cap, extra, &closed_form_moments)
}

pub fn oracle_check_with(
    n: usize,
    pairs: usize,
    seed: u64,
    cap: EnumerationCap,
    extra: Option<(&CoefficientMatrix, &CoefficientMatrix)>,
    formula: &MomentFormula<'_>,
) -> Result<OracleOutcome> {
    cap.check(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases: Vec<(CoefficientMatrix, CoefficientMatrix)> = Vec::with_capacity(pairs + 1);
    if let Some((a, b)) = extra {
        cases.push((a.clone(), b.clone()));
    }
    for _ in 0..pairs {
        let a = random_symmetric_hollow(n, &mut rng);
        let b = random_symmetric_hollow(n, &mut rng);
        cases.push((a, b));
    }
    let (mut err_mean, mut err_second) = (0.0f64, 0.0f64);
    for (a, b) in &cases {
        let dist = enumerate_exact(a, b, cap)?;
        let count = dist.values.len() as f64;
        let mean = dist.values.iter().sum::<f64>() / count;
        let second = dist.values.iter().map(|g| g * g).sum::<f64>() / count;
        let (m, s) = formula(a, b)?;
        err_mean = err_mean.max(relative_error(m, mean));
        err_second = err_second.max(relative_error(s, second));
    }
    Ok(OracleOutcome {
        n,
        pairs_checked: cases.len(),
        max_relative_error_mean: err_mean,
        max_relative_error_second_moment: err_second,
        tolerance: ORACLE_TOLERANCE,
        passed: err_mean <= ORACLE_TOLERANCE && err_second <= ORACLE_TOLERANCE,
    })
}
