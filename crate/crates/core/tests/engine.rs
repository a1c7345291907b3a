mod common;

use std::collections::HashMap;

use common::*;
use permcorr::builders::sign_diff_matrix;
use permcorr::engine::{
    draw_permutation, enumerate_exact, ks_normal, p_value, sample_null, DistributionKind, EnumerationCap, Sidedness,
};
use permcorr::{exact_mean, exact_variance, gamma, Error, NormalizerKind, Permutation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn sampler_is_uniform_over_s6() {
    let draws = 50_000u64;
    let mut counts: HashMap<Vec<usize>, u64> = HashMap::new();
    for t in 0..draws {
        *counts.entry(draw_permutation(6, 42, t)).or_default() += 1;
    }
    assert_eq!(counts.len(), 720);
    let expected = draws as f64 / 720.0;
    let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // df = 719; mean 719, sd ≈ 37.9
    assert!(chi2 < 719.0 + 5.0 * 37.9, "chi2 = {chi2}");
}

#[test]
fn sampled_moments_approach_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = random_symmetric(12, true, &mut rng);
    let b = random_antisymmetric(12, &mut rng);
    let c = random_symmetric(12, false, &mut rng);
    for (x, y) in [(&a, &c), (&b, &b)] {
        let d = sample_null(x, y, 40_000, 9, None).unwrap();
        let sd = exact_variance(x, y).unwrap().sqrt();
        let se = sd / (40_000f64).sqrt();
        assert!((d.summary.mean - exact_mean(x, y).unwrap()).abs() < 5.0 * se);
        assert!((d.summary.variance.sqrt() / sd - 1.0).abs() < 0.03);
    }
}

#[test]
fn exact_null_equals_independent_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = random_general(6, &mut rng);
    let b = random_general(6, &mut rng);
    let d = enumerate_exact(&a, &b, EnumerationCap::default()).unwrap();
    assert_eq!(d.kind, DistributionKind::Exact);
    let mut got = d.values.clone();
    let mut want = naive_null(&a, &b);
    got.sort_by(f64::total_cmp);
    want.sort_by(f64::total_cmp);
    assert_eq!(got.len(), 720);
    for (x, y) in got.iter().zip(&want) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn enumeration_cap_is_enforced() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_symmetric(9, true, &mut rng);
    assert!(matches!(
        enumerate_exact(&a, &a, EnumerationCap::default()),
        Err(Error::CapExceeded { n: 9, cap: 8, .. })
    ));
    assert!(EnumerationCap::new(10).is_err());
    assert!(EnumerationCap::new(0).is_err());
}

#[test]
fn wilcoxon_exact_p_matches_rank_sum_count() {
    let x = [0.3, -1.2, 2.2, 0.9, 1.7, -0.4, 0.05];
    let y = [0.0, 1.0, 0.0, 1.0, 1.0, 0.0, 1.0];
    let a = sign_diff_matrix(&x).unwrap();
    let b = sign_diff_matrix(&y).unwrap();
    let obs = gamma(&a, &b, &Permutation::identity(7)).unwrap();
    let d = enumerate_exact(&a, &b, EnumerationCap::default()).unwrap();

    // U = #{(i in group 1, j in group 0): x_i > x_j}; Γ = 4U − 2·m·n
    let u = |lab: &[usize]| -> usize {
        let mut c = 0;
        for i in 0..7 {
            for j in 0..7 {
                if y[lab[i]] == 1.0 && y[lab[j]] == 0.0 && x[i] > x[j] {
                    c += 1;
                }
            }
        }
        c
    };
    assert_eq!(obs, 4.0 * u(&[0, 1, 2, 3, 4, 5, 6]) as f64 - 24.0);
    let perms = all_permutations(7);
    let u_obs = u(&[0, 1, 2, 3, 4, 5, 6]);
    let ge = perms.iter().filter(|p| u(p) >= u_obs).count() as f64 / perms.len() as f64;
    let le = perms.iter().filter(|p| u(p) <= u_obs).count() as f64 / perms.len() as f64;
    assert!((p_value(&d, obs, Sidedness::Greater) - ge).abs() < 1e-12);
    assert!((p_value(&d, obs, Sidedness::Less) - le).abs() < 1e-12);
    assert!((p_value(&d, obs, Sidedness::TwoSided) - (2.0 * ge.min(le)).min(1.0)).abs() < 1e-12);
}

#[test]
fn empirical_p_values_are_never_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_symmetric(10, true, &mut rng);
    let b = random_symmetric(10, true, &mut rng);
    let d = sample_null(&a, &b, 999, 5, Some(2)).unwrap();
    let p = p_value(&d, 1e6, Sidedness::Greater);
    assert!((p - 1.0 / 1000.0).abs() < 1e-15);
    assert!((p_value(&d, -1e6, Sidedness::Greater) - 1.0).abs() < 1e-15);
}

#[test]
fn output_is_independent_of_worker_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let a = random_symmetric(20, true, &mut rng);
    let b = random_symmetric(20, true, &mut rng);
    let one = sample_null(&a, &b, 3000, 77, Some(1)).unwrap();
    for w in [2, 3, 8] {
        assert_eq!(sample_null(&a, &b, 3000, 77, Some(w)).unwrap().values, one.values);
    }
    assert_eq!(sample_null(&a, &b, 3000, 77, None).unwrap().values, one.values);
    assert_ne!(sample_null(&a, &b, 3000, 78, Some(1)).unwrap().values, one.values);
    // a longer run extends a shorter one
    assert_eq!(sample_null(&a, &b, 1000, 77, Some(4)).unwrap().values[..], one.values[..1000]);
}

#[test]
fn ks_refuses_constant_null() {
    let a = permcorr::CoefficientMatrix::from_fn(5, permcorr::SymmetryClass::Symmetric, true, |i, j| {
        (i != j) as u8 as f64
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = random_symmetric(5, true, &mut rng);
    let d = enumerate_exact(&a, &b, EnumerationCap::default()).unwrap();
    assert!(d.is_constant());
    assert!(matches!(ks_normal(&d, &a, &b, NormalizerKind::ExactSd), Err(Error::Degenerate(_))));
}
