mod common;

use common::*;
use permcorr::engine::{enumerate_exact, EnumerationCap};
use permcorr::moments::moment_scaling_report;
use permcorr::{
    exact_mean, exact_second_moment, exact_second_moment_any, exact_variance, moment_report, normalizer,
    standardize, CoefficientMatrix, Error, NormalizerKind, SymmetryClass,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_pair(a: &CoefficientMatrix, b: &CoefficientMatrix, tol: f64) {
    let null = naive_null(a, b);
    let (m1, m2) = (raw_moment(&null, 1), raw_moment(&null, 2));
    let mean = exact_mean(a, b).unwrap();
    let second = exact_second_moment_any(a, b).unwrap();
    // absolute floor for means that cancel to rounding noise
    let floor = 1e-12 * (a.n() as f64).powi(2) * a.max_abs() * b.max_abs();
    assert!(
        rel_err(mean, m1) < tol || (mean - m1).abs() < floor,
        "mean {mean} vs {m1}"
    );
    assert!(
        rel_err(second, m2) < tol || (second - m2).abs() < floor * floor,
        "second {second} vs {m2}"
    );
}

#[test]
fn symmetric_formula_against_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for n in 2..=7 {
        for hollow in [true, false] {
            for _ in 0..4 {
                let a = random_symmetric(n, hollow, &mut rng);
                let b = random_symmetric(n, hollow, &mut rng);
                let null = naive_null(&a, &b);
                let s = exact_second_moment(&a, &b).unwrap();
                assert!(rel_err(s, raw_moment(&null, 2)) < 1e-9, "n={n} hollow={hollow}");
                check_pair(&a, &b, 1e-9);
            }
        }
    }
}

#[test]
fn general_formula_for_every_class_pairing() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for n in 2..=6 {
        for _ in 0..3 {
            let mats = [
                random_general(n, &mut rng),
                random_symmetric(n, false, &mut rng),
                random_antisymmetric(n, &mut rng),
            ];
            for a in &mats {
                for b in &mats {
                    check_pair(a, b, 1e-9);
                }
            }
        }
    }
}

#[test]
fn symmetric_route_refuses_other_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_antisymmetric(4, &mut rng);
    let b = random_symmetric(4, true, &mut rng);
    assert!(matches!(exact_second_moment(&a, &b), Err(Error::RequiresSymmetric(_))));
}

#[test]
fn variance_matches_enumerated_spread() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let a = random_antisymmetric(6, &mut rng);
    let b = random_antisymmetric(6, &mut rng);
    let null = naive_null(&a, &b);
    let m = raw_moment(&null, 1);
    let v = null.iter().map(|g| (g - m).powi(2)).sum::<f64>() / null.len() as f64;
    assert!(rel_err(exact_variance(&a, &b).unwrap(), v) < 1e-9);
}

#[test]
fn normalizers_from_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a = random_symmetric(7, true, &mut rng);
    let b = random_symmetric(7, true, &mut rng);
    let n = 7.0f64;
    let row_sq = |m: &CoefficientMatrix| -> f64 {
        (0..m.n()).map(|i| m.row(i).iter().sum::<f64>().powi(2)).sum()
    };
    let sq = |m: &CoefficientMatrix| -> f64 { m.as_slice().iter().map(|x| x * x).sum() };
    let shared = |m: &CoefficientMatrix| -> f64 {
        let k = m.n();
        let mut s = 0.0;
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if i != j && j != l && i != l {
                        s += m.get(i, j) * m.get(i, l);
                    }
                }
            }
        }
        s
    };
    let daniels = 2.0 * (row_sq(&a) * row_sq(&b) / n.powi(3)).sqrt();
    let pham2 = (2.0 * sq(&a) * sq(&b) / (n * n)).sqrt();
    let pham3 = (4.0 * shared(&a) * shared(&b) / n.powi(3) + 2.0 * sq(&a) * sq(&b) / (n * n))
        .max(0.0)
        .sqrt();
    let got = |k| normalizer(&a, &b, k).unwrap();
    assert!(rel_err(got(NormalizerKind::Daniels), daniels) < 1e-12);
    assert!(rel_err(got(NormalizerKind::Pham2), pham2) < 1e-12);
    assert!(rel_err(got(NormalizerKind::Pham3), pham3) < 1e-12);
    assert!(rel_err(got(NormalizerKind::ExactSd).powi(2), exact_variance(&a, &b).unwrap()) < 1e-12);
}

#[test]
fn standardized_null_has_zero_mean_unit_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let a = random_general(6, &mut rng);
    let b = random_symmetric(6, false, &mut rng);
    let z: Vec<f64> = naive_null(&a, &b)
        .iter()
        .map(|&g| standardize(g, &a, &b, NormalizerKind::ExactSd).unwrap())
        .collect();
    assert!(raw_moment(&z, 1).abs() < 1e-9);
    assert!((raw_moment(&z, 2) - 1.0).abs() < 1e-9);
}

#[test]
fn degenerate_pair_is_flagged_and_refused() {
    let n = 6;
    let a = CoefficientMatrix::from_fn(n, SymmetryClass::Symmetric, true, |i, j| (i != j) as u8 as f64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let b = random_symmetric(n, true, &mut rng);
    let r = moment_report(&a, &b).unwrap();
    assert!(r.degenerate);
    assert_eq!(r.variance, 0.0);
    assert!(matches!(
        standardize(1.0, &a, &b, NormalizerKind::ExactSd),
        Err(Error::Degenerate(_))
    ));
    // theorem normalizers still divide the raw statistic
    assert!(standardize(1.0, &a, &b, NormalizerKind::Pham2).is_ok());
}

#[test]
fn scaling_report_agrees_with_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let a = random_symmetric(5, true, &mut rng);
    let b = random_symmetric(5, true, &mut rng);
    let null = naive_null(&a, &b);
    let cap = EnumerationCap::default();
    let report = moment_scaling_report(&a, &b, 4, cap).unwrap();
    let unit = 5f64.powf(1.5) * a.max_abs() * b.max_abs();
    for s in &report {
        let want = raw_moment(&null, s.order as i32);
        assert!(rel_err(s.moment, want) < 1e-9);
        assert!(rel_err(s.scaled, want / unit.powi(s.order as i32)) < 1e-9);
    }
    assert!(moment_scaling_report(&a, &b, 7, cap).is_err());
    let mut lib = enumerate_exact(&a, &b, cap).unwrap().values;
    let mut mine = null.clone();
    lib.sort_by(f64::total_cmp);
    mine.sort_by(f64::total_cmp);
    for (x, y) in lib.iter().zip(&mine) {
        assert!((x - y).abs() < 1e-12);
    }
}
