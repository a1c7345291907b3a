mod common;

use common::*;
use permcorr::{elementary_sums, restricted_sum, DistinctSumPattern};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn assert_matches_naive(a: &permcorr::CoefficientMatrix) {
    let naive = naive_restricted_sums(a);
    let scale = a.max_abs().powi(2) * (a.n() as f64).powi(4);
    for (p, want) in DistinctSumPattern::ALL.iter().zip(naive) {
        let got = restricted_sum(a, *p);
        assert!(
            (got - want).abs() <= 1e-11 * scale,
            "{p:?} n={}: {got} vs {want}",
            a.n()
        );
    }
}

#[test]
fn kernels_match_loops_for_every_class_and_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=7 {
        for _ in 0..5 {
            assert_matches_naive(&random_general(n, &mut rng));
            assert_matches_naive(&random_symmetric(n, false, &mut rng));
            assert_matches_naive(&random_symmetric(n, true, &mut rng));
            assert_matches_naive(&random_antisymmetric(n, &mut rng));
        }
    }
}

#[test]
fn patterns_vanish_below_their_subscript_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_general(3, &mut rng);
    assert_eq!(restricted_sum(&a, DistinctSumPattern::P4), 0.0);
    assert!(restricted_sum(&a, DistinctSumPattern::P3Shared) != 0.0);
}

#[test]
fn elementary_sums_by_hand() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_general(6, &mut rng);
    let e = elementary_sums(&a);
    let n = a.n();
    let (mut s, mut d, mut q, mut t) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        d += a.get(i, i);
        for j in 0..n {
            if i != j {
                s += a.get(i, j);
                q += a.get(i, j).powi(2);
            }
            for k in 0..n {
                t += a.get(i, j) * a.get(i, k);
            }
        }
    }
    assert!((e.sum_offdiag - s).abs() < 1e-12);
    assert!((e.sum_diag - d).abs() < 1e-12);
    assert!((e.sum_sq_offdiag - q).abs() < 1e-12);
    assert!((e.triple_sum - t).abs() < 1e-11);
    for i in 0..n {
        let r: f64 = (0..n).map(|j| a.get(i, j)).sum();
        let c: f64 = (0..n).map(|j| a.get(j, i)).sum();
        assert!((e.row_sums[i] - r).abs() < 1e-12);
        assert!((e.col_sums[i] - c).abs() < 1e-12);
    }
}
