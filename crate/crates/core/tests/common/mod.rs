//! Independent reference implementations. Nothing here calls the library's
//! kernels, enumerator or moment formulas.
#![allow(dead_code)]

use permcorr::{CoefficientMatrix, SymmetryClass};
use rand::Rng;

/// Lexicographic successor; false once `p` is the last permutation.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

pub fn naive_gamma(a: &CoefficientMatrix, b: &CoefficientMatrix, p: &[usize]) -> f64 {
    let n = a.n();
    let mut g = 0.0;
    for i in 0..n {
        for j in 0..n {
            g += a.get(i, j) * b.get(p[i], p[j]);
        }
    }
    g
}

/// Γ over all N! permutations in lexicographic order.
pub fn naive_null(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Vec<f64> {
    all_permutations(a.n()).iter().map(|p| naive_gamma(a, b, p)).collect()
}

pub fn raw_moment(values: &[f64], order: i32) -> f64 {
    values.iter().map(|v| v.powi(order)).sum::<f64>() / values.len() as f64
}

/// Direct distinctness-checked sums, in the order
/// P4, P3Shared, P3Diag, P2Sq, P2Diag2, P2Mixed, P1.
pub fn naive_restricted_sums(a: &CoefficientMatrix) -> [f64; 7] {
    let n = a.n();
    let x = |i: usize, j: usize| a.get(i, j);
    let mut s = [0.0; 7];
    for i in 0..n {
        s[6] += x(i, i) * x(i, i);
        for j in 0..n {
            if j == i {
                continue;
            }
            s[3] += x(i, j) * x(i, j);
            s[4] += x(i, i) * x(j, j);
            s[5] += x(i, i) * x(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                s[1] += x(i, j) * x(i, k);
                s[2] += x(i, i) * x(j, k);
                for l in 0..n {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    s[0] += x(i, j) * x(k, l);
                }
            }
        }
    }
    s
}

pub fn uniform<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(-1.0..=1.0)
}

pub fn random_symmetric<R: Rng>(n: usize, hollow: bool, rng: &mut R) -> CoefficientMatrix {
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        if !hollow {
            d[i * n + i] = uniform(rng);
        }
        for j in (i + 1)..n {
            let v = uniform(rng);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    CoefficientMatrix::from_row_major(n, d, SymmetryClass::Symmetric, hollow).unwrap()
}

pub fn random_antisymmetric<R: Rng>(n: usize, rng: &mut R) -> CoefficientMatrix {
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = uniform(rng);
            d[i * n + j] = v;
            d[j * n + i] = -v;
        }
    }
    CoefficientMatrix::from_row_major(n, d, SymmetryClass::Antisymmetric, true).unwrap()
}

pub fn random_general<R: Rng>(n: usize, rng: &mut R) -> CoefficientMatrix {
    let d = (0..n * n).map(|_| uniform(rng)).collect();
    CoefficientMatrix::from_row_major(n, d, SymmetryClass::General, false).unwrap()
}

pub fn rel_err(x: f64, reference: f64) -> f64 {
    let s = x.abs().max(reference.abs());
    if s == 0.0 {
        0.0
    } else {
        (x - reference).abs() / s
    }
}
