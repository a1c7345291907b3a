//! Coefficient matrices, permutations, the statistic
//! `Γ = Σ_i Σ_j a_ij b_{π(i)π(j)}`, and the distinct-subscript sum kernels
//! the moment formulas are built from.
//!
//! Indices are 0-based in the API; error messages and reports print them
//! 1-based.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declared structure of a coefficient matrix. Validation is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryClass {
    Symmetric,
    Antisymmetric,
    General,
}

impl SymmetryClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryClass::Symmetric => "symmetric",
            SymmetryClass::Antisymmetric => "antisymmetric",
            SymmetryClass::General => "general",
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A validated dense `N × N` matrix of real coefficients, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientMatrix {
    n: usize,
    data: Vec<f64>,
    class: SymmetryClass,
    hollow: bool,
}

impl CoefficientMatrix {
    /// Builds a matrix from nested rows, validating shape, finiteness, the
    /// declared symmetry class and the hollow flag.
    pub fn new(rows: Vec<Vec<f64>>, class: SymmetryClass, hollow: bool) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        let mut data = Vec::with_capacity(n * n);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != n {
                return Err(Error::Dimension {
                    rows: n,
                    row: row + 1,
                    cols: r.len(),
                });
            }
            data.extend(r);
        }
        Self::from_row_major(n, data, class, hollow)
    }

    pub fn from_row_major(
        n: usize,
        data: Vec<f64>,
        class: SymmetryClass,
        hollow: bool,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooSmall(n));
        }
        if data.len() != n * n {
            return Err(Error::SizeMismatch(data.len(), n * n));
        }
        let m = CoefficientMatrix {
            n,
            data,
            class,
            hollow,
        };
        m.validate()?;
        Ok(m)
    }

    /// Builds an `n × n` matrix by evaluating `f(i, j)` on every cell.
    pub fn from_fn(
        n: usize,
        class: SymmetryClass,
        hollow: bool,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self::from_row_major(n, data, class, hollow)
    }

    /// Zero matrix: symmetric, hollow.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_row_major(n, vec![0.0; n * n], SymmetryClass::Symmetric, true)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if !self.get(i, j).is_finite() {
                    return Err(Error::NonFinite { i: i + 1, j: j + 1 });
                }
            }
        }
        match self.class {
            SymmetryClass::General => {}
            SymmetryClass::Symmetric => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        let (x, y) = (self.get(i, j), self.get(j, i));
                        if x != y {
                            return Err(Error::SymmetryViolation {
                                class: "symmetric",
                                i: i + 1,
                                j: j + 1,
                                aij: x,
                                aji: y,
                            });
                        }
                    }
                }
            }
            SymmetryClass::Antisymmetric => {
                for i in 0..n {
                    for j in i..n {
                        let (x, y) = (self.get(i, j), self.get(j, i));
                        if x != -y {
                            return Err(Error::SymmetryViolation {
                                class: "antisymmetric",
                                i: i + 1,
                                j: j + 1,
                                aij: x,
                                aji: y,
                            });
                        }
                    }
                }
            }
        }
        if self.hollow {
            for i in 0..n {
                let d = self.get(i, i);
                if d != 0.0 {
                    return Err(Error::HollowViolation { i: i + 1, value: d });
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn symmetry_class(&self) -> SymmetryClass {
        self.class
    }

    pub fn is_hollow(&self) -> bool {
        self.hollow
    }

    /// Whether the diagonal is zero, regardless of the declared flag.
    pub fn has_zero_diagonal(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Entrywise scaling; the symmetry class and hollow flag carry over.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_row_major(
            self.n,
            self.data.iter().map(|x| c * x).collect(),
            self.class,
            self.hollow,
        )
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Σ over all (i, j).
    pub fn total_sum(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// A bijection on `{0, …, N−1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    /// Validates a 0-based mapping.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &p in &mapping {
            if p >= n {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("index {} out of range", p + 1),
                });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidPermutation {
                    n,
                    reason: format!("index {} repeated", p + 1),
                });
            }
        }
        Ok(Permutation { mapping })
    }

    /// Validates a 1-based mapping such as `[2, 3, 1]`.
    pub fn from_one_based(mapping: &[usize]) -> Result<Self> {
        let n = mapping.len();
        let zero = mapping
            .iter()
            .map(|&p| {
                p.checked_sub(1).ok_or_else(|| Error::InvalidPermutation {
                    n,
                    reason: "index 0 in 1-based mapping".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero)
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            mapping: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &p) in self.mapping.iter().enumerate() {
            inv[p] = i;
        }
        Permutation { mapping: inv }
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.mapping.iter().map(|p| p + 1).collect()
    }
}

fn check_sizes(a: &CoefficientMatrix, b: &CoefficientMatrix) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// `Γ = Σ_i Σ_j a_ij b_{π(i)π(j)}`, diagonal terms included.
pub fn gamma(a: &CoefficientMatrix, b: &CoefficientMatrix, perm: &Permutation) -> Result<f64> {
    check_sizes(a, b)?;
    if perm.len() != a.n() {
        return Err(Error::SizeMismatch(a.n(), perm.len()));
    }
    Ok(gamma_unchecked(a, b, perm.as_slice()))
}

#[inline]
pub(crate) fn gamma_unchecked(a: &CoefficientMatrix, b: &CoefficientMatrix, perm: &[usize]) -> f64 {
    let mut total = 0.0;
    for (i, &pi) in perm.iter().enumerate() {
        let arow = a.row(i);
        let brow = b.row(pi);
        let mut acc = 0.0;
        for (&aij, &pj) in arow.iter().zip(perm) {
            acc += aij * brow[pj];
        }
        total += acc;
    }
    total
}

/// Relabels `b`: the result has entries `c_ij = b_{π(i)π(j)}`.
pub fn apply_permutation(b: &CoefficientMatrix, perm: &Permutation) -> Result<CoefficientMatrix> {
    if perm.len() != b.n() {
        return Err(Error::SizeMismatch(b.n(), perm.len()));
    }
    let n = b.n();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        let row = b.row(perm.apply(i));
        data.extend(perm.as_slice().iter().map(|&pj| row[pj]));
    }
    CoefficientMatrix::from_row_major(n, data, b.symmetry_class(), b.is_hollow())
}

/// Sums that the condition checks and normalizers are built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ElementarySums {
    /// Σ_{i≠j} a_ij
    pub sum_offdiag: f64,
    /// Σ_i a_ii
    pub sum_diag: f64,
    /// Σ_{i≠j} a_ij²
    pub sum_sq_offdiag: f64,
    /// Σ_j a_ij, diagonal included.
    pub row_sums: Vec<f64>,
    /// Σ_i a_ij, diagonal included.
    pub col_sums: Vec<f64>,
    /// Σ_{i,j,k} a_ij a_ik over all triples, i.e. Σ_i (row sum)².
    pub triple_sum: f64,
    pub max_abs: f64,
}

impl ElementarySums {
    /// Σ_{i,j} a_ij², diagonal included.
    pub fn sum_sq(&self, a: &CoefficientMatrix) -> f64 {
        self.sum_sq_offdiag + (0..a.n()).map(|i| a.get(i, i).powi(2)).sum::<f64>()
    }
}

pub fn elementary_sums(a: &CoefficientMatrix) -> ElementarySums {
    let n = a.n();
    let mut row_sums = vec![0.0; n];
    let mut col_sums = vec![0.0; n];
    let mut sum_offdiag = 0.0;
    let mut sum_diag = 0.0;
    let mut sum_sq_offdiag = 0.0;
    for i in 0..n {
        for (j, &x) in a.row(i).iter().enumerate() {
            row_sums[i] += x;
            col_sums[j] += x;
            if i == j {
                sum_diag += x;
            } else {
                sum_offdiag += x;
                sum_sq_offdiag += x * x;
            }
        }
    }
    let triple_sum = row_sums.iter().map(|r| r * r).sum();
    ElementarySums {
        sum_offdiag,
        sum_diag,
        sum_sq_offdiag,
        row_sums,
        col_sums,
        triple_sum,
        max_abs: a.max_abs(),
    }
}

/// Sums over index tuples whose subscripts are pairwise distinct, named by
/// the product they range over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistinctSumPattern {
    /// Σ′ a_jk a_su over distinct j, k, s, u.
    P4,
    /// Σ′ a_jk a_ju over distinct j, k, u.
    P3Shared,
    /// Σ′ a_jj a_su over distinct j, s, u.
    P3Diag,
    /// Σ′ a_jk² over j ≠ k.
    P2Sq,
    /// Σ′ a_jj a_ss over j ≠ s.
    P2Diag2,
    /// Σ′ a_jj a_ju over j ≠ u.
    P2Mixed,
    /// Σ a_jj².
    P1,
}

impl DistinctSumPattern {
    pub const ALL: [DistinctSumPattern; 7] = [
        DistinctSumPattern::P4,
        DistinctSumPattern::P3Shared,
        DistinctSumPattern::P3Diag,
        DistinctSumPattern::P2Sq,
        DistinctSumPattern::P2Diag2,
        DistinctSumPattern::P2Mixed,
        DistinctSumPattern::P1,
    ];

    /// Number of distinct subscripts in the pattern.
    pub fn subscripts(self) -> usize {
        match self {
            DistinctSumPattern::P4 => 4,
            DistinctSumPattern::P3Shared | DistinctSumPattern::P3Diag => 3,
            DistinctSumPattern::P2Sq | DistinctSumPattern::P2Diag2 | DistinctSumPattern::P2Mixed => 2,
            DistinctSumPattern::P1 => 1,
        }
    }
}

/// O(N²) building blocks for every distinct-subscript sum. Row and column
/// sums here are off-diagonal only.
#[derive(Debug, Clone)]
pub(crate) struct KernelSums {
    pub n: usize,
    /// Σ_{j≠k} a_jk
    pub s: f64,
    /// Σ_j a_jj
    pub d: f64,
    /// Σ_j a_jj²
    pub dd: f64,
    /// Σ_{j≠k} a_jk²
    pub q: f64,
    /// Σ_{j≠k} a_jk a_kj
    pub qt: f64,
    /// Σ_j r_j²
    pub rr: f64,
    /// Σ_j c_j²
    pub cc: f64,
    /// Σ_j r_j c_j
    pub rc: f64,
    /// Σ_j a_jj r_j
    pub dr: f64,
    /// Σ_j a_jj c_j
    pub dc: f64,
    /// Σ_j a_jj (r_j + c_j)
    pub d_rc: f64,
}

impl KernelSums {
    pub fn of(a: &CoefficientMatrix) -> Self {
        let n = a.n();
        let mut r = vec![0.0; n];
        let mut c = vec![0.0; n];
        let (mut s, mut q, mut qt) = (0.0, 0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                if j == k {
                    continue;
                }
                let x = a.get(j, k);
                r[j] += x;
                c[k] += x;
                s += x;
                q += x * x;
                qt += x * a.get(k, j);
            }
        }
        let diag: Vec<f64> = (0..n).map(|j| a.get(j, j)).collect();
        let d = diag.iter().sum();
        let dd = diag.iter().map(|x| x * x).sum();
        let rr = r.iter().map(|x| x * x).sum();
        let cc = c.iter().map(|x| x * x).sum();
        let rc = r.iter().zip(&c).map(|(x, y)| x * y).sum();
        let dr = diag.iter().zip(&r).map(|(x, y)| x * y).sum();
        let dc = diag.iter().zip(&c).map(|(x, y)| x * y).sum();
        let d_rc = dr + dc;
        KernelSums {
            n,
            s,
            d,
            dd,
            q,
            qt,
            rr,
            cc,
            rc,
            dr,
            dc,
            d_rc,
        }
    }

    pub fn pattern(&self, pattern: DistinctSumPattern) -> f64 {
        if self.n < pattern.subscripts() {
            return 0.0;
        }
        match pattern {
            // Σ_{j≠k} Σ_{s≠u} minus every overlap of {s,u} with {j,k}.
            DistinctSumPattern::P4 => {
                self.s * self.s - (self.rr + 2.0 * self.rc + self.cc) + self.q + self.qt
            }
            DistinctSumPattern::P3Shared => self.rr - self.q,
            DistinctSumPattern::P3Diag => self.d * self.s - self.d_rc,
            DistinctSumPattern::P2Sq => self.q,
            DistinctSumPattern::P2Diag2 => self.d * self.d - self.dd,
            DistinctSumPattern::P2Mixed => self.dr,
            DistinctSumPattern::P1 => self.dd,
        }
    }
}

/// Distinct-subscript sum for `pattern`, in O(N²) by inclusion–exclusion.
/// Patterns needing more subscripts than `N` give the empty sum, 0.
pub fn restricted_sum(a: &CoefficientMatrix, pattern: DistinctSumPattern) -> f64 {
    KernelSums::of(a).pattern(pattern)
}
