//! Permutation inference for generalized correlation coefficients
//! `Γ = Σ_i Σ_j a_ij b_{π(i)π(j)}`.
//!
//! * [`matrix`]: coefficient matrices, permutations, Γ and the
//!   distinct-subscript sum kernels.
//! * [`moments`]: exact permutation mean and second moment, normalizers.
//! * [`conditions`]: prime/star transforms and condition diagnostics.
//! * [`builders`]: `a` and `b` for rank, graph, kernel and label statistics.
//! * [`engine`]: exact enumeration and seeded Monte Carlo null, KS distance,
//!   p-values.
//! * [`sweep`], [`oracle`], [`report`]: orchestration used by the CLI.

pub mod builders;
pub mod conditions;
pub mod engine;
pub mod error;
pub mod io;
pub mod matrix;
pub mod moments;
pub mod oracle;
pub mod report;
pub mod statistic;
pub mod sweep;

pub use error::{Error, Result};
pub use matrix::{
    apply_permutation, elementary_sums, gamma, restricted_sum, CoefficientMatrix, DistinctSumPattern,
    ElementarySums, Permutation, SymmetryClass,
};
pub use moments::{
    exact_mean, exact_second_moment, exact_second_moment_any, exact_variance, moment_report, normalizer,
    standardize, MomentReport, NormalizerKind,
};
