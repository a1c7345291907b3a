//! C ABI for `permcorr`.
//!
//! Matrices and null distributions are opaque handles created by the
//! `pc_*_new` / builder functions and released with the matching `_free`.
//! Every function returns a [`PcStatus`]; on failure the message is kept
//! per thread and read with [`pc_last_error`]. Results come back through
//! out-pointers. Panics never cross the boundary.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use permcorr::builders::{
    abs_label_diff, centered_distance_matrix, kernel_matrix, mmd_label_matrix, mst_adjacency, rank_diff_matrix,
    sign_diff_matrix, weighted_label_matrix, Bandwidth, LabelVector, PRule, Sample,
};
use permcorr::conditions::{applicable_theorems, diagnose};
use permcorr::engine::{enumerate_exact, ks_normal, p_value, sample_null, EnumerationCap, NullDistribution, Sidedness};
use permcorr::{
    exact_mean, exact_second_moment_any, exact_variance, gamma, moment_report, normalizer, standardize,
    CoefficientMatrix, Error, NormalizerKind, Permutation, SymmetryClass,
};

/// Opaque coefficient matrix.
pub struct PcMatrix(CoefficientMatrix);

/// Opaque exact or sampled permutation null.
pub struct PcNullDistribution(NullDistribution);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeMismatch = 3,
    SymmetryViolation = 4,
    HollowViolation = 5,
    NonFinite = 6,
    RequiresSymmetric = 7,
    Degenerate = 8,
    CapExceeded = 9,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcSymmetry {
    Symmetric = 0,
    Antisymmetric = 1,
    General = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcNormalizer {
    ExactSd = 0,
    Daniels = 1,
    Pham2 = 2,
    Pham3 = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PcSidedness {
    Greater = 0,
    Less = 1,
    TwoSided = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PcMomentReport {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
    pub normalizer_daniels: f64,
    pub normalizer_pham2: f64,
    pub normalizer_pham3: f64,
    pub degenerate: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> PcStatus {
    match e {
        Error::SizeMismatch(..) | Error::Dimension { .. } => PcStatus::SizeMismatch,
        Error::SymmetryViolation { .. } => PcStatus::SymmetryViolation,
        Error::HollowViolation { .. } => PcStatus::HollowViolation,
        Error::NonFinite { .. } => PcStatus::NonFinite,
        Error::RequiresSymmetric(_) => PcStatus::RequiresSymmetric,
        Error::Degenerate(_) => PcStatus::Degenerate,
        Error::CapExceeded { .. } => PcStatus::CapExceeded,
        _ => PcStatus::InvalidArgument,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> PcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            PcStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            PcStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            PcStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn view<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn boxed_matrix(m: CoefficientMatrix) -> *mut PcMatrix {
    Box::into_raw(Box::new(PcMatrix(m)))
}

fn kind(k: PcNormalizer) -> NormalizerKind {
    match k {
        PcNormalizer::ExactSd => NormalizerKind::ExactSd,
        PcNormalizer::Daniels => NormalizerKind::Daniels,
        PcNormalizer::Pham2 => NormalizerKind::Pham2,
        PcNormalizer::Pham3 => NormalizerKind::Pham3,
    }
}

unsafe fn sample_from(points: *const f64, n: usize, dim: usize) -> Result<Sample, Fail> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()).into());
    }
    let flat = view(points, n * dim, "points")?;
    Ok(Sample::new(flat.chunks(dim).map(|c| c.to_vec()).collect())?)
}

unsafe fn labels_from(labels: *const u8, n: usize) -> Result<LabelVector, Fail> {
    Ok(LabelVector::new(view(labels, n, "labels")?.to_vec())?)
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next `pc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn pc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies an `n × n` row-major array into a new matrix after validating
/// the declared symmetry and hollowness.
#[no_mangle]
pub unsafe extern "C" fn pc_matrix_new(
    n: usize,
    data: *const f64,
    symmetry: PcSymmetry,
    hollow: bool,
    out_matrix: *mut *mut PcMatrix,
) -> PcStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        let class = match symmetry {
            PcSymmetry::Symmetric => SymmetryClass::Symmetric,
            PcSymmetry::Antisymmetric => SymmetryClass::Antisymmetric,
            PcSymmetry::General => SymmetryClass::General,
        };
        let values = view(data, n.saturating_mul(n), "data")?.to_vec();
        *slot = boxed_matrix(CoefficientMatrix::from_row_major(n, values, class, hollow)?);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pc_matrix_free(matrix: *mut PcMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

#[no_mangle]
pub unsafe extern "C" fn pc_matrix_order(matrix: *const PcMatrix, out_n: *mut usize) -> PcStatus {
    guard(|| {
        *out(out_n, "out_n")? = deref(matrix, "matrix")?.0.n();
        Ok(())
    })
}

/// Copies the `n²` entries, row-major, into `buffer` of length `len`.
#[no_mangle]
pub unsafe extern "C" fn pc_matrix_copy(matrix: *const PcMatrix, buffer: *mut f64, len: usize) -> PcStatus {
    guard(|| {
        let m = &deref(matrix, "matrix")?.0;
        let src = m.as_slice();
        if len < src.len() {
            return Err(Error::SizeMismatch(len, src.len()).into());
        }
        if buffer.is_null() {
            return Err(Fail::Null("buffer"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buffer, src.len());
        Ok(())
    })
}

/// Γ under the 0-based permutation `perm` of length `n`.
#[no_mangle]
pub unsafe extern "C" fn pc_gamma(
    a: *const PcMatrix,
    b: *const PcMatrix,
    perm: *const usize,
    n: usize,
    out_value: *mut f64,
) -> PcStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        let p = Permutation::new(view(perm, n, "perm")?.to_vec())?;
        *out(out_value, "out_value")? = gamma(&a.0, &b.0, &p)?;
        Ok(())
    })
}

/// Exact permutation mean of Γ.
#[no_mangle]
pub unsafe extern "C" fn pc_exact_mean(a: *const PcMatrix, b: *const PcMatrix, out_value: *mut f64) -> PcStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        *out(out_value, "out_value")? = exact_mean(&a.0, &b.0)?;
        Ok(())
    })
}
/// Exact permutation second moment of Γ, any symmetry class.
#[no_mangle]
pub unsafe extern "C" fn pc_exact_second_moment(a: *const PcMatrix, b: *const PcMatrix, out_value: *mut f64) -> PcStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        *out(out_value, "out_value")? = exact_second_moment_any(&a.0, &b.0)?;
        Ok(())
    })
}
/// Exact permutation variance; 0 when degenerate.
#[no_mangle]
pub unsafe extern "C" fn pc_exact_variance(a: *const PcMatrix, b: *const PcMatrix, out_value: *mut f64) -> PcStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        *out(out_value, "out_value")? = exact_variance(&a.0, &b.0)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pc_normalizer(
    a: *const PcMatrix,
    b: *const PcMatrix,
    normalizer_kind: PcNormalizer,
    out_value: *mut f64,
) -> PcStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        *out(out_value, "out_value")? = normalizer(&a.0, &b.0, kind(normalizer_kind))?;
        Ok(())
    })
}

/// `exact_sd` centers at the exact mean; theorem normalizers divide raw Γ.
#[no_mangle]
pub unsafe extern "C" fn pc_standardize(
    gamma_obs: f64,
    a: *const PcMatrix,
    b: *const PcMatrix,
    normalizer_kind: PcNormalizer,
    out_value: *mut f64,
) -> PcStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        *out(out_value, "out_value")? = standardize(gamma_obs, &a.0, &b.0, kind(normalizer_kind))?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pc_moment_report(
    a: *const PcMatrix,
    b: *const PcMatrix,
    out_report: *mut PcMomentReport,
) -> PcStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        let r = moment_report(&a.0, &b.0)?;
        *out(out_report, "out_report")? = PcMomentReport {
            mean: r.mean,
            second_moment: r.second_moment,
            variance: r.variance,
            normalizer_daniels: r.normalizer_daniels,
            normalizer_pham2: r.normalizer_pham2,
            normalizer_pham3: r.normalizer_pham3,
            degenerate: r.degenerate,
        };
        Ok(())
    })
}

/// All N! values of Γ. `cap` of 0 means the default (8); at most 9.
#[no_mangle]
pub unsafe extern "C" fn pc_enumerate_exact(
    a: *const PcMatrix,
    b: *const PcMatrix,
    cap: usize,
    out_null: *mut *mut PcNullDistribution,
) -> PcStatus {
    guard(|| {
        let slot = out(out_null, "out_null")?;
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        let cap = if cap == 0 { EnumerationCap::default() } else { EnumerationCap::new(cap)? };
        *slot = Box::into_raw(Box::new(PcNullDistribution(enumerate_exact(&a.0, &b.0, cap)?)));
        Ok(())
    })
}

/// Monte Carlo null. `workers` of 0 uses the global pool; the values do
/// not depend on it.
#[no_mangle]
pub unsafe extern "C" fn pc_sample_null(
    a: *const PcMatrix,
    b: *const PcMatrix,
    draws: u64,
    seed: u64,
    workers: usize,
    out_null: *mut *mut PcNullDistribution,
) -> PcStatus {
    guard(|| {
        let slot = out(out_null, "out_null")?;
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        let w = (workers > 0).then_some(workers);
        *slot = Box::into_raw(Box::new(PcNullDistribution(sample_null(&a.0, &b.0, draws, seed, w)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pc_null_free(null: *mut PcNullDistribution) {
    if !null.is_null() {
        drop(Box::from_raw(null));
    }
}

#[no_mangle]
pub unsafe extern "C" fn pc_null_len(null: *const PcNullDistribution, out_len: *mut usize) -> PcStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(null, "null")?.0.values.len();
        Ok(())
    })
}

/// Copies the null values into `buffer` of length `len` (at least
/// `pc_null_len`).
#[no_mangle]
pub unsafe extern "C" fn pc_null_values(null: *const PcNullDistribution, buffer: *mut f64, len: usize) -> PcStatus {
    guard(|| {
        let v = &deref(null, "null")?.0.values;
        if len < v.len() {
            return Err(Error::SizeMismatch(len, v.len()).into());
        }
        if buffer.is_null() {
            return Err(Fail::Null("buffer"));
        }
        ptr::copy_nonoverlapping(v.as_ptr(), buffer, v.len());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pc_null_p_value(
    null: *const PcNullDistribution,
    gamma_obs: f64,
    sidedness: PcSidedness,
    out_value: *mut f64,
) -> PcStatus {
    guard(|| {
        let side = match sidedness {
            PcSidedness::Greater => Sidedness::Greater,
            PcSidedness::Less => Sidedness::Less,
            PcSidedness::TwoSided => Sidedness::TwoSided,
        };
        *out(out_value, "out_value")? = p_value(&deref(null, "null")?.0, gamma_obs, side);
        Ok(())
    })
}

/// KS distance of the null, standardized by `normalizer_kind`, from N(0, 1).
#[no_mangle]
pub unsafe extern "C" fn pc_ks_normal(
    null: *const PcNullDistribution,
    a: *const PcMatrix,
    b: *const PcMatrix,
    normalizer_kind: PcNormalizer,
    out_value: *mut f64,
) -> PcStatus {
    guard(|| {
        let d = deref(null, "null")?;
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        *out(out_value, "out_value")? = ks_normal(&d.0, &a.0, &b.0, kind(normalizer_kind))?;
        Ok(())
    })
}

/// `sign(x_i − x_j)`.
#[no_mangle]
pub unsafe extern "C" fn pc_sign_diff_matrix(values: *const f64, n: usize, out_matrix: *mut *mut PcMatrix) -> PcStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        *slot = boxed_matrix(sign_diff_matrix(view(values, n, "values")?)?);
        Ok(())
    })
}
/// `rank(x_i) − rank(x_j)` with midranks for ties.
#[no_mangle]
pub unsafe extern "C" fn pc_rank_diff_matrix(values: *const f64, n: usize, out_matrix: *mut *mut PcMatrix) -> PcStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        *slot = boxed_matrix(rank_diff_matrix(view(values, n, "values")?)?);
        Ok(())
    })
}

/// Euclidean MST adjacency of `n` row-major points in `dim` dimensions.
#[no_mangle]
pub unsafe extern "C" fn pc_mst_adjacency(
    points: *const f64,
    n: usize,
    dim: usize,
    out_matrix: *mut *mut PcMatrix,
) -> PcStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        *slot = boxed_matrix(mst_adjacency(&sample_from(points, n, dim)?)?);
        Ok(())
    })
}
/// Pairwise distances minus their mean, hollow.
#[no_mangle]
pub unsafe extern "C" fn pc_centered_distance_matrix(
    points: *const f64,
    n: usize,
    dim: usize,
    out_matrix: *mut *mut PcMatrix,
) -> PcStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        *slot = boxed_matrix(centered_distance_matrix(&sample_from(points, n, dim)?)?);
        Ok(())
    })
}

/// Gaussian kernel; `bandwidth <= 0` selects the median heuristic.
#[no_mangle]
pub unsafe extern "C" fn pc_kernel_matrix(
    points: *const f64,
    n: usize,
    dim: usize,
    bandwidth: f64,
    out_matrix: *mut *mut PcMatrix,
) -> PcStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        let bw = if bandwidth > 0.0 { Bandwidth::Fixed(bandwidth) } else { Bandwidth::Median };
        *slot = boxed_matrix(kernel_matrix(&sample_from(points, n, dim)?, bw, false)?);
        Ok(())
    })
}

/// MMD label contrast for 0/1 labels.
#[no_mangle]
pub unsafe extern "C" fn pc_mmd_label_matrix(labels: *const u8, n: usize, out_matrix: *mut *mut PcMatrix) -> PcStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        *slot = boxed_matrix(mmd_label_matrix(&labels_from(labels, n)?)?);
        Ok(())
    })
}
/// `|y_i − y_j|` for 0/1 labels.
#[no_mangle]
pub unsafe extern "C" fn pc_abs_label_diff(labels: *const u8, n: usize, out_matrix: *mut *mut PcMatrix) -> PcStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        *slot = boxed_matrix(abs_label_diff(&labels_from(labels, n)?)?);
        Ok(())
    })
}

/// Weighted label matrix; `p < 0` selects `p = m / N`.
#[no_mangle]
pub unsafe extern "C" fn pc_weighted_label_matrix(
    labels: *const u8,
    n: usize,
    p: f64,
    out_matrix: *mut *mut PcMatrix,
) -> PcStatus {
    guard(|| {
        let slot = out(out_matrix, "out_matrix")?;
        let rule = if p < 0.0 { PRule::MOverN } else { PRule::Explicit(p) };
        *slot = boxed_matrix(weighted_label_matrix(&labels_from(labels, n)?, rule)?);
        Ok(())
    })
}

/// Condition reports for every theorem applicable to `(a, b)`, as a JSON
/// array. Release the string with [`pc_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pc_diagnose_json(
    a: *const PcMatrix,
    b: *const PcMatrix,
    out_json: *mut *mut c_char,
) -> PcStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        let reports = applicable_theorems(&a.0, &b.0)
            .into_iter()
            .map(|t| diagnose(&a.0, &b.0, t))
            .collect::<Result<Vec<_>, _>>()?;
        let text = serde_json::to_string(&reports).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        *slot = CString::new(text).map_err(|e| Error::InvalidArgument(e.to_string()))?.into_raw();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn pc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
