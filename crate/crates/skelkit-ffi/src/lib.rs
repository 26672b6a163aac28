//! C ABI for the skelkit toolkit: opaque handles, status codes, and a
//! cbindgen-generated header (`include/skelkit.h`).
//!
//! Conventions:
//! * Every fallible call returns an [`SkStatus`]; results come back through
//!   out-pointers. `sk_last_error_message` returns a thread-local,
//!   NUL-terminated description of the most recent failure.
//! * Dense matrix buffers cross the boundary in row-major order.
//! * Handles are created and released by matching `sk_*_free` calls; passing
//!   a handle after freeing it is undefined behavior, as in any C API.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::{DMatrix, DVector};

use skelkit::embed::EmbedKind;
use skelkit::error::Error;
use skelkit::factors::{self, Factors, Norm};
use skelkit::matsource::{self, MatrixSource, SnnSpec};
use skelkit::skeleton::SkeletonSet;

/// Status code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    RankDeficient = 4,
    Singular = 5,
    Instability = 6,
    FormatError = 7,
    ConfigError = 8,
    BudgetExceeded = 9,
    IoError = 10,
    Utf8Error = 11,
    BufferTooSmall = 12,
    NotAvailable = 13,
    Panic = 14,
}

/// Skeleton selection algorithm.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkAlgorithm {
    RandLupp = 0,
    RandLupp1piter = 1,
    RandCpqr = 2,
    RandCpqr1piter = 3,
    RsvdDeim = 4,
    RsvdLs = 5,
    StreamingLupp = 6,
    StreamingCpqr = 7,
}

/// Error norm for evaluations.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkNorm {
    Frobenius = 0,
    Spectral = 1,
}

/// Opaque matrix handle.
pub struct SkMatrix {
    inner: MatrixSource,
}

/// Opaque skeleton-set handle.
pub struct SkSkeleton {
    inner: SkeletonSet,
}

/// Opaque factorization handle.
pub struct SkFactors {
    inner: Factors,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap();
    });
}

fn status_of(err: &Error) -> SkStatus {
    match err {
        Error::InvalidParameter(_) => SkStatus::InvalidArgument,
        Error::DimensionMismatch(_) => SkStatus::DimensionMismatch,
        Error::RankDeficient { .. } => SkStatus::RankDeficient,
        Error::Singular(_) => SkStatus::Singular,
        Error::Instability(_) => SkStatus::Instability,
        Error::Format { .. } => SkStatus::FormatError,
        Error::Config(_) => SkStatus::ConfigError,
        Error::BudgetExceeded(_) => SkStatus::BudgetExceeded,
        Error::Io(_) => SkStatus::IoError,
    }
}

fn fail(err: Error) -> SkStatus {
    let code = status_of(&err);
    set_error(&err.to_string());
    code
}

/// Run a closure across the FFI boundary: report panics as a status code
/// instead of unwinding into C.
fn guarded(f: impl FnOnce() -> SkStatus) -> SkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            SkStatus::Panic
        }
    }
}

macro_rules! nonnull {
    ($ptr:expr, $name:literal) => {
        match unsafe { $ptr.as_ref() } {
            Some(r) => r,
            None => {
                set_error(concat!($name, " is null"));
                return SkStatus::NullPointer;
            }
        }
    };
}

unsafe fn read_c_path(path: *const c_char) -> Result<String, SkStatus> {
    if path.is_null() {
        set_error("path is null");
        return Err(SkStatus::NullPointer);
    }
    match unsafe { CStr::from_ptr(path) }.to_str() {
        Ok(s) => Ok(s.to_string()),
        Err(_) => {
            set_error("path is not valid UTF-8");
            Err(SkStatus::Utf8Error)
        }
    }
}

fn write_out<T>(out: *mut *mut T, value: T) -> SkStatus {
    if out.is_null() {
        set_error("out pointer is null");
        return SkStatus::NullPointer;
    }
    unsafe {
        *out = Box::into_raw(Box::new(value));
    }
    SkStatus::Ok
}

fn copy_str(text: &str, buf: *mut c_char, cap: usize) -> SkStatus {
    if buf.is_null() {
        set_error("buffer is null");
        return SkStatus::NullPointer;
    }
    let bytes = text.as_bytes();
    if bytes.len() + 1 > cap {
        set_error("buffer too small");
        return SkStatus::BufferTooSmall;
    }
    unsafe {
        std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, bytes.len());
        *buf.add(bytes.len()) = 0;
    }
    SkStatus::Ok
}

/// Message describing this thread's most recent failure. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create a dense matrix from a row-major buffer of `rows * cols` values.
///
/// # Safety
/// `data` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_from_dense(
    rows: usize,
    cols: usize,
    data: *const f64,
    len: usize,
    out: *mut *mut SkMatrix,
) -> SkStatus {
    guarded(|| {
        if data.is_null() {
            set_error("data is null");
            return SkStatus::NullPointer;
        }
        if len != rows * cols {
            set_error("len must equal rows * cols");
            return SkStatus::DimensionMismatch;
        }
        let slice = unsafe { std::slice::from_raw_parts(data, len) };
        let a = DMatrix::from_row_slice(rows, cols, slice);
        match MatrixSource::from_dense(a) {
            Ok(m) => write_out(out, SkMatrix { inner: m }),
            Err(e) => fail(e),
        }
    })
}

/// Create a sparse matrix from coordinate triplets (0-based indices;
/// duplicates are summed).
///
/// # Safety
/// The three arrays must each hold `nnz` readable elements and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_from_triplets(
    rows: usize,
    cols: usize,
    row_indices: *const usize,
    col_indices: *const usize,
    values: *const f64,
    nnz: usize,
    out: *mut *mut SkMatrix,
) -> SkStatus {
    guarded(|| {
        if row_indices.is_null() || col_indices.is_null() || values.is_null() {
            set_error("triplet arrays must not be null");
            return SkStatus::NullPointer;
        }
        let ri = unsafe { std::slice::from_raw_parts(row_indices, nnz) };
        let ci = unsafe { std::slice::from_raw_parts(col_indices, nnz) };
        let vals = unsafe { std::slice::from_raw_parts(values, nnz) };
        let triplets: Vec<(usize, usize, f64)> =
            (0..nnz).map(|t| (ri[t], ci[t], vals[t])).collect();
        match MatrixSource::from_triplets(rows, cols, &triplets) {
            Ok(m) => write_out(out, SkMatrix { inner: m }),
            Err(e) => fail(e),
        }
    })
}

/// Load a Matrix Market file.
///
/// # Safety
/// `path` must be a readable NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_from_matrix_market(
    path: *const c_char,
    out: *mut *mut SkMatrix,
) -> SkStatus {
    guarded(|| {
        let path = match unsafe { read_c_path(path) } {
            Ok(p) => p,
            Err(code) => return code,
        };
        match matsource::load_matrix_market(&path) {
            Ok(m) => write_out(out, SkMatrix { inner: m }),
            Err(e) => fail(e),
        }
    })
}

/// Generate a sparse non-negative synthetic matrix
/// `sum_i weights[i] x_i y_i^T` with the given factor density and seed.
///
/// # Safety
/// `weights` must point to `weights_len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_snn(
    rows: usize,
    cols: usize,
    weights: *const f64,
    weights_len: usize,
    density: f64,
    seed: u64,
    out: *mut *mut SkMatrix,
) -> SkStatus {
    guarded(|| {
        if weights.is_null() {
            set_error("weights is null");
            return SkStatus::NullPointer;
        }
        let s = unsafe { std::slice::from_raw_parts(weights, weights_len) }.to_vec();
        let spec = SnnSpec {
            r: weights_len,
            s,
            m: rows,
            n: cols,
            density,
            seed,
        };
        match matsource::snn_generate(&spec) {
            Ok(m) => write_out(out, SkMatrix { inner: m }),
            Err(e) => fail(e),
        }
    })
}

/// Row count; 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_rows(m: *const SkMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.nrows())
}

/// Column count; 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_cols(m: *const SkMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.ncols())
}

/// Stored nonzero count; 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_nnz(m: *const SkMatrix) -> usize {
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.nnz())
}

/// Completed streamed passes over the data.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_passes(m: *const SkMatrix) -> u64 {
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.passes())
}

/// Block applications of the operator or its transpose.
///
/// # Safety
/// `m` must be null or a live matrix handle.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_applies(m: *const SkMatrix) -> u64 {
    unsafe { m.as_ref() }.map_or(0, |m| m.inner.applies())
}

/// Write the matrix to a Matrix Market file.
///
/// # Safety
/// `m` must be a live matrix handle and `path` a readable NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_write_matrix_market(
    m: *const SkMatrix,
    path: *const c_char,
) -> SkStatus {
    guarded(|| {
        let m = nonnull!(m, "matrix");
        let path = match unsafe { read_c_path(path) } {
            Ok(p) => p,
            Err(code) => return code,
        };
        match matsource::write_matrix_market(&m.inner, &path) {
            Ok(()) => SkStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Release a matrix handle. Null is ignored.
///
/// # Safety
/// `m` must be null or a handle created by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_matrix_free(m: *mut SkMatrix) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

fn algorithm_id(alg: SkAlgorithm) -> skelkit::cli::AlgorithmId {
    use skelkit::cli::AlgorithmId as A;
    match alg {
        SkAlgorithm::RandLupp => A::RandLupp,
        SkAlgorithm::RandLupp1piter => A::RandLupp1piter,
        SkAlgorithm::RandCpqr => A::RandCpqr,
        SkAlgorithm::RandCpqr1piter => A::RandCpqr1piter,
        SkAlgorithm::RsvdDeim => A::RsvdDeim,
        SkAlgorithm::RsvdLs => A::RsvdLs,
        SkAlgorithm::StreamingLupp => A::StreamingLupp,
        SkAlgorithm::StreamingCpqr => A::StreamingCpqr,
    }
}

/// Select `rank` column and row skeletons with the given algorithm and
/// seed (Gaussian sketching).
///
/// # Safety
/// `m` must be a live matrix handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sk_select(
    m: *const SkMatrix,
    alg: SkAlgorithm,
    rank: usize,
    seed: u64,
    out: *mut *mut SkSkeleton,
) -> SkStatus {
    guarded(|| {
        let m = nonnull!(m, "matrix");
        match skelkit::cli::select_with_algorithm(
            &m.inner,
            algorithm_id(alg),
            rank,
            rank,
            EmbedKind::Gaussian,
            None,
            seed,
        ) {
            Ok(skel) => write_out(out, SkSkeleton { inner: skel }),
            Err(e) => fail(e),
        }
    })
}

/// Number of selected columns.
///
/// # Safety
/// `s` must be null or a live skeleton handle.
#[no_mangle]
pub unsafe extern "C" fn sk_skeleton_rank(s: *const SkSkeleton) -> usize {
    unsafe { s.as_ref() }.map_or(0, |s| s.inner.rank())
}

/// Copy the algorithm name (NUL-terminated) into `buf`.
///
/// # Safety
/// `s` must be a live skeleton handle; `buf` must be writable for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn sk_skeleton_algorithm(
    s: *const SkSkeleton,
    buf: *mut c_char,
    cap: usize,
) -> SkStatus {
    guarded(|| {
        let s = nonnull!(s, "skeleton");
        copy_str(&s.inner.algorithm, buf, cap)
    })
}

fn copy_indices(idx: &[usize], buf: *mut usize, cap: usize) -> SkStatus {
    if buf.is_null() {
        set_error("buffer is null");
        return SkStatus::NullPointer;
    }
    if cap < idx.len() {
        set_error("buffer too small");
        return SkStatus::BufferTooSmall;
    }
    unsafe {
        std::ptr::copy_nonoverlapping(idx.as_ptr(), buf, idx.len());
    }
    SkStatus::Ok
}

/// Copy the 0-based column skeleton indices into `buf` (capacity
/// `sk_skeleton_rank`).
///
/// # Safety
/// `s` must be a live skeleton handle; `buf` must be writable for `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn sk_skeleton_col_indices(
    s: *const SkSkeleton,
    buf: *mut usize,
    cap: usize,
) -> SkStatus {
    guarded(|| {
        let s = nonnull!(s, "skeleton");
        copy_indices(&s.inner.col_indices, buf, cap)
    })
}

/// Copy the 0-based row skeleton indices into `buf`.
///
/// # Safety
/// `s` must be a live skeleton handle; `buf` must be writable for `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn sk_skeleton_row_indices(
    s: *const SkSkeleton,
    buf: *mut usize,
    cap: usize,
) -> SkStatus {
    guarded(|| {
        let s = nonnull!(s, "skeleton");
        match &s.inner.row_indices {
            Some(rows) => copy_indices(rows, buf, cap),
            None => {
                set_error("skeleton has no row side");
                SkStatus::NotAvailable
            }
        }
    })
}

/// A-posteriori certificate bound for the column selection, when available.
///
/// # Safety
/// `s` must be a live skeleton handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sk_skeleton_eta_col(s: *const SkSkeleton, out: *mut f64) -> SkStatus {
    guarded(|| {
        let s = nonnull!(s, "skeleton");
        if out.is_null() {
            set_error("out pointer is null");
            return SkStatus::NullPointer;
        }
        match s.inner.eta_col {
            Some(v) => {
                unsafe { *out = v };
                SkStatus::Ok
            }
            None => {
                set_error("no column certificate for this algorithm");
                SkStatus::NotAvailable
            }
        }
    })
}

/// A-posteriori certificate bound for the row selection, when available.
///
/// # Safety
/// `s` must be a live skeleton handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sk_skeleton_eta_row(s: *const SkSkeleton, out: *mut f64) -> SkStatus {
    guarded(|| {
        let s = nonnull!(s, "skeleton");
        if out.is_null() {
            set_error("out pointer is null");
            return SkStatus::NullPointer;
        }
        match s.inner.eta_row {
            Some(v) => {
                unsafe { *out = v };
                SkStatus::Ok
            }
            None => {
                set_error("no row certificate for this algorithm");
                SkStatus::NotAvailable
            }
        }
    })
}

/// Serialize the skeleton set as its TOML document; `written` receives the
/// text length (without the NUL).
///
/// # Safety
/// `s` must be a live skeleton handle; `buf` must be writable for `cap` bytes; `written` may be null.
#[no_mangle]
pub unsafe extern "C" fn sk_skeleton_document(
    s: *const SkSkeleton,
    buf: *mut c_char,
    cap: usize,
    written: *mut usize,
) -> SkStatus {
    guarded(|| {
        let s = nonnull!(s, "skeleton");
        let doc = s.inner.to_document();
        if !written.is_null() {
            unsafe { *written = doc.len() };
        }
        copy_str(&doc, buf, cap)
    })
}

/// Release a skeleton handle. Null is ignored.
///
/// # Safety
/// `s` must be null or a handle created by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_skeleton_free(s: *mut SkSkeleton) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}

fn skeleton_sides(s: &SkeletonSet) -> Result<(&[usize], &[usize]), Error> {
    let rows = s
        .row_indices
        .as_deref()
        .ok_or_else(|| Error::InvalidParameter("skeleton has no row side".into()))?;
    Ok((rows, &s.col_indices))
}

/// Stable CUR factors `Q_C (Q_C^T A Q_R) Q_R^T` from a two-sided skeleton.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sk_build_cur(
    m: *const SkMatrix,
    s: *const SkSkeleton,
    out: *mut *mut SkFactors,
) -> SkStatus {
    guarded(|| {
        let m = nonnull!(m, "matrix");
        let s = nonnull!(s, "skeleton");
        let (rows, cols) = match skeleton_sides(&s.inner) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        match factors::build_cur_stable(&m.inner, rows, cols) {
            Ok(f) => write_out(out, SkFactors { inner: f }),
            Err(e) => fail(e),
        }
    })
}

/// Column interpolative decomposition `C (C^+ A)`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sk_build_column_id(
    m: *const SkMatrix,
    s: *const SkSkeleton,
    out: *mut *mut SkFactors,
) -> SkStatus {
    guarded(|| {
        let m = nonnull!(m, "matrix");
        let s = nonnull!(s, "skeleton");
        match factors::build_column_id(&m.inner, &s.inner.col_indices) {
            Ok(f) => write_out(out, SkFactors { inner: f }),
            Err(e) => fail(e),
        }
    })
}

/// Two-sided interpolative decomposition `(C S^{-1}) S (C^+ A)`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sk_build_two_sided_id(
    m: *const SkMatrix,
    s: *const SkSkeleton,
    out: *mut *mut SkFactors,
) -> SkStatus {
    guarded(|| {
        let m = nonnull!(m, "matrix");
        let s = nonnull!(s, "skeleton");
        let (rows, cols) = match skeleton_sides(&s.inner) {
            Ok(v) => v,
            Err(e) => return fail(e),
        };
        match factors::build_two_sided_id(&m.inner, rows, cols) {
            Ok(f) => write_out(out, SkFactors { inner: f }),
            Err(e) => fail(e),
        }
    })
}

/// Decomposition rank.
///
/// # Safety
/// `f` must be null or a live factors handle.
#[no_mangle]
pub unsafe extern "C" fn sk_factors_rank(f: *const SkFactors) -> usize {
    unsafe { f.as_ref() }.map_or(0, |f| f.inner.rank())
}

/// Rows of the approximated matrix.
///
/// # Safety
/// `f` must be null or a live factors handle.
#[no_mangle]
pub unsafe extern "C" fn sk_factors_rows(f: *const SkFactors) -> usize {
    unsafe { f.as_ref() }.map_or(0, |f| f.inner.shape().0)
}

/// Columns of the approximated matrix.
///
/// # Safety
/// `f` must be null or a live factors handle.
#[no_mangle]
pub unsafe extern "C" fn sk_factors_cols(f: *const SkFactors) -> usize {
    unsafe { f.as_ref() }.map_or(0, |f| f.inner.shape().1)
}

/// Copy the factor kind name (NUL-terminated) into `buf`.
///
/// # Safety
/// `f` must be a live factors handle; `buf` must be writable for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn sk_factors_kind(
    f: *const SkFactors,
    buf: *mut c_char,
    cap: usize,
) -> SkStatus {
    guarded(|| {
        let f = nonnull!(f, "factors");
        copy_str(f.inner.kind_name(), buf, cap)
    })
}

/// `y = F x` without forming the approximation densely. `x` has length
/// `cols`, `y` has length `rows`.
///
/// # Safety
/// `x` must hold `x_len` readable and `y` `y_len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sk_factors_apply(
    f: *const SkFactors,
    x: *const f64,
    x_len: usize,
    y: *mut f64,
    y_len: usize,
) -> SkStatus {
    guarded(|| {
        let f = nonnull!(f, "factors");
        if x.is_null() || y.is_null() {
            set_error("vector buffers must not be null");
            return SkStatus::NullPointer;
        }
        let (m, n) = f.inner.shape();
        if x_len != n || y_len != m {
            set_error("vector lengths must match the factor shape");
            return SkStatus::DimensionMismatch;
        }
        let xv = DVector::from_column_slice(unsafe { std::slice::from_raw_parts(x, x_len) });
        match f.inner.apply(&xv) {
            Ok(res) => {
                unsafe {
                    std::ptr::copy_nonoverlapping(res.as_slice().as_ptr(), y, y_len);
                }
                SkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Densify the approximation into a row-major `rows * cols` buffer.
///
/// # Safety
/// `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn sk_factors_reconstruct(
    f: *const SkFactors,
    buf: *mut f64,
    len: usize,
) -> SkStatus {
    guarded(|| {
        let f = nonnull!(f, "factors");
        if buf.is_null() {
            set_error("buffer is null");
            return SkStatus::NullPointer;
        }
        let (m, n) = f.inner.shape();
        if len != m * n {
            set_error("buffer length must be rows * cols");
            return SkStatus::DimensionMismatch;
        }
        match f.inner.reconstruct() {
            Ok(dense) => {
                for i in 0..m {
                    for j in 0..n {
                        unsafe { *buf.add(i * n + j) = dense[(i, j)] };
                    }
                }
                SkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Export the factors as a directory of Matrix Market files plus manifest.
///
/// # Safety
/// `f` must be a live factors handle and `path` a readable NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sk_factors_export_dir(
    f: *const SkFactors,
    path: *const c_char,
) -> SkStatus {
    guarded(|| {
        let f = nonnull!(f, "factors");
        let path = match unsafe { read_c_path(path) } {
            Ok(p) => p,
            Err(code) => return code,
        };
        match f.inner.export_dir(&path) {
            Ok(()) => SkStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Evaluate the factorization error against the rank-`k` truncated-SVD
/// optimum (desk scale only).
///
/// # Safety
/// Handles must be live; the three out-pointers may each be null.
#[no_mangle]
pub unsafe extern "C" fn sk_factors_error(
    m: *const SkMatrix,
    f: *const SkFactors,
    k: usize,
    norm: SkNorm,
    err: *mut f64,
    opt_err: *mut f64,
    ratio: *mut f64,
) -> SkStatus {
    guarded(|| {
        let m = nonnull!(m, "matrix");
        let f = nonnull!(f, "factors");
        let norm = match norm {
            SkNorm::Frobenius => Norm::Fro,
            SkNorm::Spectral => Norm::Spec,
        };
        match factors::evaluate_error(&m.inner, &f.inner, k, norm) {
            Ok(rep) => {
                if !err.is_null() {
                    unsafe { *err = rep.err };
                }
                if !opt_err.is_null() {
                    unsafe { *opt_err = rep.opt_err };
                }
                if !ratio.is_null() {
                    unsafe { *ratio = rep.ratio };
                }
                SkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Release a factors handle. Null is ignored.
///
/// # Safety
/// `f` must be null or a handle created by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sk_factors_free(f: *mut SkFactors) {
    if !f.is_null() {
        drop(unsafe { Box::from_raw(f) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_codes_are_stable() {
        assert_eq!(SkStatus::Ok as i32, 0);
        assert_eq!(SkStatus::Panic as i32, 14);
    }
}
