//! C interface to `minorext`.
//!
//! Every function returns an [`MxStatus`] (or a plain value for the trivial
//! accessors). On failure a description is available from
//! [`mx_last_error_message`] on the same thread until the next failing call.
//! Symmetric matrices are passed around as opaque [`MxSymMatrix`] handles
//! that must be released with [`mx_sym_matrix_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use minorext::minor_scan::{scan_exact_m, scan_le_m, ScanMode, ScanOptions};
use minorext::statistics::{
    envelope_gaussian, envelope_general, envelope_wigner, src_certificate_with_n, EnvelopeSpec,
};
use minorext::{center_scale, gen_wigner, gram, sym_eigs, DataMatrix, Error, SeedSpec, SymMatrix, SymTag};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MxStatus {
    MxOk = 0,
    /// A required pointer argument was null.
    MxErrNull = 1,
    /// Invalid parameters or input data.
    MxErrInput = 2,
    /// The subset count overflows or exceeds the budget.
    MxErrBudget = 3,
    /// Eigensolver non-convergence or another internal failure.
    MxErrInternal = 4,
    /// A Rust panic was caught at the boundary.
    MxErrPanic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MxScanMode {
    MxScanExhaustive = 0,
    MxScanPruned = 1,
}

/// Scalar part of a scan. The arg-sets are written to caller buffers.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MxScanResult {
    pub t: f64,
    pub v: f64,
    pub subsets_visited: u64,
    pub subsets_pruned: u64,
    pub argmax_len: usize,
    pub argmin_len: usize,
}

/// Opaque symmetric matrix.
pub struct MxSymMatrix {
    inner: SymMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
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

fn status_of(e: &Error) -> MxStatus {
    match e.root() {
        Error::Budget { .. } | Error::CombinatorialExplosion { .. } => MxStatus::MxErrBudget,
        Error::NonConvergence { .. } | Error::NetConstruction(_) => MxStatus::MxErrInternal,
        _ => MxStatus::MxErrInput,
    }
}

/// Runs `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> MxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MxStatus::MxOk,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            MxStatus::MxErrNull
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            MxStatus::MxErrPanic
        }
    }
}

fn non_null<T>(p: *const T, what: &'static str) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail::Null(what))
    } else {
        Ok(())
    }
}

/// `len` doubles starting at `data`. `len == 0` accepts a null pointer.
unsafe fn slice<'a>(data: *const f64, len: usize, what: &'static str) -> Result<&'a [f64], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    non_null(data, what)?;
    Ok(std::slice::from_raw_parts(data, len))
}

fn element_count(a: usize, b: usize) -> Result<usize, Fail> {
    a.checked_mul(b)
        .ok_or_else(|| Fail::Lib(Error::Size(format!("{a} x {b} elements overflow"))))
}

unsafe fn emit(out: *mut *mut MxSymMatrix, inner: SymMatrix) {
    *out = Box::into_raw(Box::new(MxSymMatrix { inner }));
}

/// Copies a row-major `dim × dim` matrix, which must be exactly symmetric.
///
/// # Safety
/// `values` must point to `dim * dim` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mx_sym_matrix_from_values(
    values: *const f64,
    dim: usize,
    out: *mut *mut MxSymMatrix,
) -> MxStatus {
    guard(|| {
        non_null(out, "out")?;
        let v = slice(values, element_count(dim, dim)?, "values")?;
        let w = SymMatrix::from_full(dim, v.to_vec(), SymTag::General)?;
        emit(out, w);
        Ok(())
    })
}

/// Gram matrix `XᵀX` of a row-major `n × p` data matrix.
///
/// # Safety
/// `data` must point to `n * p` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mx_sym_matrix_from_data(
    data: *const f64,
    n: usize,
    p: usize,
    out: *mut *mut MxSymMatrix,
) -> MxStatus {
    guard(|| {
        non_null(out, "out")?;
        let v = slice(data, element_count(n, p)?, "data")?;
        let x = DataMatrix::new(n, p, v.to_vec())?;
        emit(out, gram(&x));
        Ok(())
    })
}

/// `(W − nI)/√n` as a new handle.
///
/// # Safety
/// `w` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mx_sym_matrix_center_scale(
    w: *const MxSymMatrix,
    n: usize,
    out: *mut *mut MxSymMatrix,
) -> MxStatus {
    guard(|| {
        non_null(w, "w")?;
        non_null(out, "out")?;
        emit(out, center_scale(&(*w).inner, n)?);
        Ok(())
    })
}

/// Seeded `p × p` Wigner matrix with diagonal variance `eta`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mx_sym_matrix_wigner(
    p: usize,
    eta: f64,
    master_seed: u64,
    stream_id: u64,
    out: *mut *mut MxSymMatrix,
) -> MxStatus {
    guard(|| {
        non_null(out, "out")?;
        emit(out, gen_wigner(p, eta, SeedSpec::new(master_seed, stream_id))?);
        Ok(())
    })
}

/// Dimension of `w`, or 0 for a null handle.
///
/// # Safety
/// `w` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mx_sym_matrix_dim(w: *const MxSymMatrix) -> usize {
    if w.is_null() {
        0
    } else {
        (*w).inner.dim()
    }
}

/// Copies the row-major entries of `w` into `out`, which holds `len` doubles.
///
/// # Safety
/// `w` must be a live handle and `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn mx_sym_matrix_values(w: *const MxSymMatrix, out: *mut f64, len: usize) -> MxStatus {
    guard(|| {
        non_null(w, "w")?;
        let values = (*w).inner.values();
        if len < values.len() {
            return Err(Error::Shape {
                expected: values.len(),
                got: len,
            }
            .into());
        }
        non_null(out, "out")?;
        ptr::copy_nonoverlapping(values.as_ptr(), out, values.len());
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `w` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mx_sym_matrix_free(w: *mut MxSymMatrix) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Scans the principal minors of `w` of size `m` (or every size up to `m`
/// when `le_m` is true). `budget == 0` means unlimited. The arg-sets are
/// written to `argmax` and `argmin`, each with room for `capacity` indices;
/// `capacity >= m` always suffices.
///
/// # Safety
/// `w` must be a live handle, `out` writable, and the index buffers must
/// hold `capacity` elements each.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn mx_scan(
    w: *const MxSymMatrix,
    m: usize,
    le_m: bool,
    mode: MxScanMode,
    workers: usize,
    budget: u64,
    out: *mut MxScanResult,
    argmax: *mut usize,
    argmin: *mut usize,
    capacity: usize,
) -> MxStatus {
    guard(|| {
        non_null(w, "w")?;
        non_null(out, "out")?;
        non_null(argmax, "argmax")?;
        non_null(argmin, "argmin")?;
        let mode = match mode {
            MxScanMode::MxScanExhaustive => ScanMode::Exhaustive,
            MxScanMode::MxScanPruned => ScanMode::Pruned,
        };
        let opts = ScanOptions::new(mode, workers.max(1)).with_budget((budget > 0).then_some(budget));
        let w = &(*w).inner;
        let r = if le_m {
            scan_le_m(w, m, &opts)?
        } else {
            scan_exact_m(w, m, &opts)?
        };
        let (hi, lo) = (r.argmax_set.indices(), r.argmin_set.indices());
        if capacity < hi.len().max(lo.len()) {
            return Err(Error::Shape {
                expected: hi.len().max(lo.len()),
                got: capacity,
            }
            .into());
        }
        ptr::copy_nonoverlapping(hi.as_ptr(), argmax, hi.len());
        ptr::copy_nonoverlapping(lo.as_ptr(), argmin, lo.len());
        *out = MxScanResult {
            t: r.t,
            v: r.v,
            subsets_visited: r.subsets_visited,
            subsets_pruned: r.subsets_pruned,
            argmax_len: hi.len(),
            argmin_len: lo.len(),
        };
        Ok(())
    })
}

/// Eigenvalues of a row-major symmetric `dim × dim` matrix, in descending
/// order, written to `eigenvalues` (`dim` doubles).
///
/// # Safety
/// `values` must hold `dim * dim` doubles and `eigenvalues` `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn mx_sym_eigs(values: *const f64, dim: usize, eigenvalues: *mut f64) -> MxStatus {
    guard(|| {
        let v = slice(values, element_count(dim, dim)?, "values")?;
        let s = sym_eigs(v, dim)?;
        if dim > 0 {
            non_null(eigenvalues, "eigenvalues")?;
            ptr::copy_nonoverlapping(s.eigenvalues.as_ptr(), eigenvalues, dim);
        }
        Ok(())
    })
}

unsafe fn envelope_out(out: *mut f64, f: impl FnOnce() -> minorext::Result<EnvelopeSpec>) -> MxStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = f()?.value;
        Ok(())
    })
}

/// Gaussian Gram envelope `2√(m log p / n)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mx_envelope_gaussian(n: usize, p: usize, m: usize, out: *mut f64) -> MxStatus {
    envelope_out(out, || envelope_gaussian(n, p, m))
}

/// Gram envelope for entries with `Var(x²) = eta`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mx_envelope_general(n: usize, p: usize, m: usize, eta: f64, out: *mut f64) -> MxStatus {
    envelope_out(out, || envelope_general(n, p, m, eta))
}

/// Wigner envelope on the absolute scale.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mx_envelope_wigner(p: usize, m: usize, eta: f64, out: *mut f64) -> MxStatus {
    envelope_out(out, || envelope_wigner(p, m, eta))
}

/// Sparse Riesz constants `(c1, c2)` of a row-major `n × p` design at
/// sparsity `m`. `divisor == 0` divides by `n`.
///
/// # Safety
/// `data` must hold `n * p` doubles; `c1` and `c2` must be writable.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn mx_src_certificate(
    data: *const f64,
    n: usize,
    p: usize,
    m: usize,
    divisor: usize,
    workers: usize,
    c1: *mut f64,
    c2: *mut f64,
) -> MxStatus {
    guard(|| {
        non_null(c1, "c1")?;
        non_null(c2, "c2")?;
        let v = slice(data, element_count(n, p)?, "data")?;
        let x = DataMatrix::new(n, p, v.to_vec())?;
        let divisor = if divisor == 0 { n } else { divisor };
        let cert = src_certificate_with_n(&x, m, divisor, &ScanOptions::new(ScanMode::Exhaustive, workers.max(1)))?;
        *c1 = cert.c1;
        *c2 = cert.c2;
        Ok(())
    })
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mx_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
