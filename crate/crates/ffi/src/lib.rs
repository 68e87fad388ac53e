//! C interface to the structured sensing operators.
//!
//! Operators are opaque heap handles created by `rsrm_operator_new` or
//! `rsrm_operator_from_json` and released with `rsrm_operator_free`. Every
//! fallible call returns an `RsrmStatus`; on failure a description is
//! available from `rsrm_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rsrm::{build_operator, Error, LinearOperator, Normalization, Scheme, SchemeConfig, SeedTriple, StructuredOperator};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsrmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    Dimension = 3,
    Parse = 4,
    Runtime = 5,
    Panic = 6,
}

/// Sensing scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsrmScheme {
    FullGrm = 0,
    Bcs = 1,
    Bsrm = 2,
    Rsrm = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsrmNormalization {
    Raw = 0,
    Unbiased = 1,
}

/// Operator parameters. `subrate` is `m / n`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RsrmConfig {
    pub scheme: RsrmScheme,
    pub n: usize,
    pub block_size: usize,
    pub subrate: f64,
    pub passes: usize,
    pub seed_r: u64,
    pub seed_d: u64,
    pub seed_phi: u64,
    pub normalization: RsrmNormalization,
}

/// Opaque operator handle.
pub struct RsrmOperator {
    inner: StructuredOperator,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> RsrmStatus {
    match err {
        Error::InvalidConfig(_) | Error::TooFewMeasurements { .. } => RsrmStatus::InvalidConfig,
        Error::Dimension { .. } => RsrmStatus::Dimension,
        Error::Parse(_) | Error::Json(_) => RsrmStatus::Parse,
        _ => RsrmStatus::Runtime,
    }
}

type Failure = (RsrmStatus, String);

/// Runs `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RsrmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RsrmStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RsrmStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> Failure {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> Failure {
    (RsrmStatus::NullPointer, format!("{what} is null"))
}

impl From<&RsrmConfig> for SchemeConfig {
    fn from(c: &RsrmConfig) -> Self {
        let scheme = match c.scheme {
            RsrmScheme::FullGrm => Scheme::FullGrm,
            RsrmScheme::Bcs => Scheme::Bcs,
            RsrmScheme::Bsrm => Scheme::Bsrm,
            RsrmScheme::Rsrm => Scheme::Rsrm,
        };
        let normalization = match c.normalization {
            RsrmNormalization::Raw => Normalization::Raw,
            RsrmNormalization::Unbiased => Normalization::Unbiased,
        };
        SchemeConfig::new(scheme, c.n, c.block_size, c.subrate, c.passes)
            .with_seeds(SeedTriple {
                seed_r: c.seed_r,
                seed_d: c.seed_d,
                seed_phi: c.seed_phi,
            })
            .with_normalization(normalization)
    }
}

/// Fills `out` with defaults for `scheme` and the seed triple derived from `master_seed`.
///
/// # Safety
/// `out` must be null or point to writable memory for one `RsrmConfig`.
#[no_mangle]
pub unsafe extern "C" fn rsrm_config_init(
    out: *mut RsrmConfig,
    scheme: RsrmScheme,
    n: usize,
    block_size: usize,
    subrate: f64,
    master_seed: u64,
) -> RsrmStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let seeds = SeedTriple::from_master(master_seed);
        *out = RsrmConfig {
            scheme,
            n,
            block_size,
            subrate,
            passes: 1,
            seed_r: seeds.seed_r,
            seed_d: seeds.seed_d,
            seed_phi: seeds.seed_phi,
            normalization: RsrmNormalization::Unbiased,
        };
        Ok(())
    })
}

/// Builds an operator. On success `*out` owns a new handle.
///
/// # Safety
/// `config` must be null or valid; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rsrm_operator_new(config: *const RsrmConfig, out: *mut *mut RsrmOperator) -> RsrmStatus {
    guard(|| {
        let cfg = unsafe { config.as_ref() }.ok_or_else(|| null("config"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let inner = build_operator(&SchemeConfig::from(cfg)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(RsrmOperator { inner }));
        Ok(())
    })
}

/// Loads an operator from its JSON document.
///
/// # Safety
/// `json` must be null or a nul-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rsrm_operator_from_json(json: *const c_char, out: *mut *mut RsrmOperator) -> RsrmStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let text = unsafe { CStr::from_ptr(json) }
            .to_str()
            .map_err(|_| (RsrmStatus::Parse, "json is not UTF-8".to_string()))?;
        let inner = StructuredOperator::from_json(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(RsrmOperator { inner }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `op` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rsrm_operator_free(op: *mut RsrmOperator) {
    if !op.is_null() {
        drop(unsafe { Box::from_raw(op) });
    }
}

/// Writes the measurement count `m` and signal length `n`.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn rsrm_operator_dims(op: *const RsrmOperator, rows: *mut usize, cols: *mut usize) -> RsrmStatus {
    guard(|| {
        let op = unsafe { op.as_ref() }.ok_or_else(|| null("op"))?;
        let rows = unsafe { rows.as_mut() }.ok_or_else(|| null("rows"))?;
        let cols = unsafe { cols.as_mut() }.ok_or_else(|| null("cols"))?;
        *rows = op.inner.rows();
        *cols = op.inner.cols();
        Ok(())
    })
}

unsafe fn slices<'a>(
    input: *const f64,
    in_len: usize,
    output: *mut f64,
    out_len: usize,
    want_in: usize,
    want_out: usize,
) -> Result<(&'a [f64], &'a mut [f64]), Failure> {
    if input.is_null() {
        return Err(null("input"));
    }
    if output.is_null() {
        return Err(null("output"));
    }
    if in_len != want_in {
        return Err(lib_err(Error::Dimension { expected: want_in, got: in_len }));
    }
    if out_len != want_out {
        return Err(lib_err(Error::Dimension { expected: want_out, got: out_len }));
    }
    Ok(unsafe { (std::slice::from_raw_parts(input, in_len), std::slice::from_raw_parts_mut(output, out_len)) })
}

/// `y = Φ x` with `x_len = n` and `y_len = m`.
///
/// # Safety
/// `x` must hold `x_len` readable doubles and `y` `y_len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn rsrm_operator_apply(
    op: *const RsrmOperator,
    x: *const f64,
    x_len: usize,
    y: *mut f64,
    y_len: usize,
) -> RsrmStatus {
    guard(|| {
        let op = unsafe { op.as_ref() }.ok_or_else(|| null("op"))?;
        let (x, y) = unsafe { slices(x, x_len, y, y_len, op.inner.cols(), op.inner.rows()) }?;
        op.inner.apply_into(x, y);
        Ok(())
    })
}

/// `x = Φᵀ y` with `y_len = m` and `x_len = n`.
///
/// # Safety
/// `y` must hold `y_len` readable doubles and `x` `x_len` writable ones.
#[no_mangle]
pub unsafe extern "C" fn rsrm_operator_adjoint(
    op: *const RsrmOperator,
    y: *const f64,
    y_len: usize,
    x: *mut f64,
    x_len: usize,
) -> RsrmStatus {
    guard(|| {
        let op = unsafe { op.as_ref() }.ok_or_else(|| null("op"))?;
        let (y, x) = unsafe { slices(y, y_len, x, x_len, op.inner.rows(), op.inner.cols()) }?;
        op.inner.adjoint_into(y, x);
        Ok(())
    })
}

/// Serializes the operator. `*out` receives a string to release with `rsrm_string_free`.
///
/// # Safety
/// `op` must be null or valid; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rsrm_operator_to_json(op: *const RsrmOperator, out: *mut *mut c_char) -> RsrmStatus {
    guard(|| {
        let op = unsafe { op.as_ref() }.ok_or_else(|| null("op"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let text = op.inner.to_json().map_err(lib_err)?;
        *out = CString::new(text).expect("JSON has no nul bytes").into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from `rsrm_operator_to_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rsrm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Message of the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn rsrm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}
