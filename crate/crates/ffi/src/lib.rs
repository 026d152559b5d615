//! C interface to `wish-core`.
//!
//! Models and runs are opaque handles owned by the caller and released with
//! the matching `*_free` function. Every fallible call returns a
//! [`WishStatus`]; on failure a description is available from
//! [`wish_last_error_message`] on the same thread. Strings returned by the
//! library are released with [`wish_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use wish_core::cli::report::{ResultSummary, Totals};
use wish_core::model::{binarize, parse_uai};
use wish_core::oracle::brute_force_log_z;
use wish_core::wish::{run_wish, PoolExecutor, ALPHA_BOUND};
use wish_core::{BinaryModel, Bits, Budget, Error, Guarantee, WishConfig, WishResult};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WishStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidModel = 4,
    InvalidArgument = 5,
    DimensionMismatch = 6,
    CapExceeded = 7,
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WishGuarantee {
    Exact16x = 0,
    Factor16l = 1,
    LowerBound = 2,
}

/// Run parameters. Zero means "unset" for `t_override`, `jobs` and
/// `budget_nodes`; a non-positive `budget_seconds` means no time limit.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WishOptions {
    pub delta: f64,
    pub alpha: f64,
    pub t_override: usize,
    pub seed: u64,
    pub jobs: usize,
    pub budget_nodes: u64,
    pub budget_seconds: f64,
}

/// A parsed and binarized model.
pub struct WishModel {
    inner: BinaryModel,
}

/// The outcome of one estimator run.
pub struct WishRun {
    inner: WishResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: WishStatus, message: impl Into<String>) -> WishStatus {
    set_error(message.into());
    status
}

fn from_error(e: Error) -> WishStatus {
    let status = match e {
        Error::Parse { .. } => WishStatus::ParseError,
        Error::InvalidModel(_) => WishStatus::InvalidModel,
        Error::DimensionMismatch { .. } => WishStatus::DimensionMismatch,
        Error::CapExceeded { .. } => WishStatus::CapExceeded,
        Error::InvalidArgument(_) => WishStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> WishStatus) -> WishStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(WishStatus::Panic, "internal panic"))
}

/// Message for the most recent failure on this thread, or null. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wish_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn wish_options_default() -> WishOptions {
    WishOptions {
        delta: 0.1,
        alpha: ALPHA_BOUND,
        t_override: 0,
        seed: 0,
        jobs: 0,
        budget_nodes: 0,
        budget_seconds: 0.0,
    }
}

/// Parses a UAI `MARKOV` document and binarizes it.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn wish_model_from_uai(text: *const c_char, out: *mut *mut WishModel) -> WishStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return fail(WishStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(WishStatus::InvalidUtf8, "model text is not UTF-8");
        };
        match parse_uai(text) {
            Ok(graph) => {
                *out = Box::into_raw(Box::new(WishModel { inner: binarize(&graph) }));
                WishStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `model` must be null or a handle from [`wish_model_from_uai`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wish_model_free(model: *mut WishModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of bits after binarization; 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wish_model_num_bits(model: *const WishModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.num_bits())
}

/// Natural-log weight of the bit assignment `bits[0..len]` (each byte 0 or
/// 1). Zero-weight assignments give `-INFINITY`.
///
/// # Safety
/// `model` must be a live handle, `bits` must point to `len` readable bytes
/// and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn wish_model_log_weight(
    model: *const WishModel,
    bits: *const u8,
    len: usize,
    out: *mut f64,
) -> WishStatus {
    guarded(|| {
        let (Some(model), false, false) = (model.as_ref(), bits.is_null() && len > 0, out.is_null()) else {
            return fail(WishStatus::NullPointer, "null argument");
        };
        let raw = if len == 0 { &[][..] } else { std::slice::from_raw_parts(bits, len) };
        let values: Vec<bool> = raw.iter().map(|&b| b != 0).collect();
        match model.inner.log_weight(&Bits::from_bools(&values)) {
            Ok(w) => {
                *out = w;
                WishStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Exact `ln Z` by enumeration, refusing models with more than `cap` bits.
///
/// # Safety
/// `model` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wish_oracle_log_z(model: *const WishModel, cap: usize, out: *mut f64) -> WishStatus {
    guarded(|| {
        let (Some(model), false) = (model.as_ref(), out.is_null()) else {
            return fail(WishStatus::NullPointer, "null argument");
        };
        match brute_force_log_z(&model.inner, cap) {
            Ok(z) => {
                *out = z;
                WishStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

fn config_from(options: &WishOptions) -> Result<WishConfig, WishStatus> {
    let max_time = if options.budget_seconds > 0.0 {
        Some(Duration::try_from_secs_f64(options.budget_seconds).map_err(|e| fail(WishStatus::InvalidArgument, e.to_string()))?)
    } else {
        None
    };
    Ok(WishConfig {
        delta: options.delta,
        alpha: options.alpha,
        t_override: (options.t_override > 0).then_some(options.t_override),
        master_seed: options.seed,
        budget: Budget {
            max_nodes: (options.budget_nodes > 0).then_some(options.budget_nodes),
            max_time,
        },
        ..WishConfig::default()
    })
}

/// Runs the estimator. `options` may be null for defaults.
///
/// # Safety
/// `model` must be a live handle, `options` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wish_run(
    model: *const WishModel,
    options: *const WishOptions,
    out: *mut *mut WishRun,
) -> WishStatus {
    guarded(|| {
        let (Some(model), false) = (model.as_ref(), out.is_null()) else {
            return fail(WishStatus::NullPointer, "null argument");
        };
        *out = ptr::null_mut();
        let options = options.as_ref().copied().unwrap_or_else(|| wish_options_default());
        let config = match config_from(&options) {
            Ok(c) => c,
            Err(status) => return status,
        };
        let threads = if options.jobs > 0 {
            options.jobs
        } else {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        };
        let executor = match PoolExecutor::new(threads) {
            Ok(e) => e,
            Err(e) => return from_error(e),
        };
        match run_wish(&model.inner, &config, &executor) {
            Ok(result) => {
                *out = Box::into_raw(Box::new(WishRun { inner: result }));
                WishStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `run` must be null or a handle from [`wish_run`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wish_run_free(run: *mut WishRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Natural-log estimate of `Z`; NaN for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wish_run_log_estimate(run: *const WishRun) -> f64 {
    run.as_ref().map_or(f64::NAN, |r| r.inner.log_estimate)
}

/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wish_run_guarantee(run: *const WishRun) -> WishGuarantee {
    match run.as_ref().map(|r| r.inner.guarantee) {
        Some(Guarantee::Exact16x) => WishGuarantee::Exact16x,
        Some(Guarantee::Factor16L { .. }) => WishGuarantee::Factor16l,
        _ => WishGuarantee::LowerBound,
    }
}

/// Number of medians, `n + 1`; 0 for a null handle.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wish_run_num_medians(run: *const WishRun) -> usize {
    run.as_ref().map_or(0, |r| r.inner.medians.len())
}

/// Median `M_level` in natural log (`-INFINITY` for an empty level).
///
/// # Safety
/// `run` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wish_run_median(run: *const WishRun, level: usize, out: *mut f64) -> WishStatus {
    let (Some(run), false) = (run.as_ref(), out.is_null()) else {
        return fail(WishStatus::NullPointer, "null argument");
    };
    match run.inner.medians.get(level) {
        Some(&m) => {
            *out = m;
            WishStatus::Ok
        }
        None => fail(
            WishStatus::OutOfRange,
            format!("level {level} out of range 0..={}", run.inner.n),
        ),
    }
}

/// JSON summary of the run, released with [`wish_string_free`].
///
/// # Safety
/// `run` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn wish_run_to_json(run: *const WishRun, out: *mut *mut c_char) -> WishStatus {
    guarded(|| {
        let (Some(run), false) = (run.as_ref(), out.is_null()) else {
            return fail(WishStatus::NullPointer, "null argument");
        };
        let doc = serde_json::json!({
            "result": ResultSummary::new(&run.inner),
            "totals": Totals::new(&run.inner.records, None),
        });
        let text = serde_json::to_string(&doc).expect("summary serialization");
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        WishStatus::Ok
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wish_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
