//! C ABI over `cluster_geom`.
//!
//! Seeds cross the boundary as opaque `CgSeed` handles. Every call returns a
//! `CgStatus`; on failure `cg_last_error_message` describes the error on the
//! calling thread. Strings handed out by the library must be released with
//! `cg_string_free`. Mutation indices are 0-based here, unlike the CLI.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cluster_geom::cli::{self, LoadedSeed};
use cluster_geom::explorer::{self, Limits, Side};
use cluster_geom::lattice::to_big;
use cluster_geom::seed::{picard_report, Seed};
use cluster_geom::toric::{self, Rank2Data};
use cluster_geom::Error;

/// Status codes returned by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgStatus {
    CgOk = 0,
    CgNullPointer = 1,
    CgInvalidInput = 2,
    CgFrozenIndex = 3,
    CgUnsupported = 4,
    CgLaurentViolation = 5,
    CgOverflow = 6,
    CgBufferTooSmall = 7,
    CgInternal = 99,
}

/// Side of the cluster ensemble for `cg_laurent_check`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CgSide {
    CgSideA = 0,
    CgSideX = 1,
}

/// Opaque seed handle.
pub struct CgSeed {
    seed: Seed,
    rank2: Option<Rank2Data>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> CgStatus {
    match e {
        Error::FrozenIndex(_) => CgStatus::CgFrozenIndex,
        Error::Unsupported(_) | Error::Rank2(_) => CgStatus::CgUnsupported,
        Error::LaurentViolation { .. } => CgStatus::CgLaurentViolation,
        Error::Overflow(_) => CgStatus::CgOverflow,
        Error::Internal(_) => CgStatus::CgInternal,
        _ => CgStatus::CgInvalidInput,
    }
}

/// Runs `f`, recording errors and turning panics into `CgInternal`.
fn guard<F>(f: F) -> CgStatus
where
    F: FnOnce() -> Result<(), (CgStatus, String)>,
{
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CgStatus::CgOk,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside cluster_geom".into());
            CgStatus::CgInternal
        }
    }
}

fn lib_err(e: Error) -> (CgStatus, String) {
    (status_of(&e), e.to_string())
}

fn null() -> (CgStatus, String) {
    (CgStatus::CgNullPointer, "null pointer argument".into())
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, (CgStatus, String)> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CgStatus::CgInvalidInput, "string is not valid UTF-8".into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (CgStatus, String)> {
    let c = CString::new(s).map_err(|_| (CgStatus::CgInternal, "interior NUL in output".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Parses a seed file (the CLI JSON format) into a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_seed_from_json(json: *const c_char, out: *mut *mut CgSeed) -> CgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let text = read_str(json)?;
        let LoadedSeed { seed, rank2 } = cli::load_seed(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(CgSeed { seed, rank2 }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `seed` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cg_seed_free(seed: *mut CgSeed) {
    if !seed.is_null() {
        drop(Box::from_raw(seed));
    }
}

/// # Safety
/// `seed` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cg_seed_rank(seed: *const CgSeed, out: *mut usize) -> CgStatus {
    guard(|| {
        let s = seed.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = s.seed.rank();
        Ok(())
    })
}

/// Mutates in direction `k` (0-based) into a new handle.
///
/// # Safety
/// `seed` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cg_seed_mutate(seed: *const CgSeed, k: usize, out: *mut *mut CgSeed) -> CgStatus {
    guard(|| {
        let s = seed.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let t = s.seed.mutate(k).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(CgSeed {
            seed: t,
            rank2: s.rank2.clone(),
        }));
        Ok(())
    })
}

/// Writes the exchange matrix row-major into `buf`, which must hold rank^2 entries.
///
/// # Safety
/// `buf` must point to `len` writable `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn cg_seed_epsilon(seed: *const CgSeed, buf: *mut i64, len: usize) -> CgStatus {
    guard(|| {
        let s = seed.as_ref().ok_or_else(null)?;
        if buf.is_null() {
            return Err(null());
        }
        let n = s.seed.rank();
        if len < n * n {
            return Err((CgStatus::CgBufferTooSmall, format!("need {} entries, got {len}", n * n)));
        }
        let rows = s
            .seed
            .epsilon()
            .to_i64_rows()
            .ok_or((CgStatus::CgOverflow, "epsilon entry does not fit in int64".into()))?;
        let dst = std::slice::from_raw_parts_mut(buf, n * n);
        for (slot, x) in dst.iter_mut().zip(rows.into_iter().flatten()) {
            *slot = x;
        }
        Ok(())
    })
}

/// Serializes the seed in the CLI JSON format (1-based indices).
///
/// # Safety
/// `seed` and `out` must be valid pointers; free the result with `cg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cg_seed_to_json(seed: *const CgSeed, out: *mut *mut c_char) -> CgStatus {
    guard(|| {
        let s = seed.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        write_string(out, cli::seed_to_json(&s.seed, s.rank2.as_ref()).to_string())
    })
}

/// Picard group report as JSON.
///
/// # Safety
/// `seed` and `out` must be valid pointers; free the result with `cg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn cg_picard_json(seed: *const CgSeed, out: *mut *mut c_char) -> CgStatus {
    guard(|| {
        let s = seed.as_ref().ok_or_else(null)?;
        if out.is_null() {
            return Err(null());
        }
        let r = picard_report(&s.seed).map_err(lib_err)?;
        write_string(out, cli::picard_json(&r).to_string())
    })
}

/// Rank-two report for `{"w": ..., "nu": ...}` data, checked on all single mutations.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cg_rank2_report_json(json: *const c_char, out: *mut *mut c_char) -> CgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let text = read_str(json)?;
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| (CgStatus::CgInvalidInput, format!("invalid JSON: {e}")))?;
        let data = cli::load_rank2(&v).map_err(lib_err)?;
        let paths: Vec<Vec<usize>> = (0..data.len()).map(|k| vec![k]).collect();
        let r = toric::rank2_report(&data, &paths).map_err(lib_err)?;
        write_string(out, cli::rank2_json(&r).to_string())
    })
}

/// Checks that z^q stays Laurent along every mutation path up to `depth`.
/// Returns `CgLaurentViolation` when a non-Laurent transport is found.
///
/// # Safety
/// `q` must point to `q_len` readable `int64_t`.
#[no_mangle]
pub unsafe extern "C" fn cg_laurent_check(
    seed: *const CgSeed,
    side: CgSide,
    q: *const i64,
    q_len: usize,
    depth: usize,
) -> CgStatus {
    guard(|| {
        let s = seed.as_ref().ok_or_else(null)?;
        if q.is_null() && q_len > 0 {
            return Err(null());
        }
        let qv = if q_len == 0 { Vec::new() } else { std::slice::from_raw_parts(q, q_len).to_vec() };
        let side = match side {
            CgSide::CgSideA => Side::A,
            CgSide::CgSideX => Side::X,
        };
        let r = explorer::verify_laurent(&s.seed, side, &to_big(&qv), depth, Limits::default(), Some(1))
            .map_err(lib_err)?;
        if let Some(w) = r.witnesses.first() {
            return Err((
                CgStatus::CgLaurentViolation,
                format!("non-Laurent along path {:?}", w.path),
            ));
        }
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn cg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
