//! C interface to the search engine.
//!
//! Every function returns a `SautStatus`; on failure the message is available
//! from `saut_last_error_message` on the same thread. Objects are opaque and
//! must be released with their `_free` function. Strings returned through
//! `char **` arguments are owned by the caller and released with `saut_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use saut_core::control::{chi, psl_action, SL2Mat};
use saut_core::hom::InjectivityMode;
use saut_core::orchestrator::checkpoint::to_pretty;
use saut_core::orchestrator::{resume, run_search, RunOptions, RunStatus, SearchConfig};
use saut_core::relations::check_gersten;
use saut_core::search::{check_certificate, Certificate, Origin};
use saut_core::{Error, Permutation};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SautStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidInput = 2,
    Capacity = 3,
    Checkpoint = 4,
    Io = 5,
    Parse = 6,
    Consistency = 7,
    Interrupted = 8,
    Panic = 9,
}

/// A permutation of `{0, ..., degree - 1}`.
pub struct SautPermutation {
    inner: Permutation,
}

/// A configured search; run it with `saut_search_run`.
pub struct SautSearch {
    config: SearchConfig,
    options: RunOptions,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SautStatus {
    match e {
        Error::Input(_) => SautStatus::InvalidInput,
        Error::Capacity(_) => SautStatus::Capacity,
        Error::Checkpoint { .. } => SautStatus::Checkpoint,
        Error::Io { .. } => SautStatus::Io,
        Error::Parse(_) => SautStatus::Parse,
        Error::Consistency(_) => SautStatus::Consistency,
    }
}

/// Runs `f`, turning errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<(), (SautStatus, String)>) -> SautStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SautStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SautStatus::Panic
        }
    }
}

fn core_err(e: Error) -> (SautStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(name: &str) -> (SautStatus, String) {
    (SautStatus::NullArgument, format!("{name} is null"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (SautStatus, String)> {
    let c = CString::new(s).map_err(|_| (SautStatus::Parse, "string contains a nul byte".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn read_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, (SautStatus, String)> {
    if s.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (SautStatus::InvalidInput, format!("{name} is not UTF-8")))
}

unsafe fn perm<'a>(p: *const SautPermutation, name: &str) -> Result<&'a Permutation, (SautStatus, String)> {
    p.as_ref().map(|p| &p.inner).ok_or_else(|| null(name))
}

unsafe fn emit(out: *mut *mut SautPermutation, p: Permutation) -> Result<(), (SautStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(SautPermutation { inner: p }));
    Ok(())
}

/// The message for the last failure on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn saut_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn saut_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn saut_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a permutation from its 0-based image array.
///
/// # Safety
/// `images` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_new(
    images: *const u32,
    len: usize,
    out: *mut *mut SautPermutation,
) -> SautStatus {
    guard(|| {
        if images.is_null() && len > 0 {
            return Err(null("images"));
        }
        let v = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(images, len).to_vec() };
        emit(out, Permutation::from_images(v).map_err(core_err)?)
    })
}

/// # Safety
/// `p` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_free(p: *mut SautPermutation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Degree of `p`, or 0 for a null handle.
///
/// # Safety
/// `p` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_degree(p: *const SautPermutation) -> usize {
    p.as_ref().map_or(0, |p| p.inner.degree())
}

/// Copies the image array into `buf`, which must hold at least the degree.
///
/// # Safety
/// `buf` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_images(p: *const SautPermutation, buf: *mut u32, len: usize) -> SautStatus {
    guard(|| {
        let p = perm(p, "p")?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < p.degree() {
            return Err((SautStatus::InvalidInput, format!("buffer of {len} for degree {}", p.degree())));
        }
        std::slice::from_raw_parts_mut(buf, p.degree()).copy_from_slice(p.images());
        Ok(())
    })
}

/// `p` then `q`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_compose(
    p: *const SautPermutation,
    q: *const SautPermutation,
    out: *mut *mut SautPermutation,
) -> SautStatus {
    guard(|| emit(out, perm(p, "p")?.compose(perm(q, "q")?).map_err(core_err)?))
}

/// `g^-1 p g`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_conjugate(
    p: *const SautPermutation,
    g: *const SautPermutation,
    out: *mut *mut SautPermutation,
) -> SautStatus {
    guard(|| emit(out, perm(p, "p")?.conjugate(perm(g, "g")?).map_err(core_err)?))
}

/// `a b a^-1 b^-1`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_commutator(
    a: *const SautPermutation,
    b: *const SautPermutation,
    out: *mut *mut SautPermutation,
) -> SautStatus {
    guard(|| emit(out, perm(a, "a")?.commutator(perm(b, "b")?).map_err(core_err)?))
}

/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_inverse(p: *const SautPermutation, out: *mut *mut SautPermutation) -> SautStatus {
    guard(|| emit(out, perm(p, "p")?.inverse()))
}

/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_is_even(p: *const SautPermutation, out: *mut bool) -> SautStatus {
    guard(|| {
        let p = perm(p, "p")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = p.is_even();
        Ok(())
    })
}

/// Cycle notation such as `(0 3)(1 2 4)`.
///
/// # Safety
/// `p` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_permutation_to_string(p: *const SautPermutation, out: *mut *mut c_char) -> SautStatus {
    guard(|| {
        let p = perm(p, "p")?;
        if out.is_null() {
            return Err(null("out"));
        }
        write_string(out, p.to_string())
    })
}

/// A search for rank `rank` over degrees `lo..=hi` with default settings.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_search_new(rank: usize, lo: usize, hi: usize, out: *mut *mut SautSearch) -> SautStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = SearchConfig::new(rank, lo, hi);
        config.validate().map_err(core_err)?;
        *out = Box::into_raw(Box::new(SautSearch { config, options: RunOptions::default() }));
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn saut_search_free(s: *mut SautSearch) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

unsafe fn search<'a>(s: *mut SautSearch) -> Result<&'a mut SautSearch, (SautStatus, String)> {
    s.as_mut().ok_or_else(|| null("search"))
}

/// Worker threads; 0 restores the default.
///
/// # Safety
/// `s` must be live.
#[no_mangle]
pub unsafe extern "C" fn saut_search_set_threads(s: *mut SautSearch, threads: usize) -> SautStatus {
    guard(|| {
        search(s)?.options.threads = (threads > 0).then_some(threads);
        Ok(())
    })
}

/// 0 = auto, 1 = on, 2 = off.
///
/// # Safety
/// `s` must be live.
#[no_mangle]
pub unsafe extern "C" fn saut_search_set_injectivity(s: *mut SautSearch, mode: u32) -> SautStatus {
    guard(|| {
        search(s)?.config.injectivity = match mode {
            0 => InjectivityMode::Auto,
            1 => InjectivityMode::On,
            2 => InjectivityMode::Off,
            _ => return Err((SautStatus::InvalidInput, format!("injectivity mode {mode}"))),
        };
        Ok(())
    })
}

/// # Safety
/// `s` must be live.
#[no_mangle]
pub unsafe extern "C" fn saut_search_set_compatibility(s: *mut SautSearch, on: bool) -> SautStatus {
    guard(|| {
        search(s)?.config.compatibility = on;
        Ok(())
    })
}

/// # Safety
/// `s` must be live.
#[no_mangle]
pub unsafe extern "C" fn saut_search_set_early_stop(s: *mut SautSearch, on: bool) -> SautStatus {
    guard(|| {
        search(s)?.config.early_stop = on;
        Ok(())
    })
}

/// Checkpoint directory; null clears it.
///
/// # Safety
/// `s` must be live; `dir` must be a nul-terminated string or null.
#[no_mangle]
pub unsafe extern "C" fn saut_search_set_checkpoint(s: *mut SautSearch, dir: *const c_char) -> SautStatus {
    guard(|| {
        let s = search(s)?;
        s.options.checkpoint = if dir.is_null() { None } else { Some(PathBuf::from(read_str(dir, "dir")?)) };
        Ok(())
    })
}

fn report_json(status: RunStatus) -> Result<String, (SautStatus, String)> {
    match status {
        RunStatus::Complete(report) => to_pretty(&report).map_err(core_err),
        RunStatus::Interrupted { steps } => Err((SautStatus::Interrupted, format!("interrupted after {steps} steps"))),
    }
}

/// Runs the search and returns the report as JSON.
///
/// # Safety
/// `s` must be live; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_search_run(s: *mut SautSearch, report: *mut *mut c_char) -> SautStatus {
    guard(|| {
        let s = search(s)?;
        if report.is_null() {
            return Err(null("report"));
        }
        let status = run_search(&s.config, &s.options).map_err(core_err)?;
        write_string(report, report_json(status)?)
    })
}

/// Continues a checkpointed search; `threads` 0 means the default.
///
/// # Safety
/// `dir` must be a nul-terminated string; `report` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_resume(dir: *const c_char, threads: usize, report: *mut *mut c_char) -> SautStatus {
    guard(|| {
        let dir = PathBuf::from(read_str(dir, "dir")?);
        if report.is_null() {
            return Err(null("report"));
        }
        let opts = RunOptions { threads: (threads > 0).then_some(threads), ..Default::default() };
        let status = resume(&dir, &opts).map_err(core_err)?;
        write_string(report, report_json(status)?)
    })
}

/// Checks a certificate given as JSON text. `check` (optional) receives the check as JSON.
///
/// # Safety
/// `json` must be a nul-terminated string; `passed` must be writable; `check` may be null.
#[no_mangle]
pub unsafe extern "C" fn saut_verify_certificate_json(
    json: *const c_char,
    passed: *mut bool,
    check: *mut *mut c_char,
) -> SautStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        if passed.is_null() {
            return Err(null("passed"));
        }
        let cert: Certificate = serde_json::from_str(text).map_err(|e| (SautStatus::Parse, e.to_string()))?;
        let result = check_certificate(&cert).map_err(core_err)?;
        *passed = result.passed;
        if !check.is_null() {
            write_string(check, to_pretty(&result).map_err(core_err)?)?;
        }
        Ok(())
    })
}

/// The control certificate for the action on the nonzero vectors of `F_2^rank`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_control_psl_json(rank: usize, out: *mut *mut c_char) -> SautStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let t = psl_action(rank).map_err(core_err)?;
        let origin = Origin::Control { description: format!("GL_{rank}(F_2) acting on the nonzero vectors of F_2^{rank}") };
        let cert = Certificate::from_images(&t, origin).map_err(core_err)?;
        write_string(out, to_pretty(&cert).map_err(core_err)?)
    })
}

/// Checks every relation on the automorphisms of rank `rank`.
///
/// # Safety
/// `checked` and `failures` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_gersten_selftest(rank: usize, checked: *mut u64, failures: *mut u64) -> SautStatus {
    guard(|| {
        if checked.is_null() || failures.is_null() {
            return Err(null("checked or failures"));
        }
        let audit = check_gersten(rank).map_err(core_err)?;
        *checked = audit.total_checked();
        *failures = audit.failures.len() as u64;
        Ok(())
    })
}

/// The order-12 character of `[[a, b], [c, d]]` in `SL_2(Z)`, as an exponent mod 12.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn saut_chi(a: i64, b: i64, c: i64, d: i64, out: *mut u8) -> SautStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let m = SL2Mat::new(a, b, c, d).map_err(core_err)?;
        *out = chi(&m).map_err(core_err)?;
        Ok(())
    })
}
