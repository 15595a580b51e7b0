//! C ABI for origami-kz.
//!
//! Every function returns an [`OkzStatus`]. On failure a message is kept per
//! thread and can be read with [`okz_last_error_message`]. Strings handed out
//! by the library must be released with [`okz_string_free`], origamis with
//! [`okz_origami_free`]. Square labels cross the boundary 1-based.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use origami_kz::dynamics::orbit::{veech_orbit_with, OrbitOptions};
use origami_kz::homology::homology;
use origami_kz::lyapunov::{self, CocycleSamples};
use origami_kz::origami::OrigamiJson;
use origami_kz::perm::Perm;
use origami_kz::report::{self, Command, RunConfig, EXIT_MALFORMED};
use origami_kz::subspace::Space;
use origami_kz::{stratum, Error, Origami};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OkzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NotConnected = 3,
    SizeMismatch = 4,
    Inconclusive = 5,
    Precondition = 6,
    Internal = 7,
}

/// Opaque handle to a validated origami.
pub struct OkzOrigami {
    inner: Origami,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> OkzStatus {
    match e {
        Error::NotConnected { .. } => OkzStatus::NotConnected,
        Error::SizeMismatch(..) | Error::DimensionMismatch(_) => OkzStatus::SizeMismatch,
        Error::PreconditionViolated { .. } => OkzStatus::Precondition,
        Error::OrbitTooLarge { .. } | Error::NoConvergence(_) | Error::DegenerateStream(_) => OkzStatus::Inconclusive,
        Error::InvalidPermutation(_) | Error::Empty | Error::InvalidArgument(_) | Error::Parse(_) | Error::SingularMatrix(_) => OkzStatus::InvalidInput,
        Error::NotInvariant(_) | Error::HypothesisFailure(_) | Error::Internal(_) => OkzStatus::Internal,
    }
}

fn fail(status: OkzStatus, msg: &str) -> OkzStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> OkzStatus {
    fail(status_of(&e), &e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guard(f: impl FnOnce() -> OkzStatus) -> OkzStatus {
    set_error("");
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(OkzStatus::Internal, "panic inside origami-kz"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, OkzStatus> {
    if s.is_null() {
        return Err(fail(OkzStatus::NullPointer, &format!("{what} is null")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(OkzStatus::InvalidInput, &format!("{what} is not UTF-8")))
}

unsafe fn give_string(s: String, out: *mut *mut c_char) -> OkzStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            OkzStatus::Ok
        }
        Err(_) => fail(OkzStatus::Internal, "output contains a NUL byte"),
    }
}

unsafe fn handle<'a>(o: *const OkzOrigami) -> Result<&'a Origami, OkzStatus> {
    o.as_ref().map(|h| &h.inner).ok_or_else(|| fail(OkzStatus::NullPointer, "origami handle is null"))
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Builds an origami from 1-based images `h[i]`, `v[i]` of squares `1..=n`.
///
/// # Safety
/// `h` and `v` must point to `n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okz_origami_new(n: usize, h: *const u32, v: *const u32, out: *mut *mut OkzOrigami) -> OkzStatus {
    guard(|| {
        if h.is_null() || v.is_null() || out.is_null() {
            return fail(OkzStatus::NullPointer, "null argument");
        }
        let read = |p: *const u32| std::slice::from_raw_parts(p, n).iter().map(|&x| x as i64).collect::<Vec<_>>();
        let (hs, vs) = (read(h), read(v));
        let built = Perm::from_one_based(&hs).and_then(|h| Perm::from_one_based(&vs).and_then(|v| Origami::new(h, v, "")));
        match built {
            Ok(o) => {
                *out = Box::into_raw(Box::new(OkzOrigami { inner: o }));
                OkzStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Parses `{"n": …, "h": […], "v": […]}` with 1-based images.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn okz_origami_from_json(json: *const c_char, out: *mut *mut OkzOrigami) -> OkzStatus {
    guard(|| {
        let text = tri!(read_str(json, "json"));
        if out.is_null() {
            return fail(OkzStatus::NullPointer, "out is null");
        }
        let j: OrigamiJson = match serde_json::from_str(text) {
            Ok(j) => j,
            Err(e) => return fail(OkzStatus::InvalidInput, &format!("line {}, column {}: {e}", e.line(), e.column())),
        };
        match Origami::from_json(&j) {
            Ok(o) => {
                *out = Box::into_raw(Box::new(OkzOrigami { inner: o }));
                OkzStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `o` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn okz_origami_free(o: *mut OkzOrigami) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// Genus and cone orders (non-increasing, 0 for regular vertices). When
/// `kappa_cap` is too small nothing is written to `kappa`, `kappa_len`
/// still receives the required length and `SizeMismatch` is returned.
///
/// # Safety
/// `kappa` must have room for `kappa_cap` values; other pointers writable.
#[no_mangle]
pub unsafe extern "C" fn okz_origami_stratum(o: *const OkzOrigami, genus: *mut usize, kappa: *mut usize, kappa_cap: usize, kappa_len: *mut usize) -> OkzStatus {
    guard(|| {
        let o = tri!(handle(o));
        if genus.is_null() || kappa_len.is_null() || (kappa.is_null() && kappa_cap > 0) {
            return fail(OkzStatus::NullPointer, "null output");
        }
        let s = stratum(o);
        *genus = s.genus;
        *kappa_len = s.kappa.len();
        if s.kappa.len() > kappa_cap {
            return fail(OkzStatus::SizeMismatch, &format!("kappa needs {} slots", s.kappa.len()));
        }
        std::ptr::copy_nonoverlapping(s.kappa.as_ptr(), kappa, s.kappa.len());
        OkzStatus::Ok
    })
}

/// Homology data as JSON.
///
/// # Safety
/// `o` must be a valid handle; `out` writable. Free the result with
/// [`okz_string_free`].
#[no_mangle]
pub unsafe extern "C" fn okz_origami_homology_json(o: *const OkzOrigami, out: *mut *mut c_char) -> OkzStatus {
    guard(|| {
        let o = tri!(handle(o));
        if out.is_null() {
            return fail(OkzStatus::NullPointer, "out is null");
        }
        match homology(o) {
            Ok(hd) => give_string(serde_json::to_string(&hd.to_json()).expect("serializable"), out),
            Err(e) => from_error(e),
        }
    })
}

unsafe fn run_report(cfg: &RunConfig, input: &str, out: *mut *mut c_char, exit_code: *mut c_int) -> OkzStatus {
    if out.is_null() || exit_code.is_null() {
        return fail(OkzStatus::NullPointer, "null output");
    }
    let r = report::run_with_input(cfg, input);
    *exit_code = r.exit_code;
    if r.exit_code == EXIT_MALFORMED {
        set_error(&r.output);
        let _ = give_string(r.output, out);
        return OkzStatus::InvalidInput;
    }
    give_string(r.output, out)
}

/// Full check-theorem report (JSON) with the command-line exit code
/// (0 pass, 1 fail, 2 inconclusive) in `exit_code`.
///
/// # Safety
/// `o` must be a valid handle; `out` and `exit_code` writable.
#[no_mangle]
pub unsafe extern "C" fn okz_check_theorem_json(o: *const OkzOrigami, seed: u64, out: *mut *mut c_char, exit_code: *mut c_int) -> OkzStatus {
    guard(|| {
        let o = tri!(handle(o));
        let mut cfg = RunConfig::new(Command::CheckTheorem);
        cfg.seed = seed;
        let input = serde_json::to_string(&o.to_json()).expect("serializable");
        run_report(&cfg, &input, out, exit_code)
    })
}

/// Holonomy around a square for a JSON instance with rational strings
/// (`pairing`, optional `p`, `a`, `b`, `delta`, `eps`, `v`).
///
/// # Safety
/// `instance` must be NUL-terminated; `out` and `exit_code` writable.
#[no_mangle]
pub unsafe extern "C" fn okz_holonomy_square_json(instance: *const c_char, out: *mut *mut c_char, exit_code: *mut c_int) -> OkzStatus {
    guard(|| {
        let text = tri!(read_str(instance, "instance"));
        run_report(&RunConfig::new(Command::Holonomy), text, out, exit_code)
    })
}

/// Rescaled Lyapunov exponents (descending) of the cocycle over the orbit.
/// `relative` selects relative cohomology. `exponents` receives `len`
/// values; `SizeMismatch` if `cap` is smaller.
///
/// # Safety
/// `o` must be a valid handle; `exponents` must have room for `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn okz_lyapunov(o: *const OkzOrigami, seed: u64, steps: usize, relative: bool, exponents: *mut f64, cap: usize, len: *mut usize) -> OkzStatus {
    guard(|| {
        let o = tri!(handle(o));
        if len.is_null() || (exponents.is_null() && cap > 0) {
            return fail(OkzStatus::NullPointer, "null output");
        }
        let g = match veech_orbit_with(o, &OrbitOptions::default()) {
            Ok(g) => g,
            Err(e) => return from_error(e),
        };
        let space = if relative { Space::Relative } else { Space::Absolute };
        let hd = g.base_homology();
        let dim = if relative { hd.rel_rank } else { hd.abs_rank };
        let report = CocycleSamples::new(&g, seed, 20, space).and_then(|mut s| lyapunov::estimate_spectrum(&mut s, dim, steps, lyapunov::DEFAULT_BLOCKS));
        let report = match report {
            Ok(r) => r,
            Err(e) => return from_error(e),
        };
        *len = report.exponents.len();
        if report.exponents.len() > cap {
            return fail(OkzStatus::SizeMismatch, &format!("{} exponents do not fit in {cap}", report.exponents.len()));
        }
        ptr::copy_nonoverlapping(report.exponents.as_ptr(), exponents, report.exponents.len());
        OkzStatus::Ok
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn okz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failure on this thread; empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn okz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, e.g. `"0.1.0"`.
#[no_mangle]
pub extern "C" fn okz_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
