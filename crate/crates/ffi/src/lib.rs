//! C ABI for pquot: opaque derivation handles, status codes and JSON reports.
//!
//! Strings returned through `char **` outputs are owned by the caller and must be
//! released with `pq_string_free`. The message of the last failure on the calling
//! thread is available from `pq_last_error`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pquot::derivation::Derivation;
use pquot::error::Error;
use pquot::parse::{parse_derivation, Macros};
use pquot::report::{cmd_classify, cmd_oracle_hj, default_precision, CliConfig};
use pquot::series::field;

/// Result of every `pq_*` call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PqStatus {
    Ok = 0,
    /// Invalid input: syntax, arguments, not p-closed, unsupported characteristic.
    User = 1,
    /// Precision or degree bound too low.
    Precision = 2,
    /// The coefficient field must be extended.
    Field = 3,
    /// An internal consistency check failed.
    Internal = 4,
    /// A required pointer argument was null.
    NullArgument = 5,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 6,
    /// A panic was caught at the boundary.
    Panic = 7,
}

impl From<&Error> for PqStatus {
    fn from(e: &Error) -> PqStatus {
        match e.exit_code() {
            2 => PqStatus::Precision,
            3 => PqStatus::Field,
            4 => PqStatus::Internal,
            _ => PqStatus::User,
        }
    }
}

/// Opaque derivation handle.
pub struct PqDerivation {
    inner: Derivation,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: PqStatus, msg: &str) -> PqStatus {
    set_error(msg);
    status
}

fn guard<F: FnOnce() -> PqStatus>(f: F) -> PqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(PqStatus::Panic, "panic inside pquot"),
    }
}

fn from_error(e: Error) -> PqStatus {
    fail(PqStatus::from(&e), &e.to_string())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, PqStatus> {
    if s.is_null() {
        return Err(fail(PqStatus::NullArgument, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(PqStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> PqStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            PqStatus::Ok
        }
        Err(_) => fail(PqStatus::Internal, "output contains a nul byte"),
    }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn pq_version() -> *const c_char {
    static VERSION: &[u8] = concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes();
    VERSION.as_ptr() as *const c_char
}

/// Message of the last failed call on this thread; empty if none. Valid until the next failure.
#[no_mangle]
pub extern "C" fn pq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pq_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a derivation such as `y*dx + x^2*dy` over F_{p^k}.
#[no_mangle]
pub unsafe extern "C" fn pq_derivation_parse(
    text: *const c_char,
    p: u32,
    k: u32,
    out: *mut *mut PqDerivation,
) -> PqStatus {
    guard(|| {
        if out.is_null() {
            return fail(PqStatus::NullArgument, "output pointer is null");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let f = match field(p, k) {
            Ok(f) => f,
            Err(e) => return from_error(e),
        };
        match parse_derivation(text, &f, &Macros::new()) {
            Ok(d) => {
                *out = Box::into_raw(Box::new(PqDerivation { inner: d }));
                PqStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a derivation handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn pq_derivation_free(d: *mut PqDerivation) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

unsafe fn handle<'a>(d: *const PqDerivation) -> Result<&'a Derivation, PqStatus> {
    if d.is_null() {
        return Err(fail(PqStatus::NullArgument, "derivation handle is null"));
    }
    Ok(&(*d).inner)
}

/// Canonical text of a derivation.
#[no_mangle]
pub unsafe extern "C" fn pq_derivation_render(d: *const PqDerivation, out: *mut *mut c_char) -> PqStatus {
    guard(|| {
        if out.is_null() {
            return fail(PqStatus::NullArgument, "output pointer is null");
        }
        match handle(d) {
            Ok(d) => write_string(out, d.render()),
            Err(s) => s,
        }
    })
}

/// Largest `m` with every coefficient in the m-th power of the maximal ideal.
#[no_mangle]
pub unsafe extern "C" fn pq_derivation_order(d: *const PqDerivation, out: *mut u64) -> PqStatus {
    guard(|| {
        if out.is_null() {
            return fail(PqStatus::NullArgument, "output pointer is null");
        }
        match handle(d).map(Derivation::order) {
            Ok(Ok(o)) => {
                *out = o;
                PqStatus::Ok
            }
            Ok(Err(e)) => from_error(e),
            Err(s) => s,
        }
    })
}

/// p-closedness class: `NotPClosed`, `Multiplicative`, `Additive` or `PClosedNonUnit`.
#[no_mangle]
pub unsafe extern "C" fn pq_derivation_pclosedness(d: *const PqDerivation, out: *mut *mut c_char) -> PqStatus {
    guard(|| {
        if out.is_null() {
            return fail(PqStatus::NullArgument, "output pointer is null");
        }
        let d = match handle(d) {
            Ok(d) => d,
            Err(s) => return s,
        };
        let prec = default_precision(d.field().p()) as u32;
        match d.pclosedness(prec) {
            Ok(pc) => write_string(out, pc.kind().to_string()),
            Err(e) => from_error(e),
        }
    })
}

/// Full classification report as JSON. `precision` 0 and `depth` 0 select the defaults.
#[no_mangle]
pub unsafe extern "C" fn pq_classify_json(
    d: *const PqDerivation,
    precision: u64,
    depth: u32,
    out: *mut *mut c_char,
) -> PqStatus {
    guard(|| {
        if out.is_null() {
            return fail(PqStatus::NullArgument, "output pointer is null");
        }
        let d = match handle(d) {
            Ok(d) => d,
            Err(s) => return s,
        };
        let f = d.field();
        let mut cfg = CliConfig::new(f.p());
        cfg.k = f.k();
        if precision != 0 {
            cfg.precision = precision;
        }
        if depth != 0 {
            cfg.depth = depth;
        }
        match cmd_classify(&cfg, &d.render()) {
            Ok(r) => write_string(out, r.json.to_string()),
            Err(e) => from_error(e),
        }
    })
}

/// Discrepancies of the minimal resolution of 1/p(1, lambda) as a JSON report.
#[no_mangle]
pub unsafe extern "C" fn pq_hj_discrepancies_json(p: u32, lambda: u32, out: *mut *mut c_char) -> PqStatus {
    guard(|| {
        if out.is_null() {
            return fail(PqStatus::NullArgument, "output pointer is null");
        }
        match cmd_oracle_hj(p, lambda) {
            Ok(r) => write_string(out, r.json.to_string()),
            Err(e) => from_error(e),
        }
    })
}
