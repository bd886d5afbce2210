//! C ABI over the `dtopo` library.
//!
//! Sequences are opaque handles created by [`dtopo_seq_parse`] and released
//! with [`dtopo_seq_free`]. Every fallible call returns a [`DtopoStatus`];
//! on failure [`dtopo_last_error`] describes the problem. Strings handed out
//! by the library must be released with [`dtopo_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dtopo::{DSequence, Error};
use num_bigint::BigInt;

/// Opaque D-sequence handle.
pub struct DtopoSeq(DSequence);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtopoStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    MalformedSequence = 4,
    OutOfRange = 5,
    InvalidArgument = 6,
    Precondition = 7,
    Horizon = 8,
    Panic = 9,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("no NUL bytes")));
}

fn status_of(e: &Error) -> DtopoStatus {
    match e {
        Error::Parse { .. } => DtopoStatus::Parse,
        Error::MalformedSequence { .. } => DtopoStatus::MalformedSequence,
        Error::OutOfRange { .. } => DtopoStatus::OutOfRange,
        Error::Precondition(_) => DtopoStatus::Precondition,
        Error::Horizon(_) => DtopoStatus::Horizon,
        Error::InvalidDenominator
        | Error::InvalidLevel(_)
        | Error::InvalidExpansion(_)
        | Error::InvalidIndices(_)
        | Error::IncompatibleBase(..) => DtopoStatus::InvalidArgument,
    }
}

struct Failure(DtopoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> DtopoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DtopoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DtopoStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(DtopoStatus::NullArgument, format!("{name} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DtopoStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn int_arg(p: *const c_char, name: &str) -> Result<BigInt, Failure> {
    let s = str_arg(p, name)?;
    s.trim()
        .parse()
        .map_err(|_| Failure(DtopoStatus::InvalidArgument, format!("{name} `{s}` is not an integer")))
}

unsafe fn seq_arg<'a>(p: *const DtopoSeq, name: &str) -> Result<&'a DSequence, Failure> {
    p.as_ref()
        .map(|s| &s.0)
        .ok_or_else(|| Failure(DtopoStatus::NullArgument, format!("{name} is NULL")))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(DtopoStatus::NullArgument, "output pointer is NULL".into()));
    }
    *out = v;
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no NUL bytes").into_raw()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dtopo_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dtopo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a sequence spec such as `"ratios:2,3;repeat growth=bounded"`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dtopo_seq_parse(spec: *const c_char, out: *mut *mut DtopoSeq) -> DtopoStatus {
    guard(|| {
        let spec = str_arg(spec, "spec")?;
        let seq = dtopo::dseq::parse_dseq(spec)?;
        write_out(out, Box::into_raw(Box::new(DtopoSeq(seq))))
    })
}

/// # Safety
/// `seq` must come from [`dtopo_seq_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dtopo_seq_free(seq: *mut DtopoSeq) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// Term `b_n` as a decimal string.
///
/// # Safety
/// `seq` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dtopo_seq_term(seq: *const DtopoSeq, n: usize, out: *mut *mut c_char) -> DtopoStatus {
    guard(|| {
        let t = seq_arg(seq, "seq")?.term(n)?;
        write_out(out, c_string(t.to_string()))
    })
}

/// Greedy digit expansion of a decimal integer, as JSON.
///
/// # Safety
/// `seq` must be a live handle, `value` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dtopo_expand(
    seq: *const DtopoSeq,
    value: *const c_char,
    out: *mut *mut c_char,
) -> DtopoStatus {
    guard(|| {
        let b = seq_arg(seq, "seq")?;
        let v = int_arg(value, "value")?;
        let d = dtopo::dseq::expand(b, &v)?;
        let json = serde_json::to_string(&d).map_err(|e| Failure(DtopoStatus::Panic, e.to_string()))?;
        write_out(out, c_string(json))
    })
}

/// Whether `x` lies in `b_n Z`.
///
/// # Safety
/// `seq` must be a live handle, `x` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dtopo_lambda_member(
    seq: *const DtopoSeq,
    n: usize,
    x: *const c_char,
    out: *mut bool,
) -> DtopoStatus {
    guard(|| {
        let b = seq_arg(seq, "seq")?;
        let x = int_arg(x, "x")?;
        write_out(out, dtopo::topo::lambda_member(b, n, &x)?)
    })
}

/// Whether `x` lies in the `tau_c` neighborhood at level `m`.
///
/// # Safety
/// `c` must be a live handle, `x` NUL-terminated, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dtopo_tau_member(
    c: *const DtopoSeq,
    m: u64,
    x: *const c_char,
    out: *mut bool,
) -> DtopoStatus {
    guard(|| {
        let c = seq_arg(c, "c")?;
        let x = int_arg(x, "x")?;
        write_out(out, dtopo::topo::tau_member(c, m, &x)?.member)
    })
}

/// Run a command-line invocation (without the program name), storing the
/// JSON report or the error text in `out`. Returns the command's exit code.
///
/// # Safety
/// `argv` must point to `argc` NUL-terminated strings and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn dtopo_run(argv: *const *const c_char, argc: usize, out: *mut *mut c_char) -> c_int {
    let result = catch_unwind(AssertUnwindSafe(|| -> Result<(c_int, String), Failure> {
        if argv.is_null() && argc > 0 {
            return Err(Failure(DtopoStatus::NullArgument, "argv is NULL".into()));
        }
        let mut args = vec!["dtopo".to_string()];
        for i in 0..argc {
            args.push(str_arg(*argv.add(i), "argument")?.to_string());
        }
        let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
        let code = dtopo::cli::run(args, &mut stdout, &mut stderr);
        let text = if code == 2 { stderr } else { stdout };
        Ok((code, String::from_utf8_lossy(&text).into_owned()))
    }));
    match result {
        Ok(Ok((code, text))) => {
            if code == 2 {
                set_error(text.trim_end());
            }
            if !out.is_null() {
                *out = c_string(text);
            }
            code
        }
        Ok(Err(Failure(_, msg))) => {
            set_error(msg);
            2
        }
        Err(_) => {
            set_error("internal panic");
            2
        }
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dtopo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
