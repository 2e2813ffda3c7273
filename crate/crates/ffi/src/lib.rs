//! C ABI over the qcprop engine.
//!
//! Fragments and diagrams are opaque heap handles released with their `_free`
//! function. Every fallible call returns a [`QcpropStatus`]; on failure the
//! message is available from [`qcprop_last_error`] until the next call on the
//! same thread. Strings handed out by the library are released with
//! [`qcprop_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qcprop::diagram::CanonicalDiagram;
use qcprop::error::Error;
use qcprop::fragments::{self, Fragment};
use qcprop::rewrite::{self, Budget};

/// Result of an FFI call. The first four values match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QcpropStatus {
    Ok = 0,
    /// The question was answered in the negative.
    Negative = 1,
    /// Malformed input: parse errors, unknown names, width mismatches.
    Invalid = 2,
    /// A search or enumeration budget ran out before an answer.
    Budget = 3,
    /// A required pointer argument was null.
    NullArgument = 4,
    /// A string argument was not valid UTF-8.
    Utf8 = 5,
    /// The library panicked; the handle arguments should be considered unusable.
    Panic = 6,
}

/// A loaded presentation.
pub struct QcpropFragment {
    inner: Fragment,
}

/// A diagram in canonical form over the generators of some fragment.
pub struct QcpropDiagram {
    inner: CanonicalDiagram,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let c = CString::new(msg.into().replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QcpropStatus {
    match e {
        Error::CapExceeded(_) => QcpropStatus::Budget,
        Error::Parse { .. }
        | Error::Io(_)
        | Error::UnknownFragment(_)
        | Error::UnknownGenerator(_)
        | Error::WidthMismatch(_)
        | Error::ShortcutMismatch(_)
        | Error::UnknownConstant(_)
        | Error::DimensionMismatch(_) => QcpropStatus::Invalid,
        _ => QcpropStatus::Negative,
    }
}

/// Runs `body`, converting errors and panics into a status and a stored message.
fn guard(body: impl FnOnce() -> Result<QcpropStatus, (QcpropStatus, String)>) -> QcpropStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            QcpropStatus::Panic
        }
    }
}

fn lib<T>(r: qcprop::error::Result<T>) -> Result<T, (QcpropStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, (QcpropStatus, String)> {
    if p.is_null() {
        return Err((QcpropStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (QcpropStatus::Utf8, "string argument is not UTF-8".into()))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, (QcpropStatus, String)> {
    p.as_ref()
        .ok_or_else(|| (QcpropStatus::NullArgument, "null handle argument".into()))
}

unsafe fn out_arg<T>(p: *mut T, v: T) -> Result<(), (QcpropStatus, String)> {
    if p.is_null() {
        return Err((QcpropStatus::NullArgument, "null output argument".into()));
    }
    p.write(v);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("interior nul removed").into_raw()
}

/// Message of the last failed call on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn qcprop_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qcprop_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a shipped fragment by name, or parses fragment source text when
/// `is_source` is nonzero. Unsound presentations are rejected.
///
/// # Safety
/// `spec` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcprop_fragment_load(
    spec: *const c_char,
    is_source: c_int,
    out: *mut *mut QcpropFragment,
) -> QcpropStatus {
    guard(|| {
        let spec = str_arg(spec)?;
        let f = if is_source != 0 {
            lib(fragments::parse_fragment(spec))?
        } else {
            lib(fragments::load_fragment(spec))?
        };
        out_arg(out, Box::into_raw(Box::new(QcpropFragment { inner: f })))?;
        Ok(QcpropStatus::Ok)
    })
}

/// # Safety
/// `f` must be null or a handle from [`qcprop_fragment_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcprop_fragment_free(f: *mut QcpropFragment) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// SHA-256 of the fragment source, hex encoded. Free with [`qcprop_string_free`].
///
/// # Safety
/// `f` must be a live fragment handle.
#[no_mangle]
pub unsafe extern "C" fn qcprop_fragment_content_hash(f: *const QcpropFragment) -> *mut c_char {
    match f.as_ref() {
        Some(f) => c_string(f.inner.content_hash.clone()),
        None => std::ptr::null_mut(),
    }
}

/// Checks every axiom exactly. `Ok` when all are sound, `Negative` otherwise.
///
/// # Safety
/// `f` must be a live fragment handle.
#[no_mangle]
pub unsafe extern "C" fn qcprop_fragment_soundness(f: *const QcpropFragment) -> QcpropStatus {
    guard(|| {
        let f = ref_arg(f)?;
        let r = f.inner.soundness_check();
        if r.all_sound {
            Ok(QcpropStatus::Ok)
        } else {
            let bad: Vec<&str> = r.entries.iter().filter(|e| !e.sound).map(|e| e.axiom.as_str()).collect();
            Err((QcpropStatus::Negative, format!("unsound axioms: {}", bad.join(", "))))
        }
    })
}

/// Parses a term over the fragment's generators and shortcuts into canonical form.
///
/// # Safety
/// `f` must be a live fragment handle, `term` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcprop_diagram_parse(
    f: *const QcpropFragment,
    term: *const c_char,
    out: *mut *mut QcpropDiagram,
) -> QcpropStatus {
    guard(|| {
        let f = ref_arg(f)?;
        let t = lib(qcprop::diagram::parse_term(str_arg(term)?))?;
        let c = lib(f.inner.canonical(&t))?;
        out_arg(out, Box::into_raw(Box::new(QcpropDiagram { inner: c })))?;
        Ok(QcpropStatus::Ok)
    })
}

/// # Safety
/// `d` must be null or a handle from [`qcprop_diagram_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qcprop_diagram_free(d: *mut QcpropDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of wires of a diagram, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live diagram handle.
#[no_mangle]
pub unsafe extern "C" fn qcprop_diagram_width(d: *const QcpropDiagram) -> usize {
    d.as_ref().map_or(0, |d| d.inner.width())
}

/// The canonical term text of a diagram. Free with [`qcprop_string_free`].
///
/// # Safety
/// `d` must be a live diagram handle.
#[no_mangle]
pub unsafe extern "C" fn qcprop_diagram_normal_form(d: *const QcpropDiagram) -> *mut c_char {
    match d.as_ref() {
        Some(d) => c_string(d.inner.to_term().to_string()),
        None => std::ptr::null_mut(),
    }
}

/// Exact unitary of a diagram as JSON: rows of entries, each entry the eight
/// rational coefficients over powers of a primitive 24th root of unity.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcprop_diagram_eval_json(
    f: *const QcpropFragment,
    d: *const QcpropDiagram,
    out: *mut *mut c_char,
) -> QcpropStatus {
    guard(|| {
        let (f, d) = (ref_arg(f)?, ref_arg(d)?);
        let m = lib(f.inner.eval(&d.inner))?;
        let rows: Vec<Vec<[String; 8]>> = m
            .rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_strings()).collect())
            .collect();
        let json = serde_json::to_string(&rows).expect("strings serialize");
        out_arg(out, c_string(json))?;
        Ok(QcpropStatus::Ok)
    })
}

/// Exact semantic equality of two diagrams: `Ok` if equal, `Negative` if not.
///
/// # Safety
/// Handles must be live.
#[no_mangle]
pub unsafe extern "C" fn qcprop_diagram_semantically_equal(
    f: *const QcpropFragment,
    a: *const QcpropDiagram,
    b: *const QcpropDiagram,
) -> QcpropStatus {
    guard(|| {
        let (f, a, b) = (ref_arg(f)?, ref_arg(a)?, ref_arg(b)?);
        if lib(f.inner.eval(&a.inner))? == lib(f.inner.eval(&b.inner))? {
            Ok(QcpropStatus::Ok)
        } else {
            Ok(QcpropStatus::Negative)
        }
    })
}

/// Searches for a derivation from `a` to `b` within `max_depth` rule steps.
/// On `Ok`, `script_out` (if not null) receives the derivation script text.
/// Returns `Negative` when the diagrams differ semantically and `Budget` when
/// the search ran out.
///
/// # Safety
/// Handles must be live; `script_out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn qcprop_derive(
    f: *const QcpropFragment,
    a: *const QcpropDiagram,
    b: *const QcpropDiagram,
    max_depth: usize,
    script_out: *mut *mut c_char,
) -> QcpropStatus {
    guard(|| {
        let (f, a, b) = (ref_arg(f)?, ref_arg(a)?, ref_arg(b)?);
        if lib(f.inner.eval(&a.inner))? != lib(f.inner.eval(&b.inner))? {
            return Ok(QcpropStatus::Negative);
        }
        let budget = Budget {
            max_depth,
            ..Budget::default()
        };
        let found = lib(rewrite::search_equal(&a.inner.to_term(), &b.inner.to_term(), &f.inner, budget))?;
        match found {
            Some(script) => {
                if !script_out.is_null() {
                    script_out.write(c_string(script.to_text()));
                }
                Ok(QcpropStatus::Ok)
            }
            None => Err((QcpropStatus::Budget, format!("no derivation within depth {max_depth}"))),
        }
    })
}

/// Replays every derivation in `src`. `Ok` when all check, `Negative` when
/// some step fails; the first failure is reported through [`qcprop_last_error`].
///
/// # Safety
/// `src` must be a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qcprop_check_derivations(src: *const c_char) -> QcpropStatus {
    guard(|| {
        let results = lib(rewrite::check_corpus(str_arg(src)?))?;
        for (i, r) in results.into_iter().enumerate() {
            if let Err(e) = r {
                return Err((QcpropStatus::Negative, format!("derivation {}: {e}", i + 1)));
            }
        }
        Ok(QcpropStatus::Ok)
    })
}

/// Runs a CLI command, e.g. `{"closure", "Cliff", "--wires", "1"}` without the
/// program name. `json_out` receives the printed JSON; the return value is the
/// CLI exit code.
///
/// # Safety
/// `argv` must point to `argc` nul-terminated strings; `json_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qcprop_run_command(
    argc: c_int,
    argv: *const *const c_char,
    json_out: *mut *mut c_char,
) -> c_int {
    let mut code = 0;
    let status = guard(|| {
        if argv.is_null() && argc > 0 {
            return Err((QcpropStatus::NullArgument, "null argv".into()));
        }
        let mut args = vec!["qcprop".to_string()];
        for i in 0..argc.max(0) as usize {
            args.push(str_arg(*argv.add(i))?.to_string());
        }
        let out = qcprop::cli::run(args);
        code = out.code;
        out_arg(json_out, c_string(out.stdout))?;
        Ok(QcpropStatus::Ok)
    });
    if status == QcpropStatus::Ok {
        code
    } else {
        status as c_int
    }
}
