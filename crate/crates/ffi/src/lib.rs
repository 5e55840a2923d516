//! C interface to the rewriting engine.
//!
//! Contexts are opaque handles created by `confree_*_new` and released by the
//! matching `_free`. Every fallible call returns a [`ConfreeStatus`]; on failure
//! `confree_last_error` describes the problem. Strings returned through out
//! pointers belong to the caller and are released with `confree_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use confree::assoc::AssocConfContext;
use confree::lie::LieConfContext;
use confree::rewrite::Rewriter;
use confree::terms::{parse_poly, render_poly, Alphabet, LocalityFn, OrderSpec};
use confree::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfreeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Argument = 3,
    Syntax = 4,
    UnknownLetter = 5,
    StepLimit = 6,
    Cycle = 7,
    Window = 8,
    Structure = 9,
    Internal = 10,
}

/// Coefficient algebra of the free Lie conformal algebra.
pub struct ConfreeLie {
    ctx: LieConfContext,
}

/// Coefficient algebra of the free associative conformal algebra.
pub struct ConfreeAssoc {
    ctx: AssocConfContext,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ConfreeStatus {
    match e {
        Error::Argument(_) => ConfreeStatus::Argument,
        Error::Syntax { .. } => ConfreeStatus::Syntax,
        Error::UnknownLetter(_) => ConfreeStatus::UnknownLetter,
        Error::StepLimit { .. } => ConfreeStatus::StepLimit,
        Error::Cycle(_) => ConfreeStatus::Cycle,
        Error::Window(_) => ConfreeStatus::Window,
        Error::Structure(_) | Error::Locality(_) => ConfreeStatus::Structure,
        Error::NoLeadingTerm => ConfreeStatus::Internal,
    }
}

struct Fail(ConfreeStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ConfreeStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ConfreeStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            ConfreeStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(ConfreeStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(ConfreeStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(ConfreeStatus::NullPointer, "handle is null".into()))
}

fn out_ptr<T>(p: *mut T) -> Result<(), Fail> {
    if p.is_null() {
        Err(Fail(ConfreeStatus::NullPointer, "output pointer is null".into()))
    } else {
        Ok(())
    }
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(ConfreeStatus::Internal, "interior NUL".into()))?;
    *out = c.into_raw();
    Ok(())
}

fn reduce_text(rw: &Rewriter, alphabet: &Alphabet, spec: OrderSpec, text: &str) -> Result<String, Fail> {
    let p = parse_poly(text, alphabet)?;
    let nf = rw.reduce_poly(&p)?;
    Ok(render_poly(&nf, alphabet, spec))
}

fn sweep(rw: &Rewriter, alphabet: &Alphabet, lo: i64, hi: i64) -> Result<(usize, usize), Fail> {
    if lo > hi {
        return Err(Fail(ConfreeStatus::Argument, format!("empty window {lo}..{hi}")));
    }
    let letters: Vec<_> = alphabet.letters().collect();
    let res = rw.confluence_sweep(&letters, lo, hi)?;
    Ok((res.len(), res.iter().filter(|c| !c.ok).count()))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn confree_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn confree_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn confree_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a Lie context over the comma separated `letters` with constant locality `n`.
///
/// # Safety
/// `letters` must be a NUL terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn confree_lie_new(letters: *const c_char, n: u32, out: *mut *mut ConfreeLie) -> ConfreeStatus {
    guard(|| {
        out_ptr(out)?;
        let alphabet = Alphabet::parse(str_arg(letters, "letters")?)?;
        *out = Box::into_raw(Box::new(ConfreeLie { ctx: LieConfContext::new(alphabet, n) }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live handle from `confree_lie_new`.
#[no_mangle]
pub unsafe extern "C" fn confree_lie_free(h: *mut ConfreeLie) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Normal form of `poly` in U(L).
///
/// # Safety
/// `h` must be a live handle, `poly` NUL terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn confree_lie_reduce(h: *const ConfreeLie, poly: *const c_char, out: *mut *mut c_char) -> ConfreeStatus {
    guard(|| {
        out_ptr(out)?;
        let h = handle(h)?;
        let s = reduce_text(h.ctx.rewriter(), h.ctx.alphabet(), OrderSpec::LIE, str_arg(poly, "poly")?)?;
        write_string(out, s)
    })
}

/// Image of `poly` in the vertex algebra V = U(L)/U(L)L+.
///
/// # Safety
/// `h` must be a live handle, `poly` NUL terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn confree_lie_project(h: *const ConfreeLie, poly: *const c_char, out: *mut *mut c_char) -> ConfreeStatus {
    guard(|| {
        out_ptr(out)?;
        let h = handle(h)?;
        let p = parse_poly(str_arg(poly, "poly")?, h.ctx.alphabet())?;
        let v = h.ctx.project_to_v(&p)?;
        write_string(out, render_poly(v.as_poly(), h.ctx.alphabet(), OrderSpec::LIE))
    })
}

/// Checks every ambiguity with indices in `lo..=hi`.
///
/// # Safety
/// `h` must be a live handle; `ambiguities` and `failures` writable.
#[no_mangle]
pub unsafe extern "C" fn confree_lie_confluence(
    h: *const ConfreeLie,
    lo: i64,
    hi: i64,
    ambiguities: *mut usize,
    failures: *mut usize,
) -> ConfreeStatus {
    guard(|| {
        out_ptr(ambiguities)?;
        out_ptr(failures)?;
        let h = handle(h)?;
        let (a, f) = sweep(h.ctx.rewriter(), h.ctx.alphabet(), lo, hi)?;
        *ambiguities = a;
        *failures = f;
        Ok(())
    })
}

/// Creates an associative context with constant locality `n`.
///
/// # Safety
/// `letters` must be a NUL terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn confree_assoc_new(letters: *const c_char, n: u32, out: *mut *mut ConfreeAssoc) -> ConfreeStatus {
    guard(|| {
        out_ptr(out)?;
        let alphabet = Alphabet::parse(str_arg(letters, "letters")?)?;
        let ctx = AssocConfContext::new(alphabet, LocalityFn::Constant(n))?;
        *out = Box::into_raw(Box::new(ConfreeAssoc { ctx }));
        Ok(())
    })
}

/// Creates an associative context from a locality function in JSON,
/// `{"constant": N}` or `{"pairs": {"a,b": 2, ...}}`.
///
/// # Safety
/// `letters` and `locality_json` must be NUL terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn confree_assoc_new_json(
    letters: *const c_char,
    locality_json: *const c_char,
    out: *mut *mut ConfreeAssoc,
) -> ConfreeStatus {
    guard(|| {
        out_ptr(out)?;
        let alphabet = Alphabet::parse(str_arg(letters, "letters")?)?;
        let locality = LocalityFn::from_json(str_arg(locality_json, "locality")?, &alphabet)?;
        let ctx = AssocConfContext::new(alphabet, locality)?;
        *out = Box::into_raw(Box::new(ConfreeAssoc { ctx }));
        Ok(())
    })
}

/// # Safety
/// `h` must be null or a live handle from `confree_assoc_new*`.
#[no_mangle]
pub unsafe extern "C" fn confree_assoc_free(h: *mut ConfreeAssoc) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Normal form of `poly` in A.
///
/// # Safety
/// `h` must be a live handle, `poly` NUL terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn confree_assoc_reduce(h: *const ConfreeAssoc, poly: *const c_char, out: *mut *mut c_char) -> ConfreeStatus {
    guard(|| {
        out_ptr(out)?;
        let h = handle(h)?;
        let s = reduce_text(h.ctx.rewriter(), h.ctx.alphabet(), OrderSpec::ASSOC, str_arg(poly, "poly")?)?;
        write_string(out, s)
    })
}

/// # Safety
/// `h` must be a live handle; `ambiguities` and `failures` writable.
#[no_mangle]
pub unsafe extern "C" fn confree_assoc_confluence(
    h: *const ConfreeAssoc,
    lo: i64,
    hi: i64,
    ambiguities: *mut usize,
    failures: *mut usize,
) -> ConfreeStatus {
    guard(|| {
        out_ptr(ambiguities)?;
        out_ptr(failures)?;
        let h = handle(h)?;
        let (a, f) = sweep(h.ctx.rewriter(), h.ctx.alphabet(), lo, hi)?;
        *ambiguities = a;
        *failures = f;
        Ok(())
    })
}

/// Number of basis words of A of length `l` and index sum `k`.
///
/// # Safety
/// `h` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn confree_assoc_dim(h: *const ConfreeAssoc, k: i64, l: usize, out: *mut u64) -> ConfreeStatus {
    guard(|| {
        out_ptr(out)?;
        let h = handle(h)?;
        *out = h.ctx.dim(k, l)? as u64;
        Ok(())
    })
}
