//! C ABI over `dts_core`.
//!
//! Every entry point returns a [`DtsStatus`]. On failure a message is kept
//! per thread and can be read with [`dts_last_error_message`]. Strings
//! handed out through `out` parameters are owned by the caller and must be
//! released with [`dts_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dts_core::fragment::Lexicon;
use dts_core::report::{run_discourse, RunError, RunOptions};
use dts_core::sexpr::{self, print};
use dts_core::subtype::expand_aliases;
use dts_core::{check_type, infer_type, is_subtype, GlobalSignature, Telescope, Term};

/// Result codes shared by all entry points.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DtsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    TypeError = 4,
    /// The discourse could not be read or interpreted by the fragment.
    InterpretationError = 5,
    /// A felicity condition failed: some anaphor has no antecedent.
    NoResolution = 6,
    Panic = 7,
}

/// A lexicon together with the signature it induces.
pub struct DtsEngine {
    lexicon: Lexicon,
    signature: GlobalSignature,
}

impl DtsEngine {
    fn new(lexicon: Lexicon) -> DtsEngine {
        let signature = lexicon.signature();
        DtsEngine { lexicon, signature }
    }
}

struct Failure(DtsStatus, String);

type Outcome<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let msg = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn guard(f: impl FnOnce() -> Outcome<()>) -> DtsStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DtsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DtsStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(Failure(DtsStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(DtsStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn engine_ref<'a>(p: *const DtsEngine) -> Outcome<&'a DtsEngine> {
    p.as_ref().ok_or_else(|| Failure(DtsStatus::NullArgument, "engine is null".into()))
}

fn term(src: &str) -> Outcome<Term> {
    sexpr::parse(src)
        .map(|t| expand_aliases(&t))
        .map_err(|e| Failure(DtsStatus::ParseError, e.to_string()))
}

unsafe fn put(out: *mut *mut c_char, s: Option<String>) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure(DtsStatus::NullArgument, "out is null".into()));
    }
    *out = match s {
        Some(s) => CString::new(s).expect("no interior nul").into_raw(),
        None => ptr::null_mut(),
    };
    Ok(())
}

fn run_failure(e: RunError) -> Failure {
    let status = match e.exit_code() {
        2 => DtsStatus::NoResolution,
        _ if matches!(e, RunError::Resolve { .. }) => DtsStatus::TypeError,
        _ => DtsStatus::InterpretationError,
    };
    Failure(status, e.to_string())
}

/// An engine over the bundled lexicon. Never null.
#[no_mangle]
pub extern "C" fn dts_engine_new() -> *mut DtsEngine {
    Box::into_raw(Box::new(DtsEngine::new(Lexicon::default_lexicon())))
}

/// An engine over a lexicon given in the lexicon file format.
///
/// # Safety
/// `source` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dts_engine_new_with_lexicon(source: *const c_char, out: *mut *mut DtsEngine) -> DtsStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(DtsStatus::NullArgument, "out is null".into()));
        }
        *out = ptr::null_mut();
        let lex = Lexicon::parse(text(source, "source")?)
            .map_err(|e| Failure(DtsStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(DtsEngine::new(lex)));
        Ok(())
    })
}

/// # Safety
/// `engine` must come from one of the constructors and not be used again.
#[no_mangle]
pub unsafe extern "C" fn dts_engine_free(engine: *mut DtsEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Adds `name : ty` to the signature used by the term entry points.
/// Discourses are always resolved against the lexicon's own signature.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn dts_declare(engine: *mut DtsEngine, name: *const c_char, ty: *const c_char) -> DtsStatus {
    guard(|| {
        let eng = engine.as_mut().ok_or_else(|| Failure(DtsStatus::NullArgument, "engine is null".into()))?;
        let name = text(name, "name")?;
        if sexpr::is_reserved(name) {
            return Err(Failure(DtsStatus::ParseError, format!("`{name}` is reserved")));
        }
        let ty = term(text(ty, "ty")?)?;
        dts_core::infer_sort(&eng.signature, &Telescope::new(), &ty)
            .map_err(|e| Failure(DtsStatus::TypeError, e.to_string()))?;
        eng.signature.declare(name, ty);
        Ok(())
    })
}

/// Infers the type of a closed term and writes it to `out`.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn dts_infer_type(engine: *const DtsEngine, src: *const c_char, out: *mut *mut c_char) -> DtsStatus {
    guard(|| {
        let eng = engine_ref(engine)?;
        let t = term(text(src, "term")?)?;
        let ty = infer_type(&eng.signature, &Telescope::new(), &t)
            .map_err(|e| Failure(DtsStatus::TypeError, e.to_string()))?;
        put(out, Some(print(&ty)))
    })
}

/// Checks a closed term against a type, with subtyping. On success `out`
/// receives the term with coercions inserted.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn dts_check_term(
    engine: *const DtsEngine,
    src: *const c_char,
    ty: *const c_char,
    out: *mut *mut c_char,
) -> DtsStatus {
    guard(|| {
        let eng = engine_ref(engine)?;
        let t = term(text(src, "term")?)?;
        let ty = term(text(ty, "ty")?)?;
        let checked = check_type(&eng.signature, &Telescope::new(), &t, &ty)
            .map_err(|e| Failure(DtsStatus::TypeError, e.to_string()))?;
        put(out, Some(print(&checked.term)))
    })
}

/// Writes the coercion witness for `sub <: sup` to `out`, or null when the
/// relation does not hold. Both outcomes return `Ok`.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn dts_subtype(
    engine: *const DtsEngine,
    sub: *const c_char,
    sup: *const c_char,
    out: *mut *mut c_char,
) -> DtsStatus {
    guard(|| {
        let eng = engine_ref(engine)?;
        let a = term(text(sub, "sub")?)?;
        let b = term(text(sup, "sup")?)?;
        let c = is_subtype(&eng.signature, &Telescope::new(), &a, &b);
        put(out, c.map(|c| print(&c.witness)))
    })
}

/// Interprets and resolves a discourse; `out` receives the JSON report.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn dts_resolve_discourse(
    engine: *const DtsEngine,
    discourse: *const c_char,
    trace: bool,
    out: *mut *mut c_char,
) -> DtsStatus {
    guard(|| {
        let eng = engine_ref(engine)?;
        let mut opts = RunOptions::default();
        opts.resolve.trace = trace;
        let report = run_discourse(&eng.lexicon, "<ffi>", text(discourse, "discourse")?, &opts).map_err(run_failure)?;
        put(out, Some(report.to_json()))
    })
}

/// Like [`dts_resolve_discourse`] but writes one `label: formula` line per
/// reading.
///
/// # Safety
/// Pointers must be valid; strings nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn dts_export_fol(
    engine: *const DtsEngine,
    discourse: *const c_char,
    out: *mut *mut c_char,
) -> DtsStatus {
    guard(|| {
        let eng = engine_ref(engine)?;
        let report =
            run_discourse(&eng.lexicon, "<ffi>", text(discourse, "discourse")?, &RunOptions::default()).map_err(run_failure)?;
        put(out, Some(report.to_text(true)))
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn dts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The message for the last failed call on this thread, or null. Valid
/// until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn dts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
