//! C interface to the `ifol` engine.
//!
//! A session is an opaque handle created with [`ifol_session_new`] and
//! released with [`ifol_session_free`]. Every fallible call returns an
//! [`IfolStatus`]; on failure the message is available from
//! [`ifol_session_last_error`] until the next call on the same handle.
//! Strings returned through out-parameters are owned by the caller and must
//! be released with [`ifol_string_free`].

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ifol::epistemic::Answer;
use ifol::session::{Session, SessionError};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfolStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Io = 3,
    Parse = 4,
    Command = 5,
    Engine = 6,
    Panic = 7,
}

/// Three-valued answer to a query.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IfolAnswer {
    Yes = 0,
    No = 1,
    Unknown = 2,
}

impl From<Answer> for IfolAnswer {
    fn from(a: Answer) -> Self {
        match a {
            Answer::Yes => IfolAnswer::Yes,
            Answer::No => IfolAnswer::No,
            Answer::Unknown => IfolAnswer::Unknown,
        }
    }
}

/// Opaque session handle.
pub struct IfolSession {
    inner: Session,
    last_error: Option<CString>,
}

fn status_of(e: &SessionError) -> IfolStatus {
    match e {
        SessionError::At { source, .. } => status_of(source),
        SessionError::Io { .. } => IfolStatus::Io,
        SessionError::Parse(_) | SessionError::Syntax(_) => IfolStatus::Parse,
        SessionError::Command { .. } | SessionError::UnknownCommand(_) => IfolStatus::Command,
        _ => IfolStatus::Engine,
    }
}

fn to_c(s: impl Into<Vec<u8>>) -> CString {
    let mut bytes = s.into();
    bytes.retain(|b| *b != 0);
    CString::new(bytes).expect("nul bytes removed")
}

enum Failure {
    Status(IfolStatus, String),
    Session(SessionError),
}

impl From<SessionError> for Failure {
    fn from(e: SessionError) -> Self {
        Failure::Session(e)
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Status(IfolStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure::Status(IfolStatus::InvalidUtf8, format!("{what}: {e}")))
}

/// Runs `f` against the session, recording any error on the handle.
unsafe fn with_session(
    session: *mut IfolSession,
    f: impl FnOnce(&mut Session) -> Result<(), Failure>,
) -> IfolStatus {
    let Some(s) = session.as_mut() else {
        return IfolStatus::NullArgument;
    };
    s.last_error = None;
    let result = catch_unwind(AssertUnwindSafe(|| f(&mut s.inner)));
    let (status, message) = match result {
        Ok(Ok(())) => return IfolStatus::Ok,
        Ok(Err(Failure::Status(st, m))) => (st, m),
        Ok(Err(Failure::Session(e))) => (status_of(&e), e.to_string()),
        Err(_) => (IfolStatus::Panic, "internal panic".to_owned()),
    };
    s.last_error = Some(to_c(message));
    status
}

unsafe fn put_string(out: *mut *mut c_char, value: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Status(IfolStatus::NullArgument, "output pointer is null".into()));
    }
    *out = to_c(value).into_raw();
    Ok(())
}

/// Creates an empty session. Returns null only if allocation panics.
#[no_mangle]
pub extern "C" fn ifol_session_new() -> *mut IfolSession {
    catch_unwind(|| Box::into_raw(Box::new(IfolSession { inner: Session::new(), last_error: None })))
        .unwrap_or(ptr::null_mut())
}

/// Releases a session. Null is ignored.
///
/// # Safety
/// `session` must come from [`ifol_session_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ifol_session_free(session: *mut IfolSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Loads a knowledge-base file into the session. Relative `corpus` and
/// `templates` directives resolve against the file's directory.
///
/// # Safety
/// `session` must be a live handle and `path` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ifol_session_load_kb(session: *mut IfolSession, path: *const c_char) -> IfolStatus {
    with_session(session, |s| {
        let path = text(path, "path")?;
        s.load_file(Path::new(path))?;
        Ok(())
    })
}

/// Executes one command line. The output, possibly empty, is written to
/// `*out` when `out` is not null.
///
/// # Safety
/// `session` must be a live handle, `line` a nul-terminated string and `out`
/// either null or writable.
#[no_mangle]
pub unsafe extern "C" fn ifol_session_execute(
    session: *mut IfolSession,
    line: *const c_char,
    out: *mut *mut c_char,
) -> IfolStatus {
    with_session(session, |s| {
        let line = text(line, "line")?;
        let result = s.execute(line)?;
        if !out.is_null() {
            put_string(out, result)?;
        }
        Ok(())
    })
}

/// Evaluates a formula in the current world. A sentence yields `true` or
/// `false`; an open formula yields its satisfying assignments.
///
/// # Safety
/// `session` must be a live handle, `formula` a nul-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ifol_session_eval(
    session: *mut IfolSession,
    formula: *const c_char,
    out: *mut *mut c_char,
) -> IfolStatus {
    with_session(session, |s| {
        let formula = text(formula, "formula")?;
        if out.is_null() {
            return Err(Failure::Status(IfolStatus::NullArgument, "output pointer is null".into()));
        }
        let result = s.execute(&format!("eval {formula}"))?;
        put_string(out, result)
    })
}

/// Answers a query against memory and the world.
///
/// # Safety
/// `session` must be a live handle, `query` a nul-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ifol_session_answer(
    session: *mut IfolSession,
    query: *const c_char,
    out: *mut IfolAnswer,
) -> IfolStatus {
    with_session(session, |s| {
        let query = text(query, "query")?;
        if out.is_null() {
            return Err(Failure::Status(IfolStatus::NullArgument, "output pointer is null".into()));
        }
        let q = s.parse_formula(query)?;
        *out = s.answer(&q)?.into();
        Ok(())
    })
}

/// Runs forward chaining with the given introspection budget. The number
/// of atoms added is written to `*added` when it is not null.
///
/// # Safety
/// `session` must be a live handle and `added` either null or writable.
#[no_mangle]
pub unsafe extern "C" fn ifol_session_chain(session: *mut IfolSession, budget: usize, added: *mut usize) -> IfolStatus {
    with_session(session, |s| {
        let before = s.memory().len();
        s.chain(budget)?;
        if !added.is_null() {
            *added = s.memory().len() - before;
        }
        Ok(())
    })
}

/// The message of the last failed call on this handle, or null. The
/// pointer stays valid until the next call on the same handle.
///
/// # Safety
/// `session` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ifol_session_last_error(session: *const IfolSession) -> *const c_char {
    match session.as_ref().and_then(|s| s.last_error.as_ref()) {
        Some(m) => m.as_ptr(),
        None => ptr::null(),
    }
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ifol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn ifol_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
