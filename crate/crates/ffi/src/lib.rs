//! C ABI for microanim.
//!
//! Scenarios and players are opaque heap handles. Every fallible call
//! returns an [`MaStatus`]; on failure a message is available from
//! [`ma_last_error`] on the same thread. Strings returned by the library
//! must be released with [`ma_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use microanim::document::{Document, PropertyPath, Value};
use microanim::dsl::{Anim, Seconds};
use microanim::exec::{run_fps, step, ExecError, Progress, Terminal};
use microanim::inspect::{duration, max_duration};
use microanim::script::{load_scenario, Scenario, ScriptError};

/// Status codes. The values 0 to 4 match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaStatus {
    Ok = 0,
    ParseError = 1,
    InspectError = 2,
    OutOfTime = 3,
    RuntimeError = 4,
    NullArgument = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// A loaded scenario.
pub struct MaScenario {
    inner: Scenario,
}

/// A running animation: the current state plus what is left to play.
pub struct MaPlayer {
    state: Document,
    remaining: Option<Anim>,
    elapsed: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let mut msg = msg.into();
    msg.retain(|c| c != '\0');
    let c = CString::new(msg).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: MaStatus, msg: impl Into<String>) -> MaStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> MaStatus) -> MaStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(MaStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, MaStatus> {
    if s.is_null() {
        return Err(fail(MaStatus::NullArgument, "string argument is null"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(MaStatus::InvalidArgument, "string argument is not UTF-8"))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn exec_status(e: &ExecError) -> MaStatus {
    match e {
        ExecError::NegativeDelta(_) | ExecError::NonFiniteDelta(_) | ExecError::InvalidFps(_) => {
            MaStatus::InvalidArgument
        }
        _ => MaStatus::RuntimeError,
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ma_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ma_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a scenario from NUL-terminated JSON. On success `*out` receives
/// a handle to free with [`ma_scenario_free`].
///
/// # Safety
/// `json` must be NULL or a valid NUL-terminated string; `out` must be
/// NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ma_scenario_load(json: *const c_char, out: *mut *mut MaScenario) -> MaStatus {
    guard(|| {
        if out.is_null() {
            return fail(MaStatus::NullArgument, "out is null");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_scenario(text.as_bytes()) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(MaScenario { inner }));
                MaStatus::Ok
            }
            Err(e @ ScriptError::Schedule(_)) => fail(MaStatus::InspectError, e.to_string()),
            Err(e) => fail(MaStatus::ParseError, e.to_string()),
        }
    })
}

/// # Safety
/// `scenario` must be NULL or a handle from [`ma_scenario_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ma_scenario_free(scenario: *mut MaScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

unsafe fn inspect_with(
    scenario: *const MaScenario,
    out: *mut f64,
    f: impl FnOnce(&Anim) -> Result<f64, microanim::inspect::InspectError>,
) -> MaStatus {
    guard(|| {
        if scenario.is_null() || out.is_null() {
            return fail(MaStatus::NullArgument, "scenario or out is null");
        }
        match f(&(*scenario).inner.animation) {
            Ok(d) => {
                *out = d;
                MaStatus::Ok
            }
            Err(e) => fail(MaStatus::InspectError, e.to_string()),
        }
    })
}

/// Exact duration in seconds.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_scenario_duration(scenario: *const MaScenario, out: *mut f64) -> MaStatus {
    inspect_with(scenario, out, |a| duration(a).map(Seconds::get))
}

/// Maximum duration in seconds over all conditional branches.
///
/// # Safety
/// `scenario` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_scenario_max_duration(scenario: *const MaScenario, out: *mut f64) -> MaStatus {
    inspect_with(scenario, out, |a| max_duration(a).map(|m| m.get()))
}

/// Runs the scenario at `fps` for at most `max_time` seconds and stores
/// the JSON-lines frame trace in `*out_trace` (free with
/// [`ma_string_free`]). Returns `MA_STATUS_OUT_OF_TIME` with a trace when
/// the animation did not finish.
///
/// # Safety
/// `scenario` must be a live handle and `out_trace` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_scenario_run_trace(
    scenario: *const MaScenario,
    fps: f64,
    max_time: f64,
    out_trace: *mut *mut c_char,
) -> MaStatus {
    guard(|| {
        if scenario.is_null() || out_trace.is_null() {
            return fail(MaStatus::NullArgument, "scenario or out_trace is null");
        }
        *out_trace = ptr::null_mut();
        let Ok(max_time) = Seconds::new(max_time) else {
            return fail(MaStatus::InvalidArgument, "max_time must be non-negative");
        };
        let sc = &(*scenario).inner;
        let trace = match run_fps(&sc.animation, &sc.state, fps, max_time) {
            Ok(t) => t,
            Err(e) => return fail(exec_status(&e), e.to_string()),
        };
        let mut buf = Vec::new();
        trace.write_json_lines(&mut buf).expect("writing to memory");
        *out_trace = into_c_string(String::from_utf8(buf).expect("JSON is UTF-8"));
        match trace.terminal {
            Terminal::Completed { .. } => MaStatus::Ok,
            Terminal::OutOfTime { .. } => MaStatus::OutOfTime,
        }
    })
}

/// Starts playing a scenario from its initial state. Returns NULL if
/// `scenario` is NULL. The player does not borrow the scenario.
///
/// # Safety
/// `scenario` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ma_player_new(scenario: *const MaScenario) -> *mut MaPlayer {
    if scenario.is_null() {
        return ptr::null_mut();
    }
    let sc = &(*scenario).inner;
    Box::into_raw(Box::new(MaPlayer {
        state: sc.state.clone(),
        remaining: Some(sc.animation.clone()),
        elapsed: 0.0,
    }))
}

/// # Safety
/// `player` must be NULL or a handle from [`ma_player_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ma_player_free(player: *mut MaPlayer) {
    if !player.is_null() {
        drop(Box::from_raw(player));
    }
}

/// Advances by `dt` seconds. `*out_done` (if not NULL) is set when the
/// animation has finished. Stepping a finished player is a no-op.
///
/// # Safety
/// `player` must be a live handle; `out_done` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn ma_player_step(player: *mut MaPlayer, dt: f64, out_done: *mut bool) -> MaStatus {
    guard(|| {
        if player.is_null() {
            return fail(MaStatus::NullArgument, "player is null");
        }
        let p = &mut *player;
        if let Some(anim) = &p.remaining {
            match step(anim, &p.state, dt) {
                Ok(outcome) => {
                    p.state = outcome.next_state;
                    p.elapsed += dt;
                    p.remaining = match outcome.progress {
                        Progress::Remainder(rest) => Some(rest),
                        Progress::Done(_) => None,
                    };
                }
                Err(e) => return fail(exec_status(&e), e.to_string()),
            }
        }
        if !out_done.is_null() {
            *out_done = p.remaining.is_none();
        }
        MaStatus::Ok
    })
}

/// Total time supplied to [`ma_player_step`] so far; NaN for NULL.
///
/// # Safety
/// `player` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ma_player_elapsed(player: *const MaPlayer) -> f64 {
    if player.is_null() {
        f64::NAN
    } else {
        (*player).elapsed
    }
}

/// Reads a number leaf of the current state.
///
/// # Safety
/// `player` must be a live handle, `path` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ma_player_get_number(
    player: *const MaPlayer,
    path: *const c_char,
    out: *mut f64,
) -> MaStatus {
    guard(|| {
        if player.is_null() || out.is_null() {
            return fail(MaStatus::NullArgument, "player or out is null");
        }
        let path = match read_str(path).map(PropertyPath::parse) {
            Ok(Ok(p)) => p,
            Ok(Err(e)) => return fail(MaStatus::InvalidArgument, e.to_string()),
            Err(s) => return s,
        };
        match (*player).state.resolve_number(&path) {
            Ok(x) => {
                *out = x;
                MaStatus::Ok
            }
            Err(e) => fail(MaStatus::RuntimeError, e.to_string()),
        }
    })
}

/// Overwrites a number leaf of the current state, as the host application
/// would between frames.
///
/// # Safety
/// `player` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ma_player_set_number(
    player: *mut MaPlayer,
    path: *const c_char,
    value: f64,
) -> MaStatus {
    guard(|| {
        if player.is_null() {
            return fail(MaStatus::NullArgument, "player is null");
        }
        let path = match read_str(path).map(PropertyPath::parse) {
            Ok(Ok(p)) => p,
            Ok(Err(e)) => return fail(MaStatus::InvalidArgument, e.to_string()),
            Err(s) => return s,
        };
        let Ok(value) = Value::number(value) else {
            return fail(MaStatus::InvalidArgument, "value is not finite");
        };
        let p = &mut *player;
        match p.state.write(&path, value) {
            Ok(next) => {
                p.state = next;
                MaStatus::Ok
            }
            Err(e) => fail(MaStatus::RuntimeError, e.to_string()),
        }
    })
}

/// The current state as a JSON string (free with [`ma_string_free`]), or
/// NULL if `player` is NULL.
///
/// # Safety
/// `player` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ma_player_state_json(player: *const MaPlayer) -> *mut c_char {
    if player.is_null() {
        return ptr::null_mut();
    }
    into_c_string((*player).state.to_json().to_string())
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ma_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
