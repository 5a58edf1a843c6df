//! C ABI for the dispshock laboratory: opaque handles, integer status codes,
//! and column accessors so other languages can build problems from the same
//! JSON configs the CLI reads and pull profile arrays out.
//!
//! The generated header lands in `include/dispshock.h` at build time.

use dispshock::cli::config::{ExperimentConfig, ExperimentSpec};
use dispshock::heteroclinic::{shoot_with, ShootOptions, WaveProfile};
use dispshock::models::{
    build_profile_problem, critical_friction, validate_admissibility, ProfileProblem,
};
use dispshock::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispshockStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ConfigRejected = 3,
    DomainError = 4,
    HypothesisError = 5,
    NumericalError = 6,
    BufferTooSmall = 7,
}

fn status_of(err: &Error) -> DispshockStatus {
    match err {
        Error::Config(_) | Error::Json(_) | Error::Io(_) => DispshockStatus::ConfigRejected,
        Error::Domain(_) | Error::Admissibility(_) => DispshockStatus::DomainError,
        Error::Hypothesis(_) => DispshockStatus::HypothesisError,
        _ => DispshockStatus::NumericalError,
    }
}

/// Profile columns addressable through `dispshock_profile_column`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispshockColumn {
    Theta = 0,
    Tau = 1,
    U = 2,
    W = 3,
    Energy = 4,
    Field1 = 5,
    Field2 = 6,
    Field3 = 7,
}

/// Scalar facts about a built problem.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DispshockProblemInfo {
    pub c: f64,
    pub c_star: f64,
    pub gamma_f: f64,
    pub e_max: f64,
    pub e_m: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    pub u_s: f64,
    pub shock_speed: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// 1 when c >= c_star (monotone profile).
    pub supercritical: i32,
    /// 1 when every structural hypothesis holds.
    pub admissible: i32,
}

/// Opaque problem handle.
pub struct DispshockProblem {
    problem: ProfileProblem,
    offset_scale: f64,
    rtol: f64,
}

/// Opaque profile handle.
pub struct DispshockProfile {
    profile: WaveProfile,
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dispshock_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Copy the last error message on this thread into `buf` (truncating) and
/// return its full length in bytes, 0 when no error is recorded.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null (query length only).
#[no_mangle]
pub unsafe extern "C" fn dispshock_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let borrow = slot.borrow();
        let Some(msg) = borrow.as_ref() else {
            return 0;
        };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // guarantee termination even when truncated
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Build a problem handle from the same JSON document the CLI reads. The
/// experiment section supplies the dispersion parameters.
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn dispshock_problem_from_json(
    config_json: *const c_char,
    out: *mut *mut DispshockProblem,
) -> DispshockStatus {
    if config_json.is_null() || out.is_null() {
        return DispshockStatus::NullArgument;
    }
    *out = std::ptr::null_mut();
    let text = match CStr::from_ptr(config_json).to_str() {
        Ok(t) => t,
        Err(_) => return DispshockStatus::InvalidUtf8,
    };
    match build_from_config(text) {
        Ok(handle) => {
            *out = Box::into_raw(Box::new(handle));
            DispshockStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

fn build_from_config(text: &str) -> Result<DispshockProblem, Error> {
    let cfg = ExperimentConfig::parse(text)?;
    let model = cfg.model.to_model()?;
    let shock = cfg.build_shock()?;
    let dispersion = match &cfg.experiment {
        ExperimentSpec::Validate { dispersion }
        | ExperimentSpec::Profile { dispersion }
        | ExperimentSpec::Oscillations { dispersion } => *dispersion,
        _ => {
            return Err(Error::Config(
                "C API problems need a validate/profile/oscillations experiment".into(),
            ))
        }
    };
    let (epsilon, delta) = cfg.resolve_dispersion(&dispersion, &shock)?;
    let problem = build_profile_problem(&model, &shock, epsilon, delta)?;
    Ok(DispshockProblem {
        problem,
        offset_scale: cfg.numerics.offset_scale(),
        rtol: cfg.numerics.rtol(),
    })
}

/// Fill `info` with the problem landmarks.
///
/// # Safety
/// Both pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn dispshock_problem_info(
    handle: *const DispshockProblem,
    info: *mut DispshockProblemInfo,
) -> DispshockStatus {
    if handle.is_null() || info.is_null() {
        return DispshockStatus::NullArgument;
    }
    let h = &*handle;
    let p = &h.problem;
    let c_star = match critical_friction(p) {
        Ok(v) => v,
        Err(e) => {
            set_error(e.to_string());
            return status_of(&e);
        }
    };
    let ctx = p.physical.as_ref();
    let admissible =
        ctx.is_some_and(|ctx| validate_admissibility(&ctx.model, &ctx.shock, p).admissible());
    *info = DispshockProblemInfo {
        c: p.c,
        c_star,
        gamma_f: p.gamma_f,
        e_max: p.e_max,
        e_m: p.e_m,
        u_minus: p.u_minus,
        u_plus: p.u_plus,
        u_s: p.u_s,
        shock_speed: ctx.map(|c| c.shock.s).unwrap_or(f64::NAN),
        epsilon: ctx.map(|c| c.epsilon).unwrap_or(f64::NAN),
        delta: ctx.map(|c| c.delta).unwrap_or(f64::NAN),
        supercritical: p.supercritical as i32,
        admissible: admissible as i32,
    };
    DispshockStatus::Ok
}

/// Shoot the heteroclinic orbit and hand back a profile handle.
///
/// # Safety
/// `handle` must come from `dispshock_problem_from_json`; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dispshock_profile_compute(
    handle: *const DispshockProblem,
    out: *mut *mut DispshockProfile,
) -> DispshockStatus {
    if handle.is_null() || out.is_null() {
        return DispshockStatus::NullArgument;
    }
    *out = std::ptr::null_mut();
    let h = &*handle;
    let opts = ShootOptions {
        offset_scale: h.offset_scale,
        rtol: h.rtol,
        ..ShootOptions::default()
    };
    match shoot_with(&h.problem, &opts) {
        Ok(profile) => {
            *out = Box::into_raw(Box::new(DispshockProfile { profile }));
            DispshockStatus::Ok
        }
        Err(e) => {
            set_error(e.to_string());
            status_of(&e)
        }
    }
}

/// Number of samples in a computed profile.
///
/// # Safety
/// `handle` must be a live profile handle (null returns 0).
#[no_mangle]
pub unsafe extern "C" fn dispshock_profile_len(handle: *const DispshockProfile) -> usize {
    if handle.is_null() {
        return 0;
    }
    (*handle).profile.len()
}

/// Copy one column of the profile into a caller buffer of length `len`
/// (which must be at least `dispshock_profile_len`).
///
/// # Safety
/// `buf` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dispshock_profile_column(
    handle: *const DispshockProfile,
    column: DispshockColumn,
    buf: *mut f64,
    len: usize,
) -> DispshockStatus {
    if handle.is_null() || buf.is_null() {
        return DispshockStatus::NullArgument;
    }
    let p = &(*handle).profile;
    let src: Option<&[f64]> = match column {
        DispshockColumn::Theta => Some(&p.theta),
        DispshockColumn::Tau => Some(&p.tau),
        DispshockColumn::U => Some(&p.u),
        DispshockColumn::W => Some(&p.w),
        DispshockColumn::Energy => Some(&p.e),
        DispshockColumn::Field1 => p.fields.first().map(|(_, v)| v.as_slice()),
        DispshockColumn::Field2 => p.fields.get(1).map(|(_, v)| v.as_slice()),
        DispshockColumn::Field3 => p.fields.get(2).map(|(_, v)| v.as_slice()),
    };
    let Some(src) = src else {
        set_error("profile has no such field column".into());
        return DispshockStatus::DomainError;
    };
    if len < src.len() {
        set_error(format!(
            "buffer holds {len} values, profile has {}",
            src.len()
        ));
        return DispshockStatus::BufferTooSmall;
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    DispshockStatus::Ok
}

/// Release a problem handle.
///
/// # Safety
/// `handle` must be null or a pointer from `dispshock_problem_from_json`,
/// not freed before.
#[no_mangle]
pub unsafe extern "C" fn dispshock_problem_free(handle: *mut DispshockProblem) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Release a profile handle.
///
/// # Safety
/// `handle` must be null or a pointer from `dispshock_profile_compute`,
/// not freed before.
#[no_mangle]
pub unsafe extern "C" fn dispshock_profile_free(handle: *mut DispshockProfile) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}
