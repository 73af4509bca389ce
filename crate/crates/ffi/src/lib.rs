//! C ABI for sdeflow.
//!
//! Handles are opaque and owned by the caller, who must release them with
//! the matching `*_free` function. Every fallible call returns an
//! [`SdeflowStatus`]; on failure the message is available from
//! [`sdeflow_last_error`] on the same thread until the next failing call.
//! Strings returned through out-parameters are released with
//! [`sdeflow_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sdeflow::cli::{constant_inputs, ScenarioConfig};
use sdeflow::constants::ConstantBundle;
use sdeflow::dispersion::{rate_function_i, ChainingParams};
use sdeflow::simulate::{integrate_flow, FlowOptions};
use sdeflow::{Error, NoisePath, SdeModel, Taming, TimeGrid};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdeflowStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    InvalidParameter = 4,
    DimensionMismatch = 5,
    Numerical = 6,
    Io = 7,
    Panic = 8,
}

/// Taming selector for [`sdeflow_integrate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdeflowTaming {
    Clip = 0,
    Rational = 1,
    None = 2,
}

/// Opaque model handle: a validated scenario with a model section.
pub struct SdeflowModel {
    config: ScenarioConfig,
}

impl SdeflowModel {
    fn model(&self) -> &SdeModel {
        self.config.model.as_ref().expect("validated on construction")
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SdeflowStatus {
    match e {
        Error::Config(_) | Error::Json(_) => SdeflowStatus::Config,
        Error::InvalidParameter(_) | Error::Empty(_) | Error::MisalignedGrid(_) | Error::Inconsistent(_) => {
            SdeflowStatus::InvalidParameter
        }
        Error::DimensionMismatch { .. } => SdeflowStatus::DimensionMismatch,
        Error::Io(_) => SdeflowStatus::Io,
        _ => SdeflowStatus::Numerical,
    }
}

fn fail(status: SdeflowStatus, msg: impl Into<String>) -> SdeflowStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), SdeflowStatus>>(f: F) -> SdeflowStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SdeflowStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SdeflowStatus::Panic, msg)
        }
    }
}

fn lift<T>(r: sdeflow::Result<T>) -> Result<T, SdeflowStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, SdeflowStatus> {
    if s.is_null() {
        return Err(fail(SdeflowStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| fail(SdeflowStatus::InvalidUtf8, e.to_string()))
}

fn into_c_string(s: String) -> Result<*mut c_char, SdeflowStatus> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|e| fail(SdeflowStatus::InvalidUtf8, e.to_string()))
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sdeflow_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sdeflow_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sdeflow_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a scenario TOML document that contains a `[model]` section.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdeflow_model_from_toml(toml: *const c_char, out: *mut *mut SdeflowModel) -> SdeflowStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(SdeflowStatus::NullPointer, "null output handle"));
        }
        *out = ptr::null_mut();
        let text = read_str(toml)?;
        let config = lift(ScenarioConfig::from_toml(text))?;
        lift(config.model().map(|_| ()))?;
        *out = Box::into_raw(Box::new(SdeflowModel { config }));
        Ok(())
    })
}

/// Releases a model handle. Null is ignored.
///
/// # Safety
/// `model` must come from [`sdeflow_model_from_toml`] and not have been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn sdeflow_model_free(model: *mut SdeflowModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// State-space dimension, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sdeflow_model_dim(model: *const SdeflowModel) -> usize {
    model.as_ref().map_or(0, |m| m.model().dim)
}

/// Integrates `n_points` initial points (row-major, `n_points * dim`
/// doubles) over `n_steps` steps of size `dt` under the noise path of
/// `seed`, writing terminal positions into `out` (same layout). Members
/// that diverge are reported as NaN.
///
/// # Safety
/// `initials` and `out` must each hold `n_points * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn sdeflow_integrate(
    model: *const SdeflowModel,
    seed: u64,
    dt: f64,
    n_steps: u64,
    initials: *const f64,
    n_points: usize,
    taming: SdeflowTaming,
    out: *mut f64,
) -> SdeflowStatus {
    guard(|| {
        let h = model.as_ref().ok_or_else(|| fail(SdeflowStatus::NullPointer, "null model handle"))?;
        if initials.is_null() || out.is_null() {
            return Err(fail(SdeflowStatus::NullPointer, "null buffer"));
        }
        let m = h.model();
        let d = m.dim;
        let flat = std::slice::from_raw_parts(initials, n_points * d);
        let points: Vec<Vec<f64>> = flat.chunks(d).map(<[f64]>::to_vec).collect();
        let noise = lift(NoisePath::new(seed, d, dt))?;
        let grid = lift(TimeGrid::new(0.0, dt, n_steps))?;
        let opts = FlowOptions {
            taming: match taming {
                SdeflowTaming::Clip => Taming::Clip,
                SdeflowTaming::Rational => Taming::Rational,
                SdeflowTaming::None => Taming::None,
            },
            snapshot_stride: 0,
        };
        let tr = lift(integrate_flow(m, &points, &noise, &grid, &opts))?;
        let dst = std::slice::from_raw_parts_mut(out, n_points * d);
        for (i, chunk) in dst.chunks_mut(d).enumerate() {
            if tr.diverged()[i].is_some() {
                chunk.fill(f64::NAN);
            } else {
                chunk.copy_from_slice(&tr.final_state.position(i));
            }
        }
        Ok(())
    })
}

/// Constant bundle of the model as a JSON document. Free the result with
/// [`sdeflow_string_free`].
///
/// # Safety
/// `model` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdeflow_constants_json(model: *const SdeflowModel, out: *mut *mut c_char) -> SdeflowStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(SdeflowStatus::NullPointer, "null output string"));
        }
        *out = ptr::null_mut();
        let h = model.as_ref().ok_or_else(|| fail(SdeflowStatus::NullPointer, "null model handle"))?;
        let inputs = lift(constant_inputs(h.model(), &h.config))?;
        let bundle = lift(ConstantBundle::compute(&inputs))?;
        let text = lift(serde_json::to_string(&bundle).map_err(Error::from))?;
        *out = into_c_string(text)?;
        Ok(())
    })
}

/// Rate function `I(γ)` for chaining constants `c1`, `alpha` in dimension
/// `d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sdeflow_rate_function(gamma: f64, c1: f64, alpha: f64, d: usize, out: *mut f64) -> SdeflowStatus {
    guard(|| {
        if out.is_null() {
            return Err(fail(SdeflowStatus::NullPointer, "null output"));
        }
        let p = ChainingParams::boundary(c1, alpha, d, 1.0, 0.0);
        *out = lift(rate_function_i(gamma, &p))?;
        Ok(())
    })
}
