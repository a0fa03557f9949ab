//! C interface to `qlsc`.
//!
//! Every fallible function returns a [`QlscStatus`]. On failure a message is kept per thread
//! and can be read with [`qlsc_last_error_message`]. Objects are opaque handles created by a
//! `*_new`/`*_prepare`/`*_run` function and released with the matching `*_free`.
//! Panics never cross the boundary; they are reported as `QLSC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use qlsc::ansatz::{prepare_noisy_state, Architecture, Layout, ParameterSet};
use qlsc::entropy::{estimate_entropy, BellMode};
use qlsc::noise::{channel_f_metric, purity_lower_bound, ChannelKind, ChannelSpec};
use qlsc::qsim::io::{read_state, write_state, StoredState};
use qlsc::qsim::{von_neumann_entropy_exact, CMatrix, DensityMatrix, C64};
use qlsc::scp::{run_scp, Outcome, ScpConfig, ScpHooks, ScpVerdict};
use qlsc::shadows::SealedState;
use qlsc::{Error, RngStream};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlscStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    CapExceeded = 4,
    Io = 5,
    Format = 6,
    Numerical = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlscOutcome {
    Yes = 0,
    No = 1,
    Inconclusive = 2,
}

/// Values accepted by the `layout` arguments.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlscLayout {
    Brickwork = 0,
    Staircase = 1,
}

/// Values accepted by the `channel` arguments.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QlscChannel {
    Identity = 0,
    LocalDepolarizing = 1,
    GlobalDepolarizing = 2,
    BitFlip = 3,
}

/// A density matrix.
pub struct QlscState {
    rho: DensityMatrix,
}

/// The result of a complexity search, with its JSON rendering.
pub struct QlscVerdict {
    verdict: ScpVerdict,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Fail(QlscStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidArgument(_) | Error::InvalidQubit(_) | Error::InvalidState(_) | Error::SelfCheck(_) => {
                QlscStatus::InvalidArgument
            }
            Error::DimensionMismatch(_) => QlscStatus::DimensionMismatch,
            Error::CapExceeded { .. } => QlscStatus::CapExceeded,
            Error::Io(_) => QlscStatus::Io,
            Error::Format(_) | Error::Json(_) => QlscStatus::Format,
            Error::NonUnitary { .. }
            | Error::IncompleteKraus { .. }
            | Error::Singular(_)
            | Error::InfeasibleDomain(_) => QlscStatus::Numerical,
        };
        Fail(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QlscStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            QlscStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&msg);
            QlscStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(QlscStatus::NullPointer, format!("{name} is null"))
}

fn invalid(msg: String) -> Fail {
    Fail(QlscStatus::InvalidArgument, msg)
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write_out<T>(p: *mut T, name: &str, value: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(value);
    Ok(())
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|e| invalid(format!("path is not UTF-8: {e}")))?;
    Ok(PathBuf::from(s))
}

fn layout_of(v: u32) -> Result<Layout, Fail> {
    match v {
        0 => Ok(Layout::Brickwork),
        1 => Ok(Layout::Staircase),
        _ => Err(invalid(format!("unknown layout {v}"))),
    }
}

fn channel_of(v: u32, strength: f64) -> Result<ChannelSpec, Fail> {
    let kind = match v {
        0 => ChannelKind::Identity,
        1 => ChannelKind::LocalDepolarizing,
        2 => ChannelKind::GlobalDepolarizing,
        3 => ChannelKind::BitFlip,
        _ => return Err(invalid(format!("unknown channel {v}"))),
    };
    Ok(ChannelSpec::new(kind, strength)?)
}

unsafe fn emit_state(out: *mut *mut QlscState, rho: DensityMatrix) -> Result<(), Fail> {
    write_out(out, "out", Box::into_raw(Box::new(QlscState { rho })))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qlsc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn qlsc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Samples circuit coefficients from `seed` and prepares the noisy state of an
/// `n`-qubit circuit with `depth` layers, applying `channel` after every layer.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qlsc_state_prepare(
    n: usize,
    layout: u32,
    depth: usize,
    channel: u32,
    strength: f64,
    seed: u64,
    out: *mut *mut QlscState,
) -> QlscStatus {
    guard(|| {
        let arch = Architecture::build(n, layout_of(layout)?, depth)?;
        let params = ParameterSet::random(&arch, &RngStream::new(seed).split_str("prepare"));
        let rho = prepare_noisy_state(&arch, &params, &channel_of(channel, strength)?)?;
        emit_state(out, rho)
    })
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qlsc_state_maximally_mixed(n: usize, out: *mut *mut QlscState) -> QlscStatus {
    guard(|| {
        if n == 0 || n > qlsc::qsim::DEFAULT_MAX_QUBITS {
            return Err(invalid(format!("n = {n} outside [1, {}]", qlsc::qsim::DEFAULT_MAX_QUBITS)));
        }
        emit_state(out, DensityMatrix::maximally_mixed(n))
    })
}

/// Builds a state from row-major real and imaginary parts of a `2^n × 2^n` matrix.
///
/// # Safety
/// `re` and `im` must each point to `4^n` readable doubles; `out` as for [`qlsc_state_prepare`].
#[no_mangle]
pub unsafe extern "C" fn qlsc_state_from_density(
    n: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut QlscState,
) -> QlscStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("matrix data"));
        }
        if n == 0 || n > qlsc::qsim::DEFAULT_MAX_QUBITS {
            return Err(invalid(format!("n = {n} outside [1, {}]", qlsc::qsim::DEFAULT_MAX_QUBITS)));
        }
        let d = 1usize << n;
        let re = std::slice::from_raw_parts(re, d * d);
        let im = std::slice::from_raw_parts(im, d * d);
        let m = CMatrix::from_fn(d, d, |i, j| C64::new(re[i * d + j], im[i * d + j]));
        emit_state(out, DensityMatrix::new(n, m)?)
    })
}

/// Reads a QSTATE1 file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` as for [`qlsc_state_prepare`].
#[no_mangle]
pub unsafe extern "C" fn qlsc_state_read(path: *const c_char, out: *mut *mut QlscState) -> QlscStatus {
    guard(|| emit_state(out, read_state(&path_arg(path)?)?.into_density()))
}

/// Writes a QSTATE1 file.
///
/// # Safety
/// `state` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn qlsc_state_write(state: *const QlscState, path: *const c_char) -> QlscStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        Ok(write_state(&path_arg(path)?, &StoredState::Density(s.rho.clone()))?)
    })
}

/// # Safety
/// `state` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qlsc_state_free(state: *mut QlscState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlsc_state_num_qubits(state: *const QlscState, out: *mut usize) -> QlscStatus {
    guard(|| write_out(out, "out", borrow(state, "state")?.rho.n()))
}

/// `Tr ρ²`.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlsc_state_purity(state: *const QlscState, out: *mut f64) -> QlscStatus {
    guard(|| write_out(out, "out", borrow(state, "state")?.rho.purity()))
}

/// Von Neumann entropy in nats from the spectrum.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlsc_state_entropy_exact(state: *const QlscState, out: *mut f64) -> QlscStatus {
    guard(|| write_out(out, "out", von_neumann_entropy_exact(&borrow(state, "state")?.rho)))
}

/// Lower bound on the purity after `depth` noisy layers on `n` qubits.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qlsc_purity_lower_bound(
    channel: u32,
    strength: f64,
    n: usize,
    depth: u32,
    out: *mut f64,
) -> QlscStatus {
    guard(|| {
        let f = channel_f_metric(&channel_of(channel, strength)?, n)?;
        write_out(out, "out", purity_lower_bound(f, n, depth)?)
    })
}

/// Polynomial entropy estimate from trace powers. `sampled` selects finite-shot estimation
/// with `shots` shots per power; otherwise exact expectations are used and `shots` is ignored.
///
/// # Safety
/// `state` must be a live handle; `value` and `stderr` writable.
#[no_mangle]
pub unsafe extern "C" fn qlsc_entropy_estimate(
    state: *const QlscState,
    eta: f64,
    eps: f64,
    sampled: bool,
    shots: usize,
    seed: u64,
    value: *mut f64,
    stderr: *mut f64,
) -> QlscStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        if value.is_null() || stderr.is_null() {
            return Err(null("out"));
        }
        let mode = if sampled { BellMode::Sampled } else { BellMode::ExactExpectation };
        let est = estimate_entropy(&s.rho, eta, eps, mode, shots.max(2), &RngStream::new(seed).split_str("entropy"))?;
        write_out(value, "value", est.value)?;
        write_out(stderr, "stderr", est.stderr)
    })
}

/// Runs the depth search against `state`.
///
/// `config_json` is null (defaults) or a JSON object with any subset of the search
/// configuration fields. With `measurement_only` the search sees the state only through
/// measurement snapshots, which requires `"bmaxs": {"estimator": {"mode": "shadow"}}`.
///
/// # Safety
/// `state` must be a live handle, `config_json` null or NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlsc_scp_run(
    state: *const QlscState,
    config_json: *const c_char,
    seed: u64,
    measurement_only: bool,
    out: *mut *mut QlscVerdict,
) -> QlscStatus {
    guard(|| {
        let s = borrow(state, "state")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg: ScpConfig = if config_json.is_null() {
            ScpConfig::default()
        } else {
            let text = CStr::from_ptr(config_json)
                .to_str()
                .map_err(|e| invalid(format!("config is not UTF-8: {e}")))?;
            serde_json::from_str(text).map_err(|e| Fail(QlscStatus::Format, format!("config: {e}")))?
        };
        let stream = RngStream::new(seed).split_str("scp");
        let verdict = if measurement_only {
            run_scp(&SealedState::new(s.rho.clone()), &cfg, &ScpHooks::default(), &stream)?
        } else {
            run_scp(&s.rho, &cfg, &ScpHooks::default(), &stream)?
        };
        let json = CString::new(verdict.to_json()?).map_err(|e| Fail(QlscStatus::Format, e.to_string()))?;
        write_out(out, "out", Box::into_raw(Box::new(QlscVerdict { verdict, json })))
    })
}

/// # Safety
/// `verdict` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlsc_verdict_outcome(verdict: *const QlscVerdict, out: *mut QlscOutcome) -> QlscStatus {
    guard(|| {
        let o = match borrow(verdict, "verdict")?.verdict.outcome {
            Outcome::Yes => QlscOutcome::Yes,
            Outcome::No => QlscOutcome::No,
            Outcome::Inconclusive => QlscOutcome::Inconclusive,
        };
        write_out(out, "out", o)
    })
}

/// Smallest accepting depth, or 0 when the outcome is not YES.
///
/// # Safety
/// `verdict` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qlsc_verdict_r_min(verdict: *const QlscVerdict, out: *mut usize) -> QlscStatus {
    guard(|| write_out(out, "out", borrow(verdict, "verdict")?.verdict.r_min.unwrap_or(0)))
}

/// JSON rendering of the verdict, owned by the handle. Null if `verdict` is null.
///
/// # Safety
/// `verdict` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qlsc_verdict_json(verdict: *const QlscVerdict) -> *const c_char {
    match verdict.as_ref() {
        Some(v) => v.json.as_ptr(),
        None => std::ptr::null(),
    }
}

/// # Safety
/// `verdict` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qlsc_verdict_free(verdict: *mut QlscVerdict) {
    if !verdict.is_null() {
        drop(Box::from_raw(verdict));
    }
}
