//! C ABI for the inexact proximal gradient toolkit.
//!
//! Every fallible function returns an [`IpgmStatus`]. On failure a message is
//! kept per thread and can be read with [`ipgm_last_error_message`].
//! Instances and traces are opaque handles released by their `_free` functions.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::Arc;

use inexact_pgm::objective::{Objective, SmoothObjective};
use inexact_pgm::oracle::{holder_smoothing_constant, majorize_amgm, InexactOracle, NoisyGradientOracle};
use inexact_pgm::problems::{generate_logsum_instance, LogSumProblem};
use inexact_pgm::prox::{project_l1_ball, ProxFunction};
use inexact_pgm::rates::{evaluate_curve, CurveKind, CurveParams};
use inexact_pgm::solver::{ipgm_run, ipgm_worst_case_run, RunTrace, ScheduleConfig};
use inexact_pgm::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpgmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Infeasible = 4,
    Diverged = 5,
    OutOfRange = 6,
    Io = 7,
    Parse = 8,
    Internal = 9,
}

impl From<&Error> for IpgmStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::Config(_) => Self::InvalidArgument,
            Error::DimensionMismatch { .. } => Self::DimensionMismatch,
            Error::Infeasible => Self::Infeasible,
            Error::NonFinite { .. } | Error::Diverged { .. } => Self::Diverged,
            Error::OutOfRange { .. } => Self::OutOfRange,
            Error::Io(_) => Self::Io,
            Error::Parse(_) | Error::Json(_) => Self::Parse,
            _ => Self::Internal,
        }
    }
}

/// Proximal terms `h` understood by [`ipgm_prox`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpgmProxKind {
    Zero = 0,
    /// `weight · ‖x‖₁`
    L1Norm = 1,
    /// Indicator of `‖x‖₁ ≤ radius`
    L1Ball = 2,
}

/// Rate curves understood by [`ipgm_bound`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IpgmCurve {
    Thm2Nonconvex = 0,
    Cor1Const = 1,
    Cor1FixedHorizon = 2,
    ConvexIpgm = 3,
    ConvexIpgmOptRho = 4,
    Fipgm = 5,
    FipgmOptRho = 6,
    HolderRate = 7,
}

impl From<IpgmCurve> for CurveKind {
    fn from(c: IpgmCurve) -> Self {
        match c {
            IpgmCurve::Thm2Nonconvex => Self::Thm2Nonconvex,
            IpgmCurve::Cor1Const => Self::Cor1Const,
            IpgmCurve::Cor1FixedHorizon => Self::Cor1FixedHorizon,
            IpgmCurve::ConvexIpgm => Self::ConvexIpgm,
            IpgmCurve::ConvexIpgmOptRho => Self::ConvexIpgmOptRho,
            IpgmCurve::Fipgm => Self::Fipgm,
            IpgmCurve::FipgmOptRho => Self::FipgmOptRho,
            IpgmCurve::HolderRate => Self::HolderRate,
        }
    }
}

/// Curve parameters; NaN marks a parameter as unset.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IpgmCurveParams {
    pub lipschitz: f64,
    pub rho: f64,
    pub q: f64,
    pub delta: f64,
    pub delta0_gap: f64,
    pub radius: f64,
    pub beta: f64,
    pub zeta: f64,
    pub holder_constant: f64,
    pub nu: f64,
    pub horizon: f64,
}

fn set(v: f64) -> Option<f64> {
    (!v.is_nan()).then_some(v)
}

impl From<&IpgmCurveParams> for CurveParams {
    fn from(p: &IpgmCurveParams) -> Self {
        CurveParams {
            l: set(p.lipschitz),
            rho: set(p.rho),
            q: set(p.q),
            delta: set(p.delta),
            delta0_gap: set(p.delta0_gap),
            radius: set(p.radius),
            beta: set(p.beta),
            zeta: set(p.zeta),
            holder_constant: set(p.holder_constant),
            nu: set(p.nu),
            horizon: set(p.horizon),
        }
    }
}

/// Settings for [`ipgm_run_logsum`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IpgmRunConfig {
    /// Degree `q ∈ [0, 1]`.
    pub degree: f64,
    /// Gradient noise norm `Δ`; the certified accuracy is `Δ(2R)^{1-q}`.
    pub noise_bound: f64,
    /// `ρ`; values `<= 0` select the instance's Lipschitz constant.
    pub rho: f64,
    pub step_scale: f64,
    pub iterations: usize,
    pub seed: u64,
    /// 0 for plain runs, `m > 0` keeps the worst of `m` draws per step.
    pub worst_case_directions: usize,
}

/// One iteration of a trace.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct IpgmRecord {
    pub k: usize,
    pub f: f64,
    pub f_next: f64,
    pub gm_sq: f64,
    pub min_gm_sq: f64,
    pub alpha: f64,
    pub delta_k: f64,
}

/// Opaque LogSum instance.
pub struct IpgmLogSum(Arc<LogSumProblem>);

/// Opaque solver trace.
pub struct IpgmTrace(RunTrace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), (IpgmStatus, String)>) -> IpgmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            IpgmStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            IpgmStatus::Internal
        }
    }
}

type Ffi<T> = Result<T, (IpgmStatus, String)>;

fn lift<T>(r: inexact_pgm::Result<T>) -> Ffi<T> {
    r.map_err(|e| (IpgmStatus::from(&e), e.to_string()))
}

fn null(name: &str) -> (IpgmStatus, String) {
    (IpgmStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn slice<'a>(ptr: *const f64, len: usize, name: &str) -> Ffi<&'a [f64]> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

unsafe fn slice_mut<'a>(ptr: *mut f64, len: usize, name: &str) -> Ffi<&'a mut [f64]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(ptr, len))
}

unsafe fn out<'a, T>(ptr: *mut T, name: &str) -> Ffi<&'a mut T> {
    ptr.as_mut().ok_or_else(|| null(name))
}

unsafe fn path<'a>(ptr: *const c_char) -> Ffi<&'a Path> {
    if ptr.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map(Path::new)
        .map_err(|_| (IpgmStatus::InvalidArgument, "path is not valid UTF-8".into()))
}

/// Message for the last failed call on this thread, or null.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ipgm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Constant of the AM-GM split `δ r^q <= (qρ/2) r² + c`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ipgm_amgm_additive(delta: f64, degree: f64, rho: f64, out_value: *mut f64) -> IpgmStatus {
    guard(|| {
        let o = out(out_value, "out_value")?;
        *o = lift(majorize_amgm(delta, degree, rho))?.additive;
        Ok(())
    })
}

/// `L(δ)` for a Hölder-smooth function with constant `H` and exponent `ν`.
///
/// # Safety
/// `out_value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ipgm_holder_lipschitz(
    holder_constant: f64,
    nu: f64,
    degree: f64,
    delta: f64,
    out_value: *mut f64,
) -> IpgmStatus {
    guard(|| {
        let o = out(out_value, "out_value")?;
        *o = lift(holder_smoothing_constant(holder_constant, nu, degree, delta))?;
        Ok(())
    })
}

/// Euclidean projection of `x` onto the ℓ1 ball of radius `radius`.
///
/// # Safety
/// `x` and `out_x` must point to `n` doubles; they may alias.
#[no_mangle]
pub unsafe extern "C" fn ipgm_project_l1_ball(x: *const f64, n: usize, radius: f64, out_x: *mut f64) -> IpgmStatus {
    guard(|| {
        if radius.is_nan() || radius <= 0.0 || radius.is_infinite() {
            return Err((IpgmStatus::InvalidArgument, format!("radius must be finite and > 0, got {radius}")));
        }
        let p = project_l1_ball(slice(x, n, "x")?, radius);
        slice_mut(out_x, n, "out_x")?.copy_from_slice(&p);
        Ok(())
    })
}

/// `prox_{γh}(x)` for the selected `h`; `param` is the weight or radius.
///
/// # Safety
/// `x` and `out_x` must point to `n` doubles; they may alias.
#[no_mangle]
pub unsafe extern "C" fn ipgm_prox(
    kind: IpgmProxKind,
    param: f64,
    gamma: f64,
    x: *const f64,
    n: usize,
    out_x: *mut f64,
) -> IpgmStatus {
    guard(|| {
        let h = lift(match kind {
            IpgmProxKind::Zero => Ok(ProxFunction::Zero),
            IpgmProxKind::L1Norm => ProxFunction::l1_norm(param),
            IpgmProxKind::L1Ball => ProxFunction::l1_ball(param),
        })?;
        let p = lift(h.prox(gamma, slice(x, n, "x")?))?;
        slice_mut(out_x, n, "out_x")?.copy_from_slice(&p);
        Ok(())
    })
}

/// Evaluates a rate curve at horizon `k`.
///
/// # Safety
/// `params` and `out_value` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ipgm_bound(
    curve: IpgmCurve,
    params: *const IpgmCurveParams,
    k: f64,
    out_value: *mut f64,
) -> IpgmStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let o = out(out_value, "out_value")?;
        *o = lift(evaluate_curve(curve.into(), &p.into(), k))?;
        Ok(())
    })
}

/// Generates a LogSum instance with `n` unknowns and `big_n` data rows.
///
/// # Safety
/// `out_instance` must be a valid pointer; on success it receives a handle
/// to release with [`ipgm_logsum_free`].
#[no_mangle]
pub unsafe extern "C" fn ipgm_logsum_generate(
    n: usize,
    big_n: usize,
    radius: f64,
    noise_level: f64,
    seed: u64,
    out_instance: *mut *mut IpgmLogSum,
) -> IpgmStatus {
    guard(|| {
        let o = out(out_instance, "out_instance")?;
        let p = lift(generate_logsum_instance(n, big_n, radius, noise_level, seed))?;
        *o = Box::into_raw(Box::new(IpgmLogSum(Arc::new(p))));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out_instance` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ipgm_logsum_load(path: *const c_char, out_instance: *mut *mut IpgmLogSum) -> IpgmStatus {
    guard(|| {
        let o = out(out_instance, "out_instance")?;
        let p = lift(LogSumProblem::load(self::path(path)?))?;
        *o = Box::into_raw(Box::new(IpgmLogSum(Arc::new(p))));
        Ok(())
    })
}

/// # Safety
/// `instance` must come from this library and `path` be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ipgm_logsum_save(instance: *const IpgmLogSum, path: *const c_char) -> IpgmStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null("instance"))?;
        lift(inst.0.save(self::path(path)?))
    })
}

/// Number of unknowns, or 0 for a null handle.
///
/// # Safety
/// `instance` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn ipgm_logsum_dim(instance: *const IpgmLogSum) -> usize {
    instance.as_ref().map_or(0, |i| i.0.dim())
}

/// # Safety
/// `instance` must come from this library and `out_value` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ipgm_logsum_lipschitz(instance: *const IpgmLogSum, out_value: *mut f64) -> IpgmStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null("instance"))?;
        *out(out_value, "out_value")? = inst.0.lipschitz();
        Ok(())
    })
}

/// Value and gradient at `x`.
///
/// # Safety
/// `x` and `out_gradient` must point to `n` doubles; `out_value` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ipgm_logsum_evaluate(
    instance: *const IpgmLogSum,
    x: *const f64,
    n: usize,
    out_value: *mut f64,
    out_gradient: *mut f64,
) -> IpgmStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null("instance"))?;
        let (v, g) = lift(inst.0.evaluate(slice(x, n, "x")?))?;
        *out(out_value, "out_value")? = v;
        slice_mut(out_gradient, n, "out_gradient")?.copy_from_slice(&g);
        Ok(())
    })
}

/// # Safety
/// `instance` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ipgm_logsum_free(instance: *mut IpgmLogSum) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Runs I-PGM from the origin over the instance's ℓ1 ball with a noisy
/// gradient oracle and step `step_scale / (L + qρ)`.
///
/// # Safety
/// `instance` must come from this library, `config` and `out_trace` must be
/// valid. The trace is released with [`ipgm_trace_free`].
#[no_mangle]
pub unsafe extern "C" fn ipgm_run_logsum(
    instance: *const IpgmLogSum,
    config: *const IpgmRunConfig,
    out_trace: *mut *mut IpgmTrace,
) -> IpgmStatus {
    guard(|| {
        let inst = instance.as_ref().ok_or_else(|| null("instance"))?;
        let c = config.as_ref().ok_or_else(|| null("config"))?;
        let o = out(out_trace, "out_trace")?;
        let p = &inst.0;
        let oracle = lift(NoisyGradientOracle::new(p.clone(), c.noise_bound).and_then(|o| o.on_ball(p.radius(), c.degree)))?;
        let l = p.lipschitz();
        let schedule = ScheduleConfig::constant(
            l,
            if c.rho > 0.0 { c.rho } else { l },
            c.degree,
            oracle.accuracy(),
            c.iterations,
        )
        .with_step_scale(c.step_scale);
        let h = lift(ProxFunction::l1_ball(p.radius()))?;
        let x0 = vec![0.0; p.dim()];
        let trace = lift(if c.worst_case_directions > 0 {
            ipgm_worst_case_run(&oracle, &h, &schedule, &x0, c.seed, c.worst_case_directions)
        } else {
            ipgm_run(&oracle, &h, &schedule, &x0, c.seed)
        })?;
        *o = Box::into_raw(Box::new(IpgmTrace(trace)));
        Ok(())
    })
}

/// Number of completed iterations, or 0 for a null handle.
///
/// # Safety
/// `trace` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn ipgm_trace_len(trace: *const IpgmTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// `trace` must come from this library and `out_record` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ipgm_trace_record(trace: *const IpgmTrace, k: usize, out_record: *mut IpgmRecord) -> IpgmStatus {
    guard(|| {
        let t = trace.as_ref().ok_or_else(|| null("trace"))?;
        let r = t.0.records.get(k).ok_or_else(|| {
            let e = Error::OutOfRange {
                requested: k,
                available: t.0.len(),
            };
            (IpgmStatus::OutOfRange, e.to_string())
        })?;
        *out(out_record, "out_record")? = IpgmRecord {
            k: r.k,
            f: r.f,
            f_next: r.f_next,
            gm_sq: r.gm_sq,
            min_gm_sq: r.min_gm_sq,
            alpha: r.alpha,
            delta_k: r.delta_k,
        };
        Ok(())
    })
}

/// Copies `x_k` (`k` from 0 to the trace length inclusive) into `out_x`.
///
/// # Safety
/// `trace` must come from this library and `out_x` point to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn ipgm_trace_iterate(trace: *const IpgmTrace, k: usize, out_x: *mut f64, n: usize) -> IpgmStatus {
    guard(|| {
        let t = trace.as_ref().ok_or_else(|| null("trace"))?;
        let x = t.0.iterates.get(k).ok_or_else(|| {
            let e = Error::OutOfRange {
                requested: k,
                available: t.0.iterates.len(),
            };
            (IpgmStatus::OutOfRange, e.to_string())
        })?;
        if x.len() != n {
            let e = Error::DimensionMismatch { expected: x.len(), got: n };
            return Err((IpgmStatus::DimensionMismatch, e.to_string()));
        }
        slice_mut(out_x, n, "out_x")?.copy_from_slice(x);
        Ok(())
    })
}

/// # Safety
/// `trace` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ipgm_trace_free(trace: *mut IpgmTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}
