//! C ABI over `ringflock`.
//!
//! Every fallible call returns an [`RfStatus`]; on failure a message is kept
//! per thread and can be read back with [`rf_last_error`]. Objects are opaque
//! handles owned by the caller and released with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use ringflock::sim::{impulse_experiment, integrate_with_stride, ImpulseConfig, Trajectory, WavefrontReport};
use ringflock::spectral::Spectrum;
use ringflock::stability::{instability_witness, theorem_gate};
use ringflock::wavefield::signal_velocities;
use ringflock::{Error, FlockParams};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidParams = 3,
    Unstable = 4,
    Degenerate = 5,
    Numerical = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Parameter set of a ring formation.
pub struct RfParams(FlockParams);

/// Eigenvalues of the first-order system, two per mode.
pub struct RfSpectrum(Spectrum);

/// Stored frames of a time integration.
pub struct RfTrajectory {
    traj: Trajectory,
    report: Option<WavefrontReport>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> RfStatus {
    match e {
        Error::Invalid(_) | Error::ZeroCenterWeight(_) | Error::NotNearestNeighbor | Error::NotNormalized { .. } => {
            RfStatus::InvalidParams
        }
        Error::UnstableParams => RfStatus::Unstable,
        Error::DegenerateBranches { .. } | Error::DegenerateMode { .. } => RfStatus::Degenerate,
        Error::NonfiniteState { .. } | Error::NonpositiveA { .. } | Error::NoDecayFit => RfStatus::Numerical,
        _ => RfStatus::InvalidArgument,
    }
}

fn fail(status: RfStatus, msg: impl Into<String>) -> RfStatus {
    set_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), RfStatus>) -> RfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RfStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(RfStatus::Panic, "internal panic"),
    }
}

fn lift<T>(r: ringflock::Result<T>) -> Result<T, RfStatus> {
    r.map_err(|e| fail(status_of(&e), e.to_string()))
}

unsafe fn get<'a, T>(p: *const T) -> Result<&'a T, RfStatus> {
    p.as_ref().ok_or_else(|| fail(RfStatus::NullPointer, "null pointer argument"))
}

unsafe fn out<'a, T>(p: *mut T) -> Result<&'a mut T, RfStatus> {
    p.as_mut().ok_or_else(|| fail(RfStatus::NullPointer, "null output pointer"))
}

unsafe fn input<'a, T>(p: *const T, len: usize) -> Result<&'a [T], RfStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(RfStatus::NullPointer, "null array argument"));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, need: usize) -> Result<&'a mut [T], RfStatus> {
    if len < need {
        return Err(fail(RfStatus::BufferTooSmall, format!("buffer holds {len}, need {need}")));
    }
    if p.is_null() {
        return Err(fail(RfStatus::NullPointer, "null buffer"));
    }
    Ok(slice::from_raw_parts_mut(p, need))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn rf_status_str(status: RfStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        RfStatus::Ok => b"ok\0",
        RfStatus::NullPointer => b"null pointer\0",
        RfStatus::InvalidArgument => b"invalid argument\0",
        RfStatus::InvalidParams => b"invalid parameters\0",
        RfStatus::Unstable => b"unstable parameters\0",
        RfStatus::Degenerate => b"degenerate branches\0",
        RfStatus::Numerical => b"numerical failure\0",
        RfStatus::BufferTooSmall => b"buffer too small\0",
        RfStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Builds and validates a parameter set from `len` offsets and weights.
///
/// # Safety
/// `offsets`, `rho_x` and `rho_v` must each point to `len` readable values;
/// `out_params` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_params_new(
    n: usize,
    g_x: f64,
    g_v: f64,
    offsets: *const i64,
    rho_x: *const f64,
    rho_v: *const f64,
    len: usize,
    out_params: *mut *mut RfParams,
) -> RfStatus {
    guard(|| {
        let dst = out(out_params)?;
        let p = FlockParams::with_offsets(n, g_x, g_v, input(offsets, len)?, input(rho_x, len)?, input(rho_v, len)?);
        let p = lift(p)?;
        let p = lift(p.validate().map_err(Error::from))?;
        *dst = boxed(RfParams(p));
        Ok(())
    })
}

/// Nearest-neighbor parameters; weights are `{rho(-1), rho(0), rho(+1)}`.
///
/// # Safety
/// `rho_x` and `rho_v` must point to three readable values each.
#[no_mangle]
pub unsafe extern "C" fn rf_params_new_nearest(
    n: usize,
    g_x: f64,
    g_v: f64,
    rho_x: *const f64,
    rho_v: *const f64,
    out_params: *mut *mut RfParams,
) -> RfStatus {
    let offsets = [-1i64, 0, 1];
    rf_params_new(n, g_x, g_v, offsets.as_ptr(), rho_x, rho_v, 3, out_params)
}

/// # Safety
/// `params` must be NULL or a handle from `rf_params_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rf_params_free(params: *mut RfParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// # Safety
/// `params` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_params_n(params: *const RfParams) -> usize {
    params.as_ref().map_or(0, |p| p.0.n)
}

/// Writes 1 when the parameters are stable at every ring size, else 0.
///
/// # Safety
/// `params` must be a live handle and `stable` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_stability_gate(params: *const RfParams, stable: *mut i32) -> RfStatus {
    guard(|| {
        let p = get(params)?;
        let dst = out(stable)?;
        *dst = i32::from(lift(theorem_gate(&p.0))?);
        Ok(())
    })
}

/// Searches ring sizes up to `n_max` for a mode with positive real part.
/// Writes `found = 0` when none exists up to `n_max`.
///
/// # Safety
/// `params` must be a live handle; all outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rf_instability_witness(
    params: *const RfParams,
    n_max: usize,
    found: *mut i32,
    n: *mut usize,
    m: *mut i64,
    re_nu: *mut f64,
    im_nu: *mut f64,
) -> RfStatus {
    guard(|| {
        let p = get(params)?;
        let (found, n, m, re, im) = (out(found)?, out(n)?, out(m)?, out(re_nu)?, out(im_nu)?);
        match lift(instability_witness(&p.0, n_max))? {
            Some(w) => {
                (*found, *n, *m, *re, *im) = (1, w.n, w.m, w.nu.re, w.nu.im);
            }
            None => *found = 0,
        }
        Ok(())
    })
}

/// Signal velocities `c_+ > 0 > c_-` of stable parameters.
///
/// # Safety
/// `params` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rf_signal_velocities(
    params: *const RfParams,
    c_plus: *mut f64,
    c_minus: *mut f64,
) -> RfStatus {
    guard(|| {
        let p = get(params)?;
        let (cp, cm) = (out(c_plus)?, out(c_minus)?);
        let norm = lift(p.0.normalize())?;
        let s = lift(signal_velocities(&norm))?;
        (*cp, *cm) = (s.c_plus, s.c_minus);
        Ok(())
    })
}

/// # Safety
/// `params` must be a live handle and `out_spectrum` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_spectrum_new(params: *const RfParams, out_spectrum: *mut *mut RfSpectrum) -> RfStatus {
    guard(|| {
        let p = get(params)?;
        let dst = out(out_spectrum)?;
        *dst = boxed(RfSpectrum(lift(Spectrum::compute(&p.0))?));
        Ok(())
    })
}

/// # Safety
/// `spectrum` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_spectrum_free(spectrum: *mut RfSpectrum) {
    if !spectrum.is_null() {
        drop(Box::from_raw(spectrum));
    }
}

/// Number of eigenvalues, `2N`.
///
/// # Safety
/// `spectrum` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_spectrum_len(spectrum: *const RfSpectrum) -> usize {
    spectrum.as_ref().map_or(0, |s| 2 * s.0.modes.len())
}

/// Copies all eigenvalues as `(nu_plus, nu_minus)` pairs in mode order,
/// starting from the most negative mode index.
///
/// # Safety
/// `re` and `im` must each hold `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn rf_spectrum_eigenvalues(
    spectrum: *const RfSpectrum,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> RfStatus {
    guard(|| {
        let s = get(spectrum)?;
        let ev = s.0.eigenvalues();
        let re = output(re, cap, ev.len())?;
        let im = output(im, cap, ev.len())?;
        for (i, z) in ev.iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        Ok(())
    })
}

/// Integrates from the state `(z0, zdot0)` of length `N` up to `t_end`,
/// storing every `stride`-th step (0 picks a default).
///
/// # Safety
/// `z0` and `zdot0` must point to `N` readable values; `out_traj` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_integrate(
    params: *const RfParams,
    z0: *const f64,
    zdot0: *const f64,
    t_end: f64,
    dt: f64,
    stride: usize,
    out_traj: *mut *mut RfTrajectory,
) -> RfStatus {
    guard(|| {
        let p = get(params)?;
        let dst = out(out_traj)?;
        let n = p.0.n;
        let stride = (stride > 0).then_some(stride);
        let traj = lift(integrate_with_stride(&p.0, input(z0, n)?, input(zdot0, n)?, t_end, dt, stride))?;
        *dst = boxed(RfTrajectory { traj, report: None });
        Ok(())
    })
}

/// Kicks agent 0 with unit velocity and tracks the wavefronts until `t_end`.
/// Fitted velocities are NaN when a branch has too few arrivals.
///
/// # Safety
/// `params` must be a live handle; all outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rf_impulse(
    params: *const RfParams,
    t_end: f64,
    dt: f64,
    fitted_c_plus: *mut f64,
    fitted_c_minus: *mut f64,
    out_traj: *mut *mut RfTrajectory,
) -> RfStatus {
    guard(|| {
        let p = get(params)?;
        let (cp, cm, dst) = (out(fitted_c_plus)?, out(fitted_c_minus)?, out(out_traj)?);
        let cfg = ImpulseConfig { t_end, dt, ..ImpulseConfig::default() };
        let (traj, report) = lift(impulse_experiment(&p.0, &cfg))?;
        *cp = report.fitted_c_plus.unwrap_or(f64::NAN);
        *cm = report.fitted_c_minus.unwrap_or(f64::NAN);
        *dst = boxed(RfTrajectory { traj, report: Some(report) });
        Ok(())
    })
}

/// # Safety
/// `traj` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_free(traj: *mut RfTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of stored frames.
///
/// # Safety
/// `traj` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_frames(traj: *const RfTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.traj.len())
}

/// Copies frame `i`: its time and the `N` displacements and velocities.
///
/// # Safety
/// `z` and `zdot` must each hold `cap` writable values, `t` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_frame(
    traj: *const RfTrajectory,
    i: usize,
    t: *mut f64,
    z: *mut f64,
    zdot: *mut f64,
    cap: usize,
) -> RfStatus {
    guard(|| {
        let tr = &get(traj)?.traj;
        if i >= tr.len() {
            return Err(fail(RfStatus::InvalidArgument, format!("frame {i} out of range 0..{}", tr.len())));
        }
        let n = tr.params.n;
        *out(t)? = tr.times[i];
        output(z, cap, n)?.copy_from_slice(&tr.z[i]);
        output(zdot, cap, n)?.copy_from_slice(&tr.zdot[i]);
        Ok(())
    })
}

/// Arrival time per agent from `rf_impulse`, NaN where the front never came.
///
/// # Safety
/// `arrival` must hold `cap` writable values.
#[no_mangle]
pub unsafe extern "C" fn rf_trajectory_arrivals(traj: *const RfTrajectory, arrival: *mut f64, cap: usize) -> RfStatus {
    guard(|| {
        let tr = get(traj)?;
        let Some(rep) = &tr.report else {
            return Err(fail(RfStatus::InvalidArgument, "trajectory has no impulse report"));
        };
        let dst = output(arrival, cap, rep.arrival_time.len())?;
        for (d, a) in dst.iter_mut().zip(&rep.arrival_time) {
            *d = a.unwrap_or(f64::NAN);
        }
        Ok(())
    })
}
