//! C ABI for the polariton simulator.
//!
//! Every fallible function returns a [`PolStatus`]; on failure the message is
//! available from [`pol_last_error_message`] on the same thread until the
//! next failing call. Handles are opaque and must be released with their
//! `_free` function. Panics never cross the boundary; they surface as
//! `POL_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use polariton::dynamics::{rabi_experiment, RabiOptions, Tolerances};
use polariton::eigen::dark_doublet;
use polariton::probe::{self, ProbeOptions};
use polariton::scan::linspace;
use polariton::{effective, Error, Preset, ScanResult, SystemParams};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Precondition = 3,
    /// Eigensolver, integrator or steady-state failure.
    Numerical = 4,
    Io = 5,
    /// Caller buffer shorter than the data.
    BufferTooSmall = 6,
    NotFound = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolPreset {
    SetA = 0,
    SetB = 1,
}

/// System parameters in units of `g`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolParams {
    pub g: f64,
    pub j: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma: f64,
    pub n1_cutoff: u32,
    pub n2_cutoff: u32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PolEffectiveParams {
    pub alpha: f64,
    pub beta: f64,
    pub g_eff: f64,
    pub delta_eff: f64,
    pub kappa_eff: f64,
    pub gamma_eff: f64,
    pub shift_e: f64,
    pub shift_2: f64,
}

/// The two dark eigenvalues `re + i im` of an excitation manifold.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PolDoublet {
    pub minus_re: f64,
    pub minus_im: f64,
    pub plus_re: f64,
    pub plus_im: f64,
    pub splitting: f64,
    /// Nonzero when `delta1 < 5 kappa1`.
    pub outside_adiabatic: i32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PolRabiSummary {
    pub g_eff: f64,
    pub rms_deviation: f64,
    pub max_n1: f64,
    pub max_n2: f64,
    pub max_trace_error: f64,
    pub min_eigenvalue: f64,
}

/// Opaque system handle.
pub struct PolSystem {
    params: SystemParams,
}

/// Opaque table: an abscissa plus named columns.
pub struct PolScan {
    scan: ScanResult,
    names: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PolStatus {
    match err {
        Error::InvalidParameter(_)
        | Error::UndefinedAdmixture
        | Error::ZeroDecay(_)
        | Error::UnsupportedExcitation(_)
        | Error::InvalidState(_)
        | Error::Config { .. } => PolStatus::InvalidParameter,
        Error::Precondition(_) | Error::UndefinedCorrelation(_) => PolStatus::Precondition,
        Error::Io(_) => PolStatus::Io,
        _ => PolStatus::Numerical,
    }
}

/// Run `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (PolStatus, String)>) -> PolStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PolStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            PolStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (PolStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PolStatus, String) {
    (PolStatus::NullPointer, format!("{what} is null"))
}

fn to_params(p: &PolParams) -> SystemParams {
    SystemParams {
        g: p.g,
        j: p.j,
        delta1: p.delta1,
        delta2: p.delta2,
        kappa1: p.kappa1,
        kappa2: p.kappa2,
        gamma: p.gamma,
        n1_cutoff: p.n1_cutoff as usize,
        n2_cutoff: p.n2_cutoff as usize,
    }
}

fn from_params(p: &SystemParams) -> PolParams {
    PolParams {
        g: p.g,
        j: p.j,
        delta1: p.delta1,
        delta2: p.delta2,
        kappa1: p.kappa1,
        kappa2: p.kappa2,
        gamma: p.gamma,
        n1_cutoff: p.n1_cutoff as u32,
        n2_cutoff: p.n2_cutoff as u32,
    }
}

unsafe fn system<'a>(sys: *const PolSystem) -> Result<&'a SystemParams, (PolStatus, String)> {
    sys.as_ref().map(|s| &s.params).ok_or_else(|| null("system"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (PolStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn boxed_scan(scan: ScanResult) -> Result<*mut PolScan, (PolStatus, String)> {
    let names = scan
        .column_names()
        .map(|n| CString::new(n).map_err(|_| (PolStatus::Numerical, "column name contains NUL".to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Box::into_raw(Box::new(PolScan { scan, names })))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn pol_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pol_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Fill `out` with a named parameter set.
///
/// # Safety
/// `out` must be null or point to writable memory for one `PolParams`.
#[no_mangle]
pub unsafe extern "C" fn pol_preset(preset: PolPreset, out: *mut PolParams) -> PolStatus {
    guard(|| {
        let p = match preset {
            PolPreset::SetA => Preset::SetA,
            PolPreset::SetB => Preset::SetB,
        };
        write_out(out, from_params(&p.params()))
    })
}

/// Validate `params` and create a system handle.
///
/// # Safety
/// `params` must be null or point to a valid `PolParams`; `out` must be null
/// or point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn pol_system_new(params: *const PolParams, out: *mut *mut PolSystem) -> PolStatus {
    guard(|| {
        let p = to_params(params.as_ref().ok_or_else(|| null("params"))?);
        p.validate().map_err(lib_err)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        out.write(Box::into_raw(Box::new(PolSystem { params: p })));
        Ok(())
    })
}

/// # Safety
/// `sys` must be null or a handle from `pol_system_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pol_system_free(sys: *mut PolSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Current parameters of a system.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn pol_system_params(sys: *const PolSystem, out: *mut PolParams) -> PolStatus {
    guard(|| write_out(out, from_params(system(sys)?)))
}

/// Move `delta2` onto the effective resonance `(beta^2 - alpha^2) delta1`.
///
/// # Safety
/// `sys` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pol_system_set_resonance(sys: *mut PolSystem) -> PolStatus {
    guard(|| {
        let s = sys.as_mut().ok_or_else(|| null("system"))?;
        s.params = s.params.at_resonance().map_err(lib_err)?;
        Ok(())
    })
}

/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn pol_effective_params(sys: *const PolSystem, out: *mut PolEffectiveParams) -> PolStatus {
    guard(|| {
        let e = effective::effective_params(system(sys)?).map_err(lib_err)?;
        write_out(
            out,
            PolEffectiveParams {
                alpha: e.alpha,
                beta: e.beta,
                g_eff: e.g_eff,
                delta_eff: e.delta_eff,
                kappa_eff: e.kappa_eff,
                gamma_eff: e.gamma_eff,
                shift_e: e.shift_e,
                shift_2: e.shift_2,
            },
        )
    })
}

/// Dark doublet of the `n_exc` manifold (1 or 2).
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn pol_dark_doublet(sys: *const PolSystem, n_exc: u32, out: *mut PolDoublet) -> PolStatus {
    guard(|| {
        let d = dark_doublet(system(sys)?, n_exc as usize).map_err(lib_err)?;
        write_out(
            out,
            PolDoublet {
                minus_re: d.minus.eigenvalue.re,
                minus_im: d.minus.eigenvalue.im,
                plus_re: d.plus.eigenvalue.re,
                plus_im: d.plus.eigenvalue.im,
                splitting: d.splitting,
                outside_adiabatic: d.outside_adiabatic_regime as i32,
            },
        )
    })
}

/// Vacuum-Rabi run from `|e,0,0>` over `periods` Rabi periods.
///
/// The table has abscissa `t` and columns `N1`, `N2`, `Pe`, `Pe_eff`.
/// `summary` may be null.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn pol_rabi_run(
    sys: *const PolSystem,
    periods: f64,
    samples: u32,
    rtol: f64,
    atol: f64,
    summary: *mut PolRabiSummary,
    out: *mut *mut PolScan,
) -> PolStatus {
    guard(|| {
        let p = system(sys)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let tol = Tolerances::new(rtol, atol).map_err(lib_err)?;
        let r = rabi_experiment(p, &RabiOptions { periods, samples: samples as usize, tol, horizon: None }).map_err(lib_err)?;
        if !summary.is_null() {
            summary.write(PolRabiSummary {
                g_eff: r.effective.g_eff,
                rms_deviation: r.rms_deviation,
                max_n1: r.max_n1,
                max_n2: r.max_n2,
                max_trace_error: r.series.diagnostics.max_trace_error,
                min_eigenvalue: r.series.diagnostics.min_eigenvalue,
            });
        }
        out.write(boxed_scan(r.to_scan().map_err(lib_err)?)?);
        Ok(())
    })
}

fn probe_grid(start: f64, stop: f64, count: u32) -> Result<Vec<f64>, (PolStatus, String)> {
    if count == 0 || !start.is_finite() || !stop.is_finite() {
        return Err((PolStatus::InvalidParameter, "grid needs finite bounds and count >= 1".into()));
    }
    Ok(linspace(start, stop, count as usize))
}

/// `g2(0)` of the auxiliary mode over probe detunings, probe amplitude `eps`
/// on `a2`. Uses the system's cutoffs and a (2,2) cross-check.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn pol_g2_scan(
    sys: *const PolSystem,
    eps: f64,
    start: f64,
    stop: f64,
    count: u32,
    out: *mut *mut PolScan,
) -> PolStatus {
    guard(|| {
        let p = system(sys)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let opts = ProbeOptions { cutoffs: (p.n1_cutoff, p.n2_cutoff), coarse_cutoffs: Some((2, 2)) };
        let scan = probe::g2_scan(p, eps, &probe_grid(start, stop, count)?, &opts).map_err(lib_err)?;
        out.write(boxed_scan(scan)?);
        Ok(())
    })
}

/// Normalized emitter excitation spectrum over probe detunings.
///
/// # Safety
/// Pointers must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn pol_spectrum(
    sys: *const PolSystem,
    eps: f64,
    start: f64,
    stop: f64,
    count: u32,
    out: *mut *mut PolScan,
) -> PolStatus {
    guard(|| {
        let p = system(sys)?;
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let opts = ProbeOptions { cutoffs: (p.n1_cutoff, p.n2_cutoff), coarse_cutoffs: Some((2, 2)) };
        let scan = probe::excitation_spectrum(p, eps, &probe_grid(start, stop, count)?, &opts).map_err(lib_err)?;
        out.write(boxed_scan(scan)?);
        Ok(())
    })
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `scan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pol_scan_len(scan: *const PolScan) -> usize {
    scan.as_ref().map_or(0, |s| s.scan.len())
}

/// Number of named columns (the abscissa excluded).
///
/// # Safety
/// `scan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pol_scan_column_count(scan: *const PolScan) -> usize {
    scan.as_ref().map_or(0, |s| s.names.len())
}

/// Name of column `index`, owned by the handle; null when out of range.
///
/// # Safety
/// `scan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pol_scan_column_name(scan: *const PolScan, index: usize) -> *const c_char {
    scan.as_ref().and_then(|s| s.names.get(index)).map_or(ptr::null(), |c| c.as_ptr())
}

unsafe fn copy_into(values: &[f64], buf: *mut f64, len: usize) -> Result<(), (PolStatus, String)> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if len < values.len() {
        return Err((PolStatus::BufferTooSmall, format!("buffer holds {len} values, need {}", values.len())));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// Copy the abscissa into `buf` (at least `pol_scan_len` values).
///
/// # Safety
/// `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn pol_scan_abscissa(scan: *const PolScan, buf: *mut f64, len: usize) -> PolStatus {
    guard(|| {
        let s = scan.as_ref().ok_or_else(|| null("scan"))?;
        copy_into(&s.scan.abscissa, buf, len)
    })
}

/// Copy the column called `name` into `buf`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `buf` must be valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn pol_scan_column(scan: *const PolScan, name: *const c_char, buf: *mut f64, len: usize) -> PolStatus {
    guard(|| {
        let s = scan.as_ref().ok_or_else(|| null("scan"))?;
        if name.is_null() {
            return Err(null("column name"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|_| (PolStatus::InvalidParameter, "column name is not UTF-8".into()))?;
        let col = s.scan.column(name).ok_or_else(|| (PolStatus::NotFound, format!("no column '{name}'")))?;
        copy_into(col, buf, len)
    })
}

/// # Safety
/// `scan` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pol_scan_free(scan: *mut PolScan) {
    if !scan.is_null() {
        drop(Box::from_raw(scan));
    }
}
