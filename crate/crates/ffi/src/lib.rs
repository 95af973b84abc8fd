//! C ABI over the `cutstokes` solver.
//!
//! Every function returns a [`CsStatus`]. On failure a message is kept per
//! thread and can be read with [`cs_last_error_message`]. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cutstokes::assembly::BForm;
use cutstokes::cli::write_vtk;
use cutstokes::verification::{pressure_shift, run_case_with, CaseId, CaseRun, ManufacturedCase, RunOptions};
use cutstokes::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    /// Null pointer, bad name or out-of-range argument.
    InvalidArgument = 1,
    /// The mesh does not resolve the interface.
    AssumptionViolation = 2,
    /// Singular matrix or failed factorization.
    SolverFailure = 3,
    Io = 4,
    /// A bug; the handle involved should not be used again.
    Panic = 5,
}

/// Error norms of one run. `cond` is NaN when it was not computed.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsReport {
    pub h_x: f64,
    pub err_p_l2: f64,
    pub err_u_l2: f64,
    pub err_u_h1: f64,
    pub err_u_inf: f64,
    pub err_p_inf: f64,
    pub cond: f64,
    pub residual: f64,
    pub n_velocity: usize,
    pub n_pressure: usize,
}

/// A configured problem.
pub struct CsCase {
    inner: ManufacturedCase,
}

/// A solved problem.
pub struct CsRun {
    inner: CaseRun,
    shift: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CsStatus {
    match e {
        Error::InvalidInput(_) => CsStatus::InvalidArgument,
        Error::AssumptionViolation { .. } => CsStatus::AssumptionViolation,
        Error::Singular { .. } | Error::Solver(_) => CsStatus::SolverFailure,
        Error::Io(_) => CsStatus::Io,
    }
}

type Failure = (CsStatus, String);

fn invalid(msg: &str) -> Failure {
    (CsStatus::InvalidArgument, msg.to_string())
}

fn core(e: Error) -> Failure {
    (status_of(&e), e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            CsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(invalid(&format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(&format!("{what} is not valid UTF-8")))
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn cs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Create the preset `name` (`"1"`, `"2"`, `"3a"`, `"3b"` or the long names).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_case_new(name: *const c_char, out: *mut *mut CsCase) -> CsStatus {
    guard(|| {
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        let id: CaseId = str_arg(name, "name")?.parse().map_err(core)?;
        let case = Box::new(CsCase {
            inner: ManufacturedCase::preset(id),
        });
        *out = Box::into_raw(case);
        Ok(())
    })
}

/// # Safety
/// `case` must come from [`cs_case_new`] and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn cs_case_free(case: *mut CsCase) {
    if !case.is_null() {
        drop(Box::from_raw(case));
    }
}

/// Set the velocity and pressure ghost-penalty scalings.
///
/// # Safety
/// `case` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_case_set_stabilization(case: *mut CsCase, eps_u: f64, eps_p: f64) -> CsStatus {
    guard(|| {
        let c = case.as_mut().ok_or_else(|| invalid("case is null"))?;
        if !(eps_u >= 0.0 && eps_p >= 0.0 && eps_u.is_finite() && eps_p.is_finite()) {
            return Err(invalid("scalings must be finite and non-negative"));
        }
        c.inner.cfg.eps_u = eps_u;
        c.inner.cfg.eps_p = eps_p;
        Ok(())
    })
}

/// Nonzero `divergence` selects the divergence form of the coupling.
///
/// # Safety
/// `case` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn cs_case_set_divergence_form(case: *mut CsCase, divergence: i32) -> CsStatus {
    guard(|| {
        let c = case.as_mut().ok_or_else(|| invalid("case is null"))?;
        c.inner.cfg.b_form = if divergence != 0 { BForm::Divergence } else { BForm::Gradient };
        Ok(())
    })
}

/// Assemble and solve on a velocity mesh with `nx` columns.
///
/// # Safety
/// `case` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_run(case: *const CsCase, nx: usize, with_condition: bool, out: *mut *mut CsRun) -> CsStatus {
    guard(|| {
        let c = case.as_ref().ok_or_else(|| invalid("case is null"))?;
        if out.is_null() {
            return Err(invalid("out is null"));
        }
        c.inner.cfg.validate().map_err(core)?;
        let opts = RunOptions {
            condition: with_condition,
            ..RunOptions::default()
        };
        let run = run_case_with(&c.inner, nx, opts).map_err(core)?;
        let shift = pressure_shift(&run.disc, &run.solution.p, &c.inner.exact, c.inner.cfg.mu).map_err(core)?;
        *out = Box::into_raw(Box::new(CsRun { inner: run, shift }));
        Ok(())
    })
}

/// # Safety
/// `run` must come from [`cs_run`] and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn cs_run_free(run: *mut CsRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cs_run_report(run: *const CsRun, out: *mut CsReport) -> CsStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| invalid("run is null"))?;
        let out = out.as_mut().ok_or_else(|| invalid("out is null"))?;
        let e = &r.inner.report;
        *out = CsReport {
            h_x: e.h_x,
            err_p_l2: e.err_p_l2,
            err_u_l2: e.err_u_l2,
            err_u_h1: e.err_u_h1,
            err_u_inf: e.err_u_inf,
            err_p_inf: e.err_p_inf,
            cond: e.cond.unwrap_or(f64::NAN),
            residual: r.inner.solution.residual_norm,
            n_velocity: r.inner.solution.u.coefficients.len(),
            n_pressure: r.inner.solution.p.coefficients.len(),
        };
        Ok(())
    })
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(invalid("buffer is null"));
    }
    if len < src.len() {
        return Err(invalid(&format!("buffer holds {len} values, {} needed", src.len())));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Copy the velocity coefficients (x and y interleaved per vertex, side one
/// then side two). `len` is the capacity of `buf`.
///
/// # Safety
/// `run` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cs_run_velocity(run: *const CsRun, buf: *mut f64, len: usize) -> CsStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| invalid("run is null"))?;
        copy_out(&r.inner.solution.u.coefficients, buf, len)
    })
}

/// Copy the pressure coefficients, shifted to the exact solution's mean.
///
/// # Safety
/// `run` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn cs_run_pressure(run: *const CsRun, buf: *mut f64, len: usize) -> CsStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| invalid("run is null"))?;
        let p: Vec<f64> = r.inner.solution.p.coefficients.iter().map(|v| v + r.shift).collect();
        copy_out(&p, buf, len)
    })
}

/// Write the four legacy-VTK files `<stem>_{pressure,velocity}_side{1,2}.vtk`
/// into the existing directory `dir`.
///
/// # Safety
/// `run` must be a live handle; `dir` and `stem` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn cs_run_write_vtk(run: *const CsRun, dir: *const c_char, stem: *const c_char) -> CsStatus {
    guard(|| {
        let r = run.as_ref().ok_or_else(|| invalid("run is null"))?;
        let dir = str_arg(dir, "dir")?;
        let stem = str_arg(stem, "stem")?;
        write_vtk(&r.inner.solution, r.shift, Path::new(dir), stem).map_err(core)?;
        Ok(())
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
