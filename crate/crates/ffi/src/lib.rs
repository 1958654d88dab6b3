//! C ABI over `dispatchkit`.
//!
//! Problems and solutions are opaque heap handles owned by the caller and
//! released with the matching `*_free` function. Every fallible call returns
//! a `DkStatus`; on failure a message is retrievable from
//! `dk_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dispatchkit::problem_file::parse_problem;
use dispatchkit::{
    classify_regime, solve_cost_dispatch, solve_multiobjective, solve_resilience_dispatch,
    BoundStatus, DispatchError, DispatchProblem, DispatchSolution, ParticipatingCustomer, Regime,
    SolverConfig,
};

/// Opaque problem handle.
pub struct DkProblem(DispatchProblem);

/// Opaque solution handle.
pub struct DkSolution(DispatchSolution);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkStatus {
    Ok = 0,
    ParseError = 1,
    Infeasible = 2,
    Numerical = 3,
    InvalidArgument = 4,
    NullPointer = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkRegime {
    BelowMinimum = 0,
    EqualityFeasible = 1,
    Deficit = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkMode {
    Cost = 0,
    Resilience = 1,
    Multi = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkBoundStatus {
    AtLower = 0,
    Interior = 1,
    AtUpper = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DkRegimeReport {
    pub regime: DkRegime,
    pub capacity_min: f64,
    pub capacity_max: f64,
    pub demand_e: f64,
}

/// One customer for `dk_problem_new`. `id` is a NUL-terminated UTF-8 string.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DkCustomerSpec {
    pub id: *const c_char,
    pub p_min_kw: f64,
    pub p_max_kw: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: DkStatus, msg: impl Into<String>) -> DkStatus {
    set_error(msg);
    status
}

fn from_dispatch_error(e: DispatchError) -> DkStatus {
    let status = match e {
        DispatchError::InputDomain(_) => DkStatus::InvalidArgument,
        DispatchError::Infeasible { .. } => DkStatus::Infeasible,
        DispatchError::Numerical(_) => DkStatus::Numerical,
    };
    fail(status, e.to_string())
}

fn guarded(f: impl FnOnce() -> DkStatus) -> DkStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(DkStatus::Panic, "internal panic"),
    }
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn dk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a problem from `n` customer specs.
///
/// # Safety
/// `customers` must point to `n` valid specs whose `id` fields are valid
/// NUL-terminated strings; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dk_problem_new(
    customers: *const DkCustomerSpec,
    n: usize,
    horizon_t_h: f64,
    demand_e_kwh: f64,
    lambda: f64,
    out: *mut *mut DkProblem,
) -> DkStatus {
    guarded(|| {
        if out.is_null() || (customers.is_null() && n > 0) {
            return fail(DkStatus::NullPointer, "null argument");
        }
        let specs = if n == 0 {
            &[][..]
        } else {
            std::slice::from_raw_parts(customers, n)
        };
        let mut fleet = Vec::with_capacity(n);
        for (i, s) in specs.iter().enumerate() {
            if s.id.is_null() {
                return fail(DkStatus::NullPointer, format!("customer {i}: null id"));
            }
            let id = match CStr::from_ptr(s.id).to_str() {
                Ok(id) => id,
                Err(_) => {
                    return fail(
                        DkStatus::InvalidArgument,
                        format!("customer {i}: id is not UTF-8"),
                    )
                }
            };
            match ParticipatingCustomer::new(id, s.p_min_kw, s.p_max_kw, s.c0, s.c1, s.c2) {
                Ok(c) => fleet.push(c),
                Err(e) => return from_dispatch_error(e),
            }
        }
        match DispatchProblem::new(fleet, horizon_t_h, demand_e_kwh, lambda) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(DkProblem(p)));
                DkStatus::Ok
            }
            Err(e) => from_dispatch_error(e),
        }
    })
}

/// Parses a TOML problem document.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dk_problem_from_toml(
    text: *const c_char,
    out: *mut *mut DkProblem,
) -> DkStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return fail(DkStatus::NullPointer, "null argument");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(DkStatus::ParseError, "problem text is not UTF-8");
        };
        match parse_problem(text) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(DkProblem(p)));
                DkStatus::Ok
            }
            Err(e) => fail(DkStatus::ParseError, e.to_string()),
        }
    })
}

/// The bundled five-customer reference fleet (700 kWh, λ = 0.5, T = 1 h).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dk_problem_reference_fleet(out: *mut *mut DkProblem) -> DkStatus {
    guarded(|| {
        if out.is_null() {
            return fail(DkStatus::NullPointer, "null argument");
        }
        *out = Box::into_raw(Box::new(DkProblem(dispatchkit::fixture::reference_fleet())));
        DkStatus::Ok
    })
}

/// # Safety
/// `problem` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dk_problem_free(problem: *mut DkProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dk_problem_len(problem: *const DkProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dk_problem_set_demand(
    problem: *mut DkProblem,
    demand_e_kwh: f64,
) -> DkStatus {
    guarded(|| match problem.as_mut() {
        None => fail(DkStatus::NullPointer, "null problem"),
        Some(p) => match p.0.with_demand(demand_e_kwh) {
            Ok(np) => {
                p.0 = np;
                DkStatus::Ok
            }
            Err(e) => from_dispatch_error(e),
        },
    })
}

/// # Safety
/// `problem` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dk_problem_set_lambda(problem: *mut DkProblem, lambda: f64) -> DkStatus {
    guarded(|| match problem.as_mut() {
        None => fail(DkStatus::NullPointer, "null problem"),
        Some(p) => match p.0.with_lambda(lambda) {
            Ok(np) => {
                p.0 = np;
                DkStatus::Ok
            }
            Err(e) => from_dispatch_error(e),
        },
    })
}

/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dk_classify(
    problem: *const DkProblem,
    out: *mut DkRegimeReport,
) -> DkStatus {
    guarded(|| {
        let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
            return fail(DkStatus::NullPointer, "null argument");
        };
        let r = classify_regime(&p.0);
        *out = DkRegimeReport {
            regime: match r.regime {
                Regime::BelowMinimum => DkRegime::BelowMinimum,
                Regime::EqualityFeasible => DkRegime::EqualityFeasible,
                Regime::Deficit => DkRegime::Deficit,
            },
            capacity_min: r.capacity_min,
            capacity_max: r.capacity_max,
            demand_e: r.demand_e,
        };
        DkStatus::Ok
    })
}

/// Solves with default solver settings; `bisection_tol <= 0` keeps the default tolerance.
///
/// # Safety
/// `problem` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dk_solve(
    problem: *const DkProblem,
    mode: DkMode,
    bisection_tol: f64,
    out: *mut *mut DkSolution,
) -> DkStatus {
    guarded(|| {
        let (Some(p), false) = (problem.as_ref(), out.is_null()) else {
            return fail(DkStatus::NullPointer, "null argument");
        };
        let mut cfg = SolverConfig::default();
        if bisection_tol > 0.0 {
            cfg.bisection_tol = bisection_tol;
        }
        let res = match mode {
            DkMode::Cost => solve_cost_dispatch(&p.0, &cfg),
            DkMode::Resilience => solve_resilience_dispatch(&p.0, &cfg),
            DkMode::Multi => solve_multiobjective(&p.0, &cfg),
        };
        match res {
            Ok(s) => {
                *out = Box::into_raw(Box::new(DkSolution(s)));
                DkStatus::Ok
            }
            Err(e) => from_dispatch_error(e),
        }
    })
}

/// # Safety
/// `solution` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dk_solution_free(solution: *mut DkSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// # Safety
/// `solution` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dk_solution_len(solution: *const DkSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.energies.len())
}

/// Copies per-customer energies (kWh) into `buf`, which holds `len` values.
/// `len` must equal `dk_solution_len`.
///
/// # Safety
/// `solution` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn dk_solution_energies(
    solution: *const DkSolution,
    buf: *mut f64,
    len: usize,
) -> DkStatus {
    guarded(|| {
        let (Some(s), false) = (solution.as_ref(), buf.is_null()) else {
            return fail(DkStatus::NullPointer, "null argument");
        };
        if len != s.0.energies.len() {
            return fail(
                DkStatus::InvalidArgument,
                format!(
                    "buffer holds {len} values, solution has {}",
                    s.0.energies.len()
                ),
            );
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(&s.0.energies);
        DkStatus::Ok
    })
}

/// Copies per-customer bound statuses into `buf`, which holds `len` entries.
///
/// # Safety
/// `solution` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn dk_solution_bound_status(
    solution: *const DkSolution,
    buf: *mut DkBoundStatus,
    len: usize,
) -> DkStatus {
    guarded(|| {
        let (Some(s), false) = (solution.as_ref(), buf.is_null()) else {
            return fail(DkStatus::NullPointer, "null argument");
        };
        if len != s.0.bound_status.len() {
            return fail(
                DkStatus::InvalidArgument,
                format!(
                    "buffer holds {len} entries, solution has {}",
                    s.0.bound_status.len()
                ),
            );
        }
        let dst = std::slice::from_raw_parts_mut(buf, len);
        for (d, b) in dst.iter_mut().zip(&s.0.bound_status) {
            *d = match b {
                BoundStatus::AtLower => DkBoundStatus::AtLower,
                BoundStatus::Interior => DkBoundStatus::Interior,
                BoundStatus::AtUpper => DkBoundStatus::AtUpper,
            };
        }
        DkStatus::Ok
    })
}

/// # Safety
/// `solution` must be a live handle. Returns NaN for NULL.
#[no_mangle]
pub unsafe extern "C" fn dk_solution_total_energy(solution: *const DkSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.total_energy)
}

/// # Safety
/// `solution` must be a live handle. Returns NaN for NULL.
#[no_mangle]
pub unsafe extern "C" fn dk_solution_total_cost(solution: *const DkSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.total_cost)
}

/// # Safety
/// `solution` must be a live handle. Returns NaN for NULL.
#[no_mangle]
pub unsafe extern "C" fn dk_solution_coupling_multiplier(solution: *const DkSolution) -> f64 {
    solution
        .as_ref()
        .map_or(f64::NAN, |s| s.0.coupling_multiplier)
}

/// # Safety
/// `solution` must be a live handle. Returns NaN for NULL.
#[no_mangle]
pub unsafe extern "C" fn dk_solution_kkt_residual(solution: *const DkSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.kkt_residual)
}
