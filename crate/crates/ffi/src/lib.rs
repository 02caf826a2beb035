//! C ABI for the `irlw` solver library.
//!
//! The surface follows the usual opaque-handle pattern: constructors return
//! `IRLW_STATUS_OK` and write a handle through an out-pointer; every handle
//! has exactly one `*_free` function; all other calls borrow the handle.
//! Status codes classify failures the same way the CLI exit codes do.
//!
//! The generated header lands in `include/irlw.h` (see `build.rs`).
//!
//! # Safety
//!
//! All functions are safe to call with null handles (they return
//! `IRLW_STATUS_NULL_POINTER`), but pointers to arrays must cover the
//! documented number of elements and handles must not be used after free.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use irlw::analysis;
use irlw::config::parse_config;
use irlw::constants;
use irlw::problems::{DiagonalLinear, ForwardProblem, Monomial, ResistorNetwork};
use irlw::solver::{
    solve, BetaSchedule, IterationTrace, IterationVariant, SolverConfig, TerminalStatus,
};
use irlw::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrlwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Infeasible = 3,
    DimensionMismatch = 4,
    StructureError = 5,
    SamplingError = 6,
    ConfigError = 7,
    Unavailable = 8,
    Panic = 9,
}

fn status_of(err: &Error) -> IrlwStatus {
    match err {
        Error::DimensionMismatch { .. } => IrlwStatus::DimensionMismatch,
        Error::InvalidParameter(_) => IrlwStatus::InvalidArgument,
        Error::Infeasible(_) => IrlwStatus::Infeasible,
        Error::Structure(_) => IrlwStatus::StructureError,
        Error::Sampling(_) => IrlwStatus::SamplingError,
        Error::Config(_) | Error::Parse { .. } => IrlwStatus::ConfigError,
        Error::Precondition(_) => IrlwStatus::Unavailable,
        Error::Io(_) => IrlwStatus::ConfigError,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn irlw_status_message(status: IrlwStatus) -> *const c_char {
    let text: &'static [u8] = match status {
        IrlwStatus::Ok => b"ok\0",
        IrlwStatus::NullPointer => b"null pointer argument\0",
        IrlwStatus::InvalidArgument => b"invalid argument\0",
        IrlwStatus::Infeasible => b"admissibility condition has no solution\0",
        IrlwStatus::DimensionMismatch => b"dimension mismatch\0",
        IrlwStatus::StructureError => b"graph structure error\0",
        IrlwStatus::SamplingError => b"sampling error\0",
        IrlwStatus::ConfigError => b"configuration error\0",
        IrlwStatus::Unavailable => b"requested data unavailable\0",
        IrlwStatus::Panic => b"internal panic\0",
    };
    text.as_ptr() as *const c_char
}

/// Library version string (static, do not free).
#[no_mangle]
pub extern "C" fn irlw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque forward-problem handle.
pub struct IrlwProblem {
    inner: Box<dyn ForwardProblem>,
}

/// Opaque iteration-trace handle.
pub struct IrlwTrace {
    inner: IterationTrace,
}

/// Solver options mirrored into C. Nonpositive `mu` means "auto"
/// (0.9 x the admissible supremum); nonpositive `rho_sq` means "use the
/// closed-form radius".
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IrlwSolverOptions {
    pub mu: f64,
    pub rho_sq: f64,
    /// 0 = standard (shifted), 1 = unshifted variant.
    pub variant: i32,
    /// 0 = zero, 1 = power, 2 = geometric, 3 = adaptive.
    pub schedule: i32,
    pub beta_base: f64,
    /// Power exponent or geometric/adaptive ratio.
    pub beta_decay: f64,
    pub beta_max: f64,
    pub smoothness_c: f64,
    pub max_iterations: usize,
    pub residual_tolerance: f64,
    pub gamma_tolerance: f64,
    pub allow_mu_override: bool,
}

/// One trace row mirrored into C; absent optional fields are NaN
/// (`in_ball` is -1 when unknown).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IrlwTraceRow {
    pub k: usize,
    pub beta: f64,
    pub gamma: f64,
    pub residual: f64,
    pub err_norm: f64,
    pub in_ball: i32,
    pub alpha: f64,
    pub bound_rhs: f64,
}

/// Declared problem constants mirrored into C.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct IrlwProblemConstants {
    pub lipschitz_l: f64,
    pub deriv_bound_lhat: f64,
    pub stability_cf: f64,
    pub stability_eps: f64,
}

fn guard<F: FnOnce() -> IrlwStatus>(body: F) -> IrlwStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => IrlwStatus::Panic,
    }
}

unsafe fn write_handle<T>(out: *mut *mut T, value: T) -> IrlwStatus {
    if out.is_null() {
        return IrlwStatus::NullPointer;
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    IrlwStatus::Ok
}

/// Diagonal linear problem `F(u)_i = s_i u_i`.
///
/// `ground_truth` may be null (defaults to 0.1 per coordinate); otherwise it
/// must hold `len` values.
///
/// # Safety
/// `singular_values` must point to `len` readable doubles, `ground_truth` to
/// `len` doubles when non-null.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_diagonal(
    singular_values: *const f64,
    len: usize,
    ground_truth: *const f64,
    out: *mut *mut IrlwProblem,
) -> IrlwStatus {
    guard(|| {
        if singular_values.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let sv = unsafe { std::slice::from_raw_parts(singular_values, len) }.to_vec();
        let result = if ground_truth.is_null() {
            DiagonalLinear::new(sv)
        } else {
            let truth = unsafe { std::slice::from_raw_parts(ground_truth, len) }.to_vec();
            DiagonalLinear::with_ground_truth(sv, truth)
        };
        match result {
            Ok(problem) => unsafe {
                write_handle(
                    out,
                    IrlwProblem {
                        inner: Box::new(problem),
                    },
                )
            },
            Err(err) => status_of(&err),
        }
    })
}

/// Componentwise monomial problem `F(u)_i = |u_i|^{m-1} u_i`, `m` in (1, 2].
///
/// # Safety
/// `out` must be a valid out-pointer.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_monomial(
    dimension: usize,
    m: f64,
    out: *mut *mut IrlwProblem,
) -> IrlwStatus {
    guard(|| match Monomial::new(dimension, m) {
        Ok(problem) => unsafe {
            write_handle(
                out,
                IrlwProblem {
                    inner: Box::new(problem),
                },
            )
        },
        Err(err) => status_of(&err),
    })
}

/// Resistor-network DtN problem. `edge_endpoints` holds `2 * n_edges` node
/// indices (pairs), `conductances` holds `n_edges` positive values.
///
/// # Safety
/// The two arrays must cover the stated number of elements.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_resistor(
    boundary_nodes: usize,
    interior_nodes: usize,
    edge_endpoints: *const usize,
    conductances: *const f64,
    n_edges: usize,
    out: *mut *mut IrlwProblem,
) -> IrlwStatus {
    guard(|| {
        if edge_endpoints.is_null() || conductances.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let endpoints = unsafe { std::slice::from_raw_parts(edge_endpoints, 2 * n_edges) };
        let sigma = unsafe { std::slice::from_raw_parts(conductances, n_edges) }.to_vec();
        let edges: Vec<(usize, usize)> = endpoints
            .chunks_exact(2)
            .map(|pair| (pair[0], pair[1]))
            .collect();
        match ResistorNetwork::new(boundary_nodes, interior_nodes, edges, sigma) {
            Ok(problem) => unsafe {
                write_handle(
                    out,
                    IrlwProblem {
                        inner: Box::new(problem),
                    },
                )
            },
            Err(err) => status_of(&err),
        }
    })
}

/// Build a problem from the text of an experiment config (the same format
/// the CLI reads).
///
/// # Safety
/// `text` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_from_config(
    text: *const c_char,
    out: *mut *mut IrlwProblem,
) -> IrlwStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let Ok(text) = unsafe { CStr::from_ptr(text) }.to_str() else {
            return IrlwStatus::InvalidArgument;
        };
        let config = match parse_config(text) {
            Ok(config) => config,
            Err(err) => return status_of(&err),
        };
        match config.resolve_problem(None) {
            Ok(problem) => unsafe { write_handle(out, IrlwProblem { inner: problem }) },
            Err(err) => status_of(&err),
        }
    })
}

/// # Safety
/// `problem` must be a handle from a constructor, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_free(problem: *mut IrlwProblem) {
    if !problem.is_null() {
        drop(unsafe { Box::from_raw(problem) });
    }
}

/// Model-space dimension (number of unknowns). Null handles give 0.
///
/// # Safety
/// `problem` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_dimension(problem: *const IrlwProblem) -> usize {
    if problem.is_null() {
        return 0;
    }
    unsafe { &*problem }.inner.domain_space().dimension()
}

/// Data-space dimension (length of `F(u)`). Null handles give 0.
///
/// # Safety
/// `problem` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_range_dimension(problem: *const IrlwProblem) -> usize {
    if problem.is_null() {
        return 0;
    }
    unsafe { &*problem }.inner.range_space().dimension()
}

/// Evaluate `F(u)`; `u` has the model-space dimension, `out` the data-space
/// dimension.
///
/// # Safety
/// Array lengths per the dimension accessors.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_apply(
    problem: *const IrlwProblem,
    u: *const f64,
    out: *mut f64,
) -> IrlwStatus {
    guard(|| {
        if problem.is_null() || u.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let problem = &unsafe { &*problem }.inner;
        let space = problem.domain_space();
        let coeffs = unsafe { std::slice::from_raw_parts(u, space.dimension()) }.to_vec();
        let u = match space.primal(coeffs) {
            Ok(u) => u,
            Err(err) => return status_of(&err),
        };
        let image = problem.apply(&u);
        let out = unsafe { std::slice::from_raw_parts_mut(out, image.coeffs().len()) };
        out.copy_from_slice(image.coeffs());
        IrlwStatus::Ok
    })
}

/// Copy of the ground truth, when the problem has one.
///
/// # Safety
/// `out` must hold the model-space dimension.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_ground_truth(
    problem: *const IrlwProblem,
    out: *mut f64,
) -> IrlwStatus {
    guard(|| {
        if problem.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let problem = &unsafe { &*problem }.inner;
        match problem.ground_truth() {
            Some(truth) => {
                let out = unsafe { std::slice::from_raw_parts_mut(out, truth.coeffs().len()) };
                out.copy_from_slice(truth.coeffs());
                IrlwStatus::Ok
            }
            None => IrlwStatus::Unavailable,
        }
    })
}

/// Declared `(L, Lhat, C_F, eps)` of the problem.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irlw_problem_constants(
    problem: *const IrlwProblem,
    out: *mut IrlwProblemConstants,
) -> IrlwStatus {
    guard(|| {
        if problem.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let consts = unsafe { &*problem }.inner.constants();
        unsafe {
            *out = IrlwProblemConstants {
                lipschitz_l: consts.lipschitz_l,
                deriv_bound_lhat: consts.deriv_bound_lhat,
                stability_cf: consts.stability_cf,
                stability_eps: consts.stability_eps,
            };
        }
        IrlwStatus::Ok
    })
}

/// Mode-appropriate admissible step-size supremum for the problem.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irlw_admissible_mu(
    problem: *const IrlwProblem,
    out: *mut f64,
) -> IrlwStatus {
    guard(|| {
        if problem.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let problem = &unsafe { &*problem }.inner;
        let space = problem.domain_space();
        let consts = problem.constants();
        let bound = if consts.stability_eps == 0.0 {
            match constants::mu_max_eps0(space, consts) {
                Ok(v) => v,
                Err(err) => return status_of(&err),
            }
        } else {
            constants::mu_max(space, consts)
        };
        unsafe { *out = bound };
        IrlwStatus::Ok
    })
}

/// The gauge constant `kappa_p` (requires `p > 1`).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irlw_kappa_p(p: f64, out: *mut f64) -> IrlwStatus {
    guard(|| {
        if out.is_null() {
            return IrlwStatus::NullPointer;
        }
        match constants::kappa_p(p) {
            Ok(v) => {
                unsafe { *out = v };
                IrlwStatus::Ok
            }
            Err(err) => status_of(&err),
        }
    })
}

/// Defaults: auto step size, closed-form radius, zero schedule, 10^4
/// iteration cap, gamma tolerance 1e-9.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irlw_solver_options_default(out: *mut IrlwSolverOptions) -> IrlwStatus {
    guard(|| {
        if out.is_null() {
            return IrlwStatus::NullPointer;
        }
        unsafe {
            *out = IrlwSolverOptions {
                mu: -1.0,
                rho_sq: -1.0,
                variant: 0,
                schedule: 0,
                beta_base: 0.05,
                beta_decay: 2.0,
                beta_max: 0.4,
                smoothness_c: 0.05,
                max_iterations: 10_000,
                residual_tolerance: 0.0,
                gamma_tolerance: 1e-9,
                allow_mu_override: false,
            };
        }
        IrlwStatus::Ok
    })
}

fn build_solver_config(
    problem: &dyn ForwardProblem,
    options: &IrlwSolverOptions,
    u0: Option<Vec<f64>>,
) -> Result<SolverConfig, Error> {
    let space = problem.domain_space();
    let schedule = match options.schedule {
        0 => BetaSchedule::zero(),
        1 => BetaSchedule::power(options.beta_base, options.beta_decay, options.beta_max)?,
        2 => BetaSchedule::geometric(options.beta_base, options.beta_decay, options.beta_max)?,
        3 => BetaSchedule::adaptive(
            options.beta_base,
            options.beta_decay,
            options.smoothness_c,
            options.beta_max,
        )?,
        other => return Err(Error::Config(format!("unknown schedule code {other}"))),
    };
    let variant = match options.variant {
        0 => IterationVariant::Standard,
        1 => IterationVariant::Unshifted,
        other => return Err(Error::Config(format!("unknown variant code {other}"))),
    };
    let mu = if options.mu > 0.0 {
        options.mu
    } else {
        let consts = problem.constants();
        0.9 * if consts.stability_eps == 0.0 {
            constants::mu_max_eps0(space, consts)?
        } else {
            constants::mu_max(space, consts)
        }
    };
    let u0 = match u0 {
        Some(coeffs) => space.primal(coeffs)?,
        None => space.zero_primal(),
    };
    Ok(SolverConfig {
        mu,
        schedule,
        variant,
        max_iterations: options.max_iterations,
        residual_tolerance: options.residual_tolerance,
        gamma_tolerance: options.gamma_tolerance,
        u0,
        rho_sq: (options.rho_sq > 0.0).then_some(options.rho_sq),
        allow_mu_override: options.allow_mu_override,
        record_iterates: false,
    })
}

/// Run the iteration. `u0` may be null (zero initial guess); otherwise it
/// must hold the model-space dimension.
///
/// # Safety
/// Array lengths per the dimension accessors; `options` and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn irlw_solve(
    problem: *const IrlwProblem,
    options: *const IrlwSolverOptions,
    u0: *const f64,
    out: *mut *mut IrlwTrace,
) -> IrlwStatus {
    guard(|| {
        if problem.is_null() || options.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let problem = &unsafe { &*problem }.inner;
        let options = unsafe { &*options };
        let u0 = if u0.is_null() {
            None
        } else {
            Some(
                unsafe { std::slice::from_raw_parts(u0, problem.domain_space().dimension()) }
                    .to_vec(),
            )
        };
        let config = match build_solver_config(problem.as_ref(), options, u0) {
            Ok(config) => config,
            Err(err) => return status_of(&err),
        };
        match solve(problem.as_ref(), &config) {
            Ok(trace) => unsafe { write_handle(out, IrlwTrace { inner: trace }) },
            Err(err) => status_of(&err),
        }
    })
}

/// # Safety
/// `trace` must be a handle from `irlw_solve`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn irlw_trace_free(trace: *mut IrlwTrace) {
    if !trace.is_null() {
        drop(unsafe { Box::from_raw(trace) });
    }
}

/// Number of recorded iterations (rows). Null handles give 0.
///
/// # Safety
/// `trace` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn irlw_trace_len(trace: *const IrlwTrace) -> usize {
    if trace.is_null() {
        return 0;
    }
    unsafe { &*trace }.inner.rows.len()
}

/// Terminal status: 0 residual converged, 1 gamma converged,
/// 2 iteration cap, 3 left the ball, -1 for a null handle.
///
/// # Safety
/// `trace` must be live or null.
#[no_mangle]
pub unsafe extern "C" fn irlw_trace_status(trace: *const IrlwTrace) -> i32 {
    if trace.is_null() {
        return -1;
    }
    match unsafe { &*trace }.inner.status {
        TerminalStatus::ResidualConverged => 0,
        TerminalStatus::GammaConverged => 1,
        TerminalStatus::MaxIterations => 2,
        TerminalStatus::LeftBall => 3,
    }
}

/// Copy row `k` of the trace.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irlw_trace_row(
    trace: *const IrlwTrace,
    k: usize,
    out: *mut IrlwTraceRow,
) -> IrlwStatus {
    guard(|| {
        if trace.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let rows = &unsafe { &*trace }.inner.rows;
        let Some(row) = rows.get(k) else {
            return IrlwStatus::InvalidArgument;
        };
        unsafe {
            *out = IrlwTraceRow {
                k: row.k,
                beta: row.beta,
                gamma: row.gamma.unwrap_or(f64::NAN),
                residual: row.residual,
                err_norm: row.err_norm.unwrap_or(f64::NAN),
                in_ball: match row.in_ball {
                    Some(true) => 1,
                    Some(false) => 0,
                    None => -1,
                },
                alpha: row.alpha,
                bound_rhs: row.bound_rhs.unwrap_or(f64::NAN),
            };
        }
        IrlwStatus::Ok
    })
}

/// Minimum recursion-bound slack over the trace (needs the run's rate
/// constants; `IRLW_STATUS_UNAVAILABLE` otherwise).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irlw_trace_min_recursion_slack(
    trace: *const IrlwTrace,
    out: *mut f64,
) -> IrlwStatus {
    guard(|| {
        if trace.is_null() || out.is_null() {
            return IrlwStatus::NullPointer;
        }
        let trace = &unsafe { &*trace }.inner;
        let Some(rc) = &trace.rate_constants else {
            return IrlwStatus::Unavailable;
        };
        let result = if rc.eps == 0.0 {
            analysis::check_recursion_quadratic(trace, rc, None).map(|(r, _)| r)
        } else {
            analysis::check_recursion(trace, rc)
        };
        match result {
            Ok(check) => {
                unsafe { *out = check.min_slack };
                IrlwStatus::Ok
            }
            Err(err) => status_of(&err),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn diagonal_end_to_end() {
        unsafe {
            let sv = [1.0, 1.0];
            let mut problem: *mut IrlwProblem = ptr::null_mut();
            assert_eq!(
                irlw_problem_diagonal(sv.as_ptr(), 2, ptr::null(), &mut problem),
                IrlwStatus::Ok
            );
            assert_eq!(irlw_problem_dimension(problem), 2);
            assert_eq!(irlw_problem_range_dimension(problem), 2);

            let mut mu = 0.0;
            assert_eq!(irlw_admissible_mu(problem, &mut mu), IrlwStatus::Ok);
            assert!((mu - 0.5).abs() < 1e-12);

            let mut options = std::mem::MaybeUninit::<IrlwSolverOptions>::uninit();
            assert_eq!(
                irlw_solver_options_default(options.as_mut_ptr()),
                IrlwStatus::Ok
            );
            let mut options = options.assume_init();
            options.rho_sq = 0.125;

            let mut trace: *mut IrlwTrace = ptr::null_mut();
            assert_eq!(
                irlw_solve(problem, &options, ptr::null(), &mut trace),
                IrlwStatus::Ok
            );
            let len = irlw_trace_len(trace);
            assert!(len > 1);
            assert_eq!(irlw_trace_status(trace), 1);

            let mut row = std::mem::MaybeUninit::<IrlwTraceRow>::uninit();
            assert_eq!(
                irlw_trace_row(trace, len - 1, row.as_mut_ptr()),
                IrlwStatus::Ok
            );
            let row = row.assume_init();
            assert!(row.gamma <= 1e-9);
            assert_eq!(row.in_ball, 1);

            let mut slack = f64::NAN;
            assert_eq!(
                irlw_trace_min_recursion_slack(trace, &mut slack),
                IrlwStatus::Ok
            );
            assert!(slack >= -1e-12);

            irlw_trace_free(trace);
            irlw_problem_free(problem);
        }
    }

    #[test]
    fn null_arguments_are_rejected() {
        unsafe {
            let mut problem: *mut IrlwProblem = ptr::null_mut();
            assert_eq!(
                irlw_problem_diagonal(ptr::null(), 2, ptr::null(), &mut problem),
                IrlwStatus::NullPointer
            );
            assert_eq!(irlw_problem_dimension(ptr::null()), 0);
            assert_eq!(irlw_trace_status(ptr::null()), -1);
            irlw_problem_free(ptr::null_mut());
            irlw_trace_free(ptr::null_mut());
        }
    }

    #[test]
    fn invalid_constructor_arguments_map_to_codes() {
        unsafe {
            let sv = [1.0, -1.0];
            let mut problem: *mut IrlwProblem = ptr::null_mut();
            assert_eq!(
                irlw_problem_diagonal(sv.as_ptr(), 2, ptr::null(), &mut problem),
                IrlwStatus::InvalidArgument
            );
            let mut out = 0.0;
            assert_eq!(irlw_kappa_p(1.0, &mut out), IrlwStatus::InvalidArgument);
            assert_eq!(irlw_kappa_p(2.0, &mut out), IrlwStatus::Ok);
            assert!((out - 5.2088).abs() < 5e-4);

            // Disconnected graph.
            let endpoints = [0usize, 1, 2, 3];
            let sigma = [1.0, 1.0];
            assert_eq!(
                irlw_problem_resistor(2, 2, endpoints.as_ptr(), sigma.as_ptr(), 2, &mut problem),
                IrlwStatus::StructureError
            );
        }
    }

    #[test]
    fn config_text_constructor() {
        unsafe {
            let text = std::ffi::CString::new(
                "[problem]\nkind = monomial\ndimension = 2\nm = 1.5\n[solver]\nmu = auto\n",
            )
            .unwrap();
            let mut problem: *mut IrlwProblem = ptr::null_mut();
            assert_eq!(
                irlw_problem_from_config(text.as_ptr(), &mut problem),
                IrlwStatus::Ok
            );
            let mut consts = std::mem::MaybeUninit::<IrlwProblemConstants>::uninit();
            assert_eq!(
                irlw_problem_constants(problem, consts.as_mut_ptr()),
                IrlwStatus::Ok
            );
            let consts = consts.assume_init();
            assert!((consts.stability_eps - 1.0 / 3.0).abs() < 1e-12);
            irlw_problem_free(problem);

            let bad = std::ffi::CString::new("[problem]\nkind = widget\n").unwrap();
            assert_eq!(
                irlw_problem_from_config(bad.as_ptr(), &mut problem),
                IrlwStatus::ConfigError
            );
        }
    }

    #[test]
    fn apply_and_truth_round_trip() {
        unsafe {
            let endpoints = [0usize, 2, 2, 1];
            let sigma = [1.0, 1.0];
            let mut problem: *mut IrlwProblem = ptr::null_mut();
            assert_eq!(
                irlw_problem_resistor(2, 1, endpoints.as_ptr(), sigma.as_ptr(), 2, &mut problem),
                IrlwStatus::Ok
            );
            let mut truth = [0.0; 2];
            assert_eq!(
                irlw_problem_ground_truth(problem, truth.as_mut_ptr()),
                IrlwStatus::Ok
            );
            assert_eq!(truth, [1.0, 1.0]);
            let mut image = [0.0; 4];
            assert_eq!(
                irlw_problem_apply(problem, truth.as_ptr(), image.as_mut_ptr()),
                IrlwStatus::Ok
            );
            assert_eq!(image, [0.5, -0.5, -0.5, 0.5]);
            irlw_problem_free(problem);
        }
    }
}
