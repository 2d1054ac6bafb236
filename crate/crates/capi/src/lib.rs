//! C ABI for the simulator: opaque run handles, integer error codes and
//! accessor functions. The header `include/gyqec.h` is generated by
//! cbindgen at build time.
//!
//! Usage from C:
//!
//! ```c
//! GyqecRun *run = gyqec_run_new(9, 5);
//! gyqec_run_set_mode(run, GYQEC_MODE_STATIC, 0.002);
//! gyqec_run_set_relabeling(run, 10, 0);
//! gyqec_run_set_seed(run, 42);
//! if (gyqec_run_execute(run) == GYQEC_OK) {
//!     size_t n = gyqec_run_len(run);
//!     double peak;
//!     gyqec_run_w_g(run, n - 1, &peak);
//! }
//! gyqec_run_free(run);
//! ```

use gyqec_core::harness::ExperimentConfig;
use gyqec_core::imperfections::{DisorderRealization, ErrorModel};
use gyqec_core::observables::ObservableSeries;
use gyqec_core::{
    compile_grover_iteration, derive_seed, epsilon_c, ideal_t_g, run as core_run, GyqecConfig,
    RunOptions,
};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::os::raw::c_int;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum GyqecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ExecutionFailed = 3,
    OutOfRange = 4,
    NotExecuted = 5,
}

/// Simulation mode selectors mirroring the harness modes.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum GyqecMode {
    Ideal = 0,
    Static = 1,
    Fluctuating = 2,
    GateNoise = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let sanitized = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap());
}

/// Message describing the most recent error on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gyqec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Opaque run handle: configuration plus, after execution, the recorded
/// observable series.
pub struct GyqecRun {
    n_q: usize,
    target: usize,
    iterations: Option<usize>,
    mode: GyqecMode,
    epsilon: f64,
    l_g: Option<usize>,
    swaps_per_event: Option<usize>,
    seed: u64,
    series: Option<ObservableSeries>,
}

/// Allocate a run for an `n_q`-qubit register searching for `target`.
/// Returns null on invalid arguments.
#[no_mangle]
pub extern "C" fn gyqec_run_new(n_q: usize, target: usize) -> *mut GyqecRun {
    if !(2..=20).contains(&n_q) || target >= 1usize << n_q {
        set_error("n_q must be in 2..=20 and target below 2^n_q");
        return std::ptr::null_mut();
    }
    Box::into_raw(Box::new(GyqecRun {
        n_q,
        target,
        iterations: None,
        mode: GyqecMode::Ideal,
        epsilon: 0.0,
        l_g: None,
        swaps_per_event: None,
        seed: 0,
        series: None,
    }))
}

/// # Safety
/// `run` must be a pointer from `gyqec_run_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_free(run: *mut GyqecRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

unsafe fn borrow_mut<'a>(run: *mut GyqecRun) -> Option<&'a mut GyqecRun> {
    run.as_mut()
}

/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_set_iterations(run: *mut GyqecRun, iterations: usize) -> c_int {
    let Some(run) = borrow_mut(run) else {
        set_error("null run handle");
        return GyqecStatus::NullPointer as c_int;
    };
    if iterations == 0 {
        set_error("iterations must be >= 1");
        return GyqecStatus::InvalidArgument as c_int;
    }
    run.iterations = Some(iterations);
    GyqecStatus::Ok as c_int
}

/// Select the error model and its strength.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_set_mode(
    run: *mut GyqecRun,
    mode: GyqecMode,
    epsilon: f64,
) -> c_int {
    let Some(run) = borrow_mut(run) else {
        set_error("null run handle");
        return GyqecStatus::NullPointer as c_int;
    };
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        set_error("epsilon must be finite and >= 0");
        return GyqecStatus::InvalidArgument as c_int;
    }
    run.mode = mode;
    run.epsilon = epsilon;
    GyqecStatus::Ok as c_int
}

/// Enable relabeling every `l_g` gates; `swaps_per_event = 0` selects the
/// default `n_tot / 2`.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_set_relabeling(
    run: *mut GyqecRun,
    l_g: usize,
    swaps_per_event: usize,
) -> c_int {
    let Some(run) = borrow_mut(run) else {
        set_error("null run handle");
        return GyqecStatus::NullPointer as c_int;
    };
    if l_g == 0 {
        set_error("l_g must be >= 1");
        return GyqecStatus::InvalidArgument as c_int;
    }
    run.l_g = Some(l_g);
    run.swaps_per_event = (swaps_per_event > 0).then_some(swaps_per_event);
    GyqecStatus::Ok as c_int
}

/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_set_seed(run: *mut GyqecRun, seed: u64) -> c_int {
    let Some(run) = borrow_mut(run) else {
        set_error("null run handle");
        return GyqecStatus::NullPointer as c_int;
    };
    run.seed = seed;
    GyqecStatus::Ok as c_int
}

/// Execute the configured run, recording one observable point per
/// iteration.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_execute(run: *mut GyqecRun) -> c_int {
    let Some(run) = borrow_mut(run) else {
        set_error("null run handle");
        return GyqecStatus::NullPointer as c_int;
    };
    match execute(run) {
        Ok(series) => {
            run.series = Some(series);
            GyqecStatus::Ok as c_int
        }
        Err(e) => {
            set_error(&e.to_string());
            GyqecStatus::ExecutionFailed as c_int
        }
    }
}

fn execute(run: &GyqecRun) -> gyqec_core::Result<ObservableSeries> {
    let program = compile_grover_iteration(run.n_q, run.target)?;
    let n_tot = run.n_q + 1;
    let topology = ExperimentConfig::default().topology;
    let model = match run.mode {
        GyqecMode::Ideal => ErrorModel::None,
        GyqecMode::Static => ErrorModel::Static(DisorderRealization::sample_with_topology(
            n_tot,
            run.epsilon,
            derive_seed(run.seed, 0, 1),
            topology,
        )?),
        GyqecMode::Fluctuating => ErrorModel::fluctuating(n_tot, run.epsilon, topology),
        GyqecMode::GateNoise => ErrorModel::GateAngleNoise { epsilon: run.epsilon },
    };
    let gyqec = match run.l_g {
        Some(l_g) => GyqecConfig {
            enabled: true,
            l_g,
            swaps_per_event: run.swaps_per_event.unwrap_or((n_tot / 2).max(1)),
            slice_after_swaps: true,
        },
        None => GyqecConfig::disabled(),
    };
    let iterations = run.iterations.unwrap_or(3 * ideal_t_g(run.n_q));
    let options = RunOptions::new(iterations, gyqec, model, derive_seed(run.seed, 0, 16));
    core_run(&program, &options).map(|out| out.series)
}

/// Number of recorded points (0 before execution).
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_len(run: *const GyqecRun) -> usize {
    run.as_ref()
        .and_then(|r| r.series.as_ref())
        .map_or(0, |s| s.points.len())
}

/// Gate count of the compiled iteration.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_gate_count(run: *const GyqecRun) -> usize {
    match run.as_ref() {
        Some(r) => match &r.series {
            Some(s) => s.meta.n_g,
            None => compile_grover_iteration(r.n_q, r.target).map(|p| p.n_g()).unwrap_or(0),
        },
        None => 0,
    }
}

unsafe fn read_point(
    run: *const GyqecRun,
    index: usize,
    out: *mut f64,
    f: impl Fn(&gyqec_core::ObservablePoint) -> f64,
) -> c_int {
    let Some(run) = run.as_ref() else {
        set_error("null run handle");
        return GyqecStatus::NullPointer as c_int;
    };
    if out.is_null() {
        set_error("null output pointer");
        return GyqecStatus::NullPointer as c_int;
    }
    let Some(series) = run.series.as_ref() else {
        set_error("run not executed");
        return GyqecStatus::NotExecuted as c_int;
    };
    let Some(point) = series.points.get(index) else {
        set_error("index out of range");
        return GyqecStatus::OutOfRange as c_int;
    };
    *out = f(point);
    GyqecStatus::Ok as c_int
}

/// Searched-state probability at point `index`.
///
/// # Safety
/// `run` must be a live handle; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_w_g(run: *const GyqecRun, index: usize, out: *mut f64) -> c_int {
    read_point(run, index, out, |p| p.w_g)
}

/// Four-state probability at point `index`.
///
/// # Safety
/// `run` must be a live handle; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_w_4(run: *const GyqecRun, index: usize, out: *mut f64) -> c_int {
    read_point(run, index, out, |p| p.w_4)
}

/// Fidelity against the ideal run at point `index`.
///
/// # Safety
/// `run` must be a live handle; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_fidelity(
    run: *const GyqecRun,
    index: usize,
    out: *mut f64,
) -> c_int {
    read_point(run, index, out, |p| p.fidelity)
}

/// Norm drift at point `index`.
///
/// # Safety
/// `run` must be a live handle; `out` must point to a writable f64.
#[no_mangle]
pub unsafe extern "C" fn gyqec_run_norm_error(
    run: *const GyqecRun,
    index: usize,
    out: *mut f64,
) -> c_int {
    read_point(run, index, out, |p| p.norm_error)
}

/// Chaos border estimate `1.7 / (n_g sqrt(n_tot))`.
#[no_mangle]
pub extern "C" fn gyqec_epsilon_c(n_g: usize, n_tot: usize) -> f64 {
    epsilon_c(n_g, n_tot)
}

/// Optimal iteration count for an `n_q`-qubit register.
#[no_mangle]
pub extern "C" fn gyqec_ideal_t_g(n_q: usize) -> usize {
    if n_q < 2 {
        return 0;
    }
    ideal_t_g(n_q)
}

/// Crate version as a static C string.
#[no_mangle]
pub extern "C" fn gyqec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
