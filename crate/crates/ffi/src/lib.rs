//! C ABI for `optgan`.
//!
//! Every fallible function returns an [`OptganStatus`]; on failure a message is
//! available from [`optgan_last_error`] on the same thread. Problems and runs
//! are opaque handles owned by the caller and released with their `_free`
//! functions. Output buffers are caller-allocated; their lengths are passed in
//! and checked.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use optgan::benchmarks::{make_problem_with, BenchmarkProblem, Kernel};
use optgan::harness::heatmap::export_generator_heatmap;
use optgan::harness::runtrace::{ProblemDescriptor, RunTrace};
use optgan::trace::TerminationReason;
use optgan::{optimize, seeded_rng, Domain, Error, Objective, OptGanConfig, OptGanOutcome};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptganStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ShapeMismatch = 3,
    Config = 4,
    Unsupported = 5,
    NonFinite = 6,
    Io = 7,
    /// The objective callback returned a non-zero code.
    Callback = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptganTermination {
    Precision = 0,
    Budget = 1,
    Time = 2,
}

/// Run settings. Obtain defaults from [`optgan_config_default`] and adjust.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct OptganConfig {
    pub k0: usize,
    pub m: usize,
    pub a: f64,
    pub lambda: f64,
    pub gan_iter: usize,
    pub d_iter: usize,
    pub pre_iter: usize,
    pub beta: f64,
    pub s: usize,
    pub hidden: usize,
    pub lr_g: f64,
    pub lr_d: f64,
    pub max_fes: u64,
    pub prec: f64,
    /// Wall-clock limit in seconds; zero or negative disables it.
    pub time_limit_secs: f64,
    pub seed: u64,
}

impl From<&OptGanConfig> for OptganConfig {
    fn from(c: &OptGanConfig) -> Self {
        Self {
            k0: c.k0,
            m: c.m,
            a: c.a,
            lambda: c.lambda,
            gan_iter: c.gan_iter,
            d_iter: c.d_iter,
            pre_iter: c.pre_iter,
            beta: c.beta,
            s: c.s,
            hidden: c.hidden,
            lr_g: c.lr_g,
            lr_d: c.lr_d,
            max_fes: c.max_fes,
            prec: c.prec,
            time_limit_secs: c.time_limit_secs.unwrap_or(0.0),
            seed: c.seed,
        }
    }
}

impl OptganConfig {
    fn to_native(self) -> OptGanConfig {
        OptGanConfig {
            k0: self.k0,
            m: self.m,
            a: self.a,
            lambda: self.lambda,
            gan_iter: self.gan_iter,
            d_iter: self.d_iter,
            pre_iter: self.pre_iter,
            beta: self.beta,
            s: self.s,
            hidden: self.hidden,
            lr_g: self.lr_g,
            lr_d: self.lr_d,
            max_fes: self.max_fes,
            prec: self.prec,
            time_limit_secs: (self.time_limit_secs > 0.0).then_some(self.time_limit_secs),
            seed: self.seed,
            ..OptGanConfig::default()
        }
    }
}

/// Objective callback: writes `f(x)` to `*out` and returns 0, or returns a
/// non-zero code to abort the run.
pub type OptganObjectiveFn =
    Option<unsafe extern "C" fn(user_data: *mut c_void, x: *const f64, n: usize, out: *mut f64) -> c_int>;

/// Opaque benchmark problem.
pub struct OptganProblem {
    inner: BenchmarkProblem,
}

/// Opaque result of one optimization run.
pub struct OptganRun {
    outcome: OptGanOutcome,
    trace: RunTrace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: OptganStatus, msg: impl Into<String>) -> OptganStatus {
    set_error(msg);
    status
}

fn from_error(err: &Error) -> OptganStatus {
    let status = match err {
        Error::InvalidArgument(_) => OptganStatus::InvalidArgument,
        Error::ShapeMismatch { .. } | Error::EmptyBatch(_) => OptganStatus::ShapeMismatch,
        Error::NonFinite(_) => OptganStatus::NonFinite,
        Error::Unsupported(_) => OptganStatus::Unsupported,
        Error::Config(_) => OptganStatus::Config,
        Error::TraceFormat(_) | Error::Io(_) | Error::Json(_) => OptganStatus::Io,
    };
    fail(status, err.to_string())
}

fn guard(f: impl FnOnce() -> OptganStatus) -> OptganStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(OptganStatus::Panic, "internal panic"))
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(OptganStatus::NullPointer, concat!(stringify!($p), " is null"));
        })+
    };
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return from_error(&err),
        }
    };
}

/// Message describing the last failure on this thread, or null. Valid until
/// the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn optgan_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn optgan_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn optgan_config_default(out: *mut OptganConfig) -> OptganStatus {
    guard(|| {
        non_null!(out);
        *out = OptganConfig::from(&OptGanConfig::default());
        OptganStatus::Ok
    })
}

/// Creates a benchmark instance. `kernel` is a name such as `"rastrigin"`;
/// `rotated` is 1, 0, or -1 for the kernel's default.
///
/// # Safety
/// `kernel` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn optgan_problem_new(
    kernel: *const c_char,
    dim: usize,
    instance_seed: u64,
    rotated: c_int,
    out: *mut *mut OptganProblem,
) -> OptganStatus {
    guard(|| {
        non_null!(kernel, out);
        let Ok(name) = CStr::from_ptr(kernel).to_str() else {
            return fail(OptganStatus::InvalidArgument, "kernel name is not UTF-8");
        };
        let kernel: Kernel = try_status!(name.parse());
        let rotated = match rotated {
            0 => false,
            1 => true,
            -1 => kernel.rotated_by_default(),
            other => return fail(OptganStatus::InvalidArgument, format!("rotated must be -1, 0 or 1, got {other}")),
        };
        let inner = try_status!(make_problem_with(kernel, dim, instance_seed, rotated));
        *out = Box::into_raw(Box::new(OptganProblem { inner }));
        OptganStatus::Ok
    })
}

/// # Safety
/// `problem` must come from [`optgan_problem_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn optgan_problem_free(problem: *mut OptganProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Dimension of `problem`, or 0 if it is null.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn optgan_problem_dim(problem: *const OptganProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.inner.dim)
}

/// # Safety
/// `problem` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn optgan_problem_f_star(problem: *const OptganProblem, out: *mut f64) -> OptganStatus {
    guard(|| {
        non_null!(problem, out);
        *out = (*problem).inner.f_star;
        OptganStatus::Ok
    })
}

/// # Safety
/// `problem` must be a live handle, `x` must point to `len` doubles and `out`
/// must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn optgan_problem_evaluate(
    problem: *const OptganProblem,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> OptganStatus {
    guard(|| {
        non_null!(problem, x, out);
        let x = std::slice::from_raw_parts(x, len);
        let mut counter = optgan::benchmarks::EvalCounter::new();
        *out = try_status!((*problem).inner.evaluate(x, &mut counter));
        OptganStatus::Ok
    })
}

/// Optimizes a benchmark problem. The RNG is seeded from `config->seed`.
///
/// # Safety
/// `problem` must be a live handle, `config` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn optgan_optimize_problem(
    problem: *const OptganProblem,
    config: *const OptganConfig,
    out: *mut *mut OptganRun,
) -> OptganStatus {
    guard(|| {
        non_null!(problem, config, out);
        let problem = &(*problem).inner;
        let config = (*config).to_native();
        let mut instance = problem.instance();
        let outcome = try_status!(optimize(&mut instance, &config, &mut seeded_rng(config.seed)));
        let trace = RunTrace::from_optgan(ProblemDescriptor::from_problem(problem), &config, &outcome);
        *out = Box::into_raw(Box::new(OptganRun { outcome, trace }));
        OptganStatus::Ok
    })
}

struct CallbackObjective {
    f: unsafe extern "C" fn(*mut c_void, *const f64, usize, *mut f64) -> c_int,
    user_data: *mut c_void,
    domain: Domain,
    optimum: Option<f64>,
    calls: u64,
    failed: Option<c_int>,
}

impl Objective for CallbackObjective {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn evaluate(&mut self, x: &[f64]) -> optgan::Result<f64> {
        self.calls += 1;
        let mut value = f64::NAN;
        let code = unsafe { (self.f)(self.user_data, x.as_ptr(), x.len(), &mut value) };
        if code != 0 {
            self.failed = Some(code);
            return Err(Error::InvalidArgument(format!("objective callback returned {code}")));
        }
        Ok(value)
    }

    fn evaluations(&self) -> u64 {
        self.calls
    }

    fn optimum_value(&self) -> Option<f64> {
        self.optimum
    }
}

/// Optimizes a caller-supplied function over the box `[lower, upper]` of
/// dimension `n`. `f_star` may be null when the optimal value is unknown.
///
/// # Safety
/// `lower` and `upper` must point to `n` doubles, `f_star` must be null or
/// readable, `config` readable and `out` writable. `f` is called synchronously
/// on this thread with `user_data`.
#[no_mangle]
pub unsafe extern "C" fn optgan_optimize_callback(
    f: OptganObjectiveFn,
    user_data: *mut c_void,
    lower: *const f64,
    upper: *const f64,
    n: usize,
    f_star: *const f64,
    config: *const OptganConfig,
    out: *mut *mut OptganRun,
) -> OptganStatus {
    guard(|| {
        non_null!(lower, upper, config, out);
        let Some(f) = f else {
            return fail(OptganStatus::NullPointer, "f is null");
        };
        let domain = try_status!(Domain::new(
            std::slice::from_raw_parts(lower, n).to_vec(),
            std::slice::from_raw_parts(upper, n).to_vec(),
        ));
        let optimum = f_star.as_ref().copied();
        let config = (*config).to_native();
        let mut objective = CallbackObjective {
            f,
            user_data,
            domain,
            optimum,
            calls: 0,
            failed: None,
        };
        let result = optimize(&mut objective, &config, &mut seeded_rng(config.seed));
        if let Some(code) = objective.failed {
            return fail(OptganStatus::Callback, format!("objective callback returned {code}"));
        }
        let outcome = try_status!(result);
        let trace = RunTrace::from_optgan(ProblemDescriptor::custom("callback", n, optimum), &config, &outcome);
        *out = Box::into_raw(Box::new(OptganRun { outcome, trace }));
        OptganStatus::Ok
    })
}

/// # Safety
/// `run` must come from an optimize call and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn optgan_run_free(run: *mut OptganRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Dimension of the solutions in `run`, or 0 if it is null.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn optgan_run_dim(run: *const OptganRun) -> usize {
    run.as_ref().map_or(0, |r| r.outcome.best.x.len())
}

/// Function evaluations used, or 0 if `run` is null.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn optgan_run_fes(run: *const OptganRun) -> u64 {
    run.as_ref().map_or(0, |r| r.outcome.state.fes)
}

/// # Safety
/// `run` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn optgan_run_termination(run: *const OptganRun, out: *mut OptganTermination) -> OptganStatus {
    guard(|| {
        non_null!(run, out);
        *out = match (*run).outcome.termination {
            TerminationReason::Precision => OptganTermination::Precision,
            TerminationReason::Budget => OptganTermination::Budget,
            TerminationReason::Time => OptganTermination::Time,
        };
        OptganStatus::Ok
    })
}

/// Copies the best solution into `x` (capacity `len`, at least the run's
/// dimension) and its value into `fitness`.
///
/// # Safety
/// `run` must be a live handle, `x` writable for `len` doubles and `fitness`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn optgan_run_best(
    run: *const OptganRun,
    x: *mut f64,
    len: usize,
    fitness: *mut f64,
) -> OptganStatus {
    guard(|| {
        non_null!(run, x, fitness);
        let best = &(*run).outcome.best;
        if len < best.x.len() {
            return fail(
                OptganStatus::BufferTooSmall,
                format!("need {} doubles, got {len}", best.x.len()),
            );
        }
        std::slice::from_raw_parts_mut(x, best.x.len()).copy_from_slice(&best.x);
        *fitness = best.fitness;
        OptganStatus::Ok
    })
}

/// Number of `(fes, indicator)` records in the run's trace.
///
/// # Safety
/// `run` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn optgan_run_trace_len(run: *const OptganRun) -> usize {
    run.as_ref().map_or(0, |r| r.trace.records.len())
}

/// Copies the trace into two parallel arrays of capacity `len`.
///
/// # Safety
/// `run` must be a live handle; `fes` and `indicator` writable for `len`
/// elements.
#[no_mangle]
pub unsafe extern "C" fn optgan_run_trace(
    run: *const OptganRun,
    fes: *mut u64,
    indicator: *mut f64,
    len: usize,
) -> OptganStatus {
    guard(|| {
        non_null!(run, fes, indicator);
        let records = &(*run).trace.records;
        if len < records.len() {
            return fail(
                OptganStatus::BufferTooSmall,
                format!("need {} records, got {len}", records.len()),
            );
        }
        let fes = std::slice::from_raw_parts_mut(fes, records.len());
        let indicator = std::slice::from_raw_parts_mut(indicator, records.len());
        for (i, r) in records.iter().enumerate() {
            fes[i] = r.fes;
            indicator[i] = r.indicator;
        }
        OptganStatus::Ok
    })
}

/// Writes the run trace file (same format as the `optgan` binary).
///
/// # Safety
/// `run` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn optgan_run_write_trace(run: *const OptganRun, path: *const c_char) -> OptganStatus {
    guard(|| {
        non_null!(run, path);
        let Ok(path) = CStr::from_ptr(path).to_str() else {
            return fail(OptganStatus::InvalidArgument, "path is not UTF-8");
        };
        try_status!((*run).trace.write(Path::new(path)));
        OptganStatus::Ok
    })
}

/// Bins `samples` draws of the trained generator of a 2-D run into a
/// `gx * gy` grid written row-major (rows along y) into `counts`.
///
/// # Safety
/// `run` must be a live handle and `counts` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn optgan_run_heatmap(
    run: *const OptganRun,
    gx: usize,
    gy: usize,
    samples: u64,
    seed: u64,
    counts: *mut u64,
    len: usize,
) -> OptganStatus {
    guard(|| {
        non_null!(run, counts);
        let Some(cells) = gx.checked_mul(gy) else {
            return fail(OptganStatus::InvalidArgument, "grid too large");
        };
        if len < cells {
            return fail(OptganStatus::BufferTooSmall, format!("need {cells} cells, got {len}"));
        }
        let state = &(*run).outcome.state;
        let grid = try_status!(export_generator_heatmap(
            &state.gen.params,
            &state.domain,
            (gx, gy),
            samples,
            &mut seeded_rng(seed),
        ));
        let out = std::slice::from_raw_parts_mut(counts, cells);
        for iy in 0..gy {
            for ix in 0..gx {
                out[iy * gx + ix] = grid.count(ix, iy);
            }
        }
        OptganStatus::Ok
    })
}
