use std::ffi::{c_int, c_void, CStr};
use std::ptr;

use optgan_ffi::*;

fn small_config() -> OptganConfig {
    let mut c = unsafe {
        let mut c = std::mem::MaybeUninit::uninit();
        assert_eq!(optgan_config_default(c.as_mut_ptr()), OptganStatus::Ok);
        c.assume_init()
    };
    c.k0 = 20;
    c.m = 10;
    c.gan_iter = 3;
    c.pre_iter = 2;
    c.max_fes = 150;
    c
}

fn last_error() -> String {
    let p = optgan_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe extern "C" fn shifted_sphere(user: *mut c_void, x: *const f64, n: usize, out: *mut f64) -> c_int {
    let calls = &mut *(user as *mut u64);
    *calls += 1;
    *out = std::slice::from_raw_parts(x, n).iter().map(|v| (v - 0.5) * (v - 0.5)).sum();
    0
}

unsafe extern "C" fn refuses(_: *mut c_void, _: *const f64, _: usize, _: *mut f64) -> c_int {
    7
}

#[test]
fn problem_round_trip() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(optgan_problem_new(c"rastrigin".as_ptr(), 3, 2, -1, &mut p), OptganStatus::Ok);
        assert_eq!(optgan_problem_dim(p), 3);
        let mut f_star = 0.0;
        assert_eq!(optgan_problem_f_star(p, &mut f_star), OptganStatus::Ok);

        let native = optgan::benchmarks::make_problem(optgan::benchmarks::Kernel::Rastrigin, 3, 2).unwrap();
        assert_eq!(f_star, native.f_star);
        let x = [0.3, -1.2, 2.0];
        let mut v = 0.0;
        assert_eq!(optgan_problem_evaluate(p, x.as_ptr(), 3, &mut v), OptganStatus::Ok);
        let expected = native.evaluate(&x, &mut optgan::benchmarks::EvalCounter::new()).unwrap();
        assert_eq!(v, expected);

        assert_eq!(optgan_problem_evaluate(p, x.as_ptr(), 2, &mut v), OptganStatus::ShapeMismatch);
        assert!(last_error().contains("expected 3"));
        optgan_problem_free(p);
    }
}

#[test]
fn rejects_bad_arguments() {
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(optgan_problem_new(ptr::null(), 2, 0, -1, &mut p), OptganStatus::NullPointer);
        assert_eq!(optgan_problem_new(c"sphere".as_ptr(), 2, 0, 5, &mut p), OptganStatus::InvalidArgument);
        assert_eq!(optgan_problem_new(c"sphere".as_ptr(), 0, 0, -1, &mut p), OptganStatus::Unsupported);
        assert!(p.is_null());

        assert_eq!(optgan_problem_new(c"sphere".as_ptr(), 2, 0, -1, &mut p), OptganStatus::Ok);
        assert!(optgan_last_error().is_null());
        let mut config = small_config();
        config.max_fes = 10;
        let mut run = ptr::null_mut();
        assert_eq!(optgan_optimize_problem(p, &config, &mut run), OptganStatus::Config);
        assert!(run.is_null());
        optgan_problem_free(p);
        optgan_problem_free(ptr::null_mut());
        optgan_run_free(ptr::null_mut());
    }
}

#[test]
fn callback_run_counts_every_call() {
    unsafe {
        let mut calls = 0u64;
        let lower = [-2.0, -2.0];
        let upper = [2.0, 2.0];
        let config = small_config();
        let mut run = ptr::null_mut();
        let status = optgan_optimize_callback(
            Some(shifted_sphere),
            &mut calls as *mut u64 as *mut c_void,
            lower.as_ptr(),
            upper.as_ptr(),
            2,
            ptr::null(),
            &config,
            &mut run,
        );
        assert_eq!(status, OptganStatus::Ok);
        assert_eq!(optgan_run_fes(run), calls);
        assert_eq!(calls, 20 + 13 * 10);
        assert_eq!(optgan_run_dim(run), 2);

        let mut term = OptganTermination::Time;
        assert_eq!(optgan_run_termination(run, &mut term), OptganStatus::Ok);
        assert_eq!(term, OptganTermination::Budget);

        let n = optgan_run_trace_len(run);
        let mut fes = vec![0u64; n];
        let mut ind = vec![0f64; n];
        assert_eq!(optgan_run_trace(run, fes.as_mut_ptr(), ind.as_mut_ptr(), n - 1), OptganStatus::BufferTooSmall);
        assert_eq!(optgan_run_trace(run, fes.as_mut_ptr(), ind.as_mut_ptr(), n), OptganStatus::Ok);
        assert_eq!(*fes.last().unwrap(), calls);

        let mut best = [0.0; 2];
        let mut fitness = 0.0;
        assert_eq!(optgan_run_best(run, best.as_mut_ptr(), 2, &mut fitness), OptganStatus::Ok);
        assert_eq!(fitness, *ind.last().unwrap());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cb.trace");
        let c_path = std::ffi::CString::new(path.to_str().unwrap()).unwrap();
        assert_eq!(optgan_run_write_trace(run, c_path.as_ptr()), OptganStatus::Ok);
        let trace = optgan::harness::runtrace::RunTrace::read(&path).unwrap();
        assert_eq!(trace.header.fes_used, calls);
        assert_eq!(trace.records.len(), n);

        let mut counts = vec![0u64; 25];
        assert_eq!(optgan_run_heatmap(run, 5, 5, 1000, 1, counts.as_mut_ptr(), 25), OptganStatus::Ok);
        assert_eq!(counts.iter().sum::<u64>(), 1000);
        optgan_run_free(run);
    }
}

#[test]
fn failing_callback_aborts_the_run() {
    unsafe {
        let lower = [0.0];
        let upper = [1.0];
        let mut run = ptr::null_mut();
        let status = optgan_optimize_callback(
            Some(refuses),
            ptr::null_mut(),
            lower.as_ptr(),
            upper.as_ptr(),
            1,
            ptr::null(),
            &small_config(),
            &mut run,
        );
        assert_eq!(status, OptganStatus::Callback);
        assert!(last_error().contains('7'));
        assert!(run.is_null());
    }
}

#[test]
fn matches_native_optimizer() {
    unsafe {
        let config = small_config();
        let mut p = ptr::null_mut();
        assert_eq!(optgan_problem_new(c"ellipsoidal".as_ptr(), 2, 4, -1, &mut p), OptganStatus::Ok);
        let mut run = ptr::null_mut();
        assert_eq!(optgan_optimize_problem(p, &config, &mut run), OptganStatus::Ok);

        let native_config = optgan::OptGanConfig {
            k0: 20,
            m: 10,
            gan_iter: 3,
            pre_iter: 2,
            max_fes: 150,
            ..Default::default()
        };
        let problem = optgan::benchmarks::make_problem(optgan::benchmarks::Kernel::Ellipsoidal, 2, 4).unwrap();
        let native = optgan::optimize(&mut problem.instance(), &native_config, &mut optgan::seeded_rng(0)).unwrap();
        let mut best = [0.0; 2];
        let mut fitness = 0.0;
        assert_eq!(optgan_run_best(run, best.as_mut_ptr(), 2, &mut fitness), OptganStatus::Ok);
        assert_eq!(best.to_vec(), native.best.x);
        assert_eq!(fitness, native.best.fitness);
        optgan_run_free(run);
        optgan_problem_free(p);
    }
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(optgan_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
