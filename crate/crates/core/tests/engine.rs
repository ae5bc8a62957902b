use optgan::engine::{wasserstein_estimate, Ablation};
use optgan::trace::TerminationReason;
use optgan::{optimize, seeded_rng, Domain, Error, Objective, OptGanConfig, OptGanState, Result};

/// `sum (x_i - c_i)^2`, counting calls.
struct Bowl {
    domain: Domain,
    center: Vec<f64>,
    calls: u64,
    optimum: Option<f64>,
    nan_left_half: bool,
}

impl Bowl {
    fn new(dim: usize) -> Self {
        Self {
            domain: Domain::cube(dim, -5.0, 5.0).unwrap(),
            center: (0..dim).map(|i| 1.0 - 0.5 * i as f64).collect(),
            calls: 0,
            optimum: Some(0.0),
            nan_left_half: false,
        }
    }
}

impl Objective for Bowl {
    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.calls += 1;
        if self.nan_left_half && x[0] < 0.0 {
            return Ok(f64::NAN);
        }
        Ok(x.iter().zip(&self.center).map(|(a, c)| (a - c).powi(2)).sum())
    }

    fn evaluations(&self) -> u64 {
        self.calls
    }

    fn optimum_value(&self) -> Option<f64> {
        self.optimum
    }
}

fn small(max_fes: u64) -> OptGanConfig {
    OptGanConfig {
        k0: 20,
        m: 10,
        gan_iter: 5,
        d_iter: 2,
        pre_iter: 2,
        max_fes,
        ..OptGanConfig::default()
    }
}

#[test]
fn budget_and_trace_invariants() {
    let mut f = Bowl::new(2);
    let out = optimize(&mut f, &small(415), &mut seeded_rng(1)).unwrap();
    assert_eq!(out.termination, TerminationReason::Budget);
    assert_eq!(out.state.fes, f.calls);
    assert_eq!(f.calls, 20 + 39 * 10);
    assert_eq!(out.records.first().unwrap().fes, 20);
    assert_eq!(out.records.last().unwrap().fes, f.calls);
    assert!(out.records.windows(2).all(|w| w[0].fes < w[1].fes && w[1].indicator <= w[0].indicator));
    assert_eq!(out.diagnostics.len(), 39);
    assert_eq!(out.state.opt_set.capacity(), out.diagnostics.last().unwrap().k_t);
    let best = &out.best;
    assert!((f.evaluate(&best.x).unwrap() - best.fitness).abs() < 1e-15);
}

#[test]
fn same_seed_same_run() {
    let run = |seed| {
        let mut f = Bowl::new(3);
        optimize(&mut f, &small(200), &mut seeded_rng(seed)).unwrap()
    };
    let (a, b, c) = (run(5), run(5), run(6));
    assert_eq!(a.records, b.records);
    assert_eq!(a.diagnostics, b.diagnostics);
    assert_eq!(a.state.gen.params, b.state.gen.params);
    assert_ne!(a.records, c.records);
}

#[test]
fn precision_stops_the_run() {
    let mut f = Bowl::new(2);
    f.optimum = Some(1e6);
    let out = optimize(&mut f, &small(1000), &mut seeded_rng(0)).unwrap();
    assert_eq!(out.termination, TerminationReason::Precision);
    assert_eq!(f.calls, 20);
    assert!(out.records.last().unwrap().indicator < 0.0);
}

#[test]
fn unknown_optimum_reports_raw_fitness() {
    let mut f = Bowl::new(2);
    f.optimum = None;
    let out = optimize(&mut f, &small(100), &mut seeded_rng(0)).unwrap();
    assert_eq!(out.termination, TerminationReason::Budget);
    assert_eq!(out.records.last().unwrap().indicator, out.best.fitness);
}

#[test]
fn wall_clock_limit() {
    let mut f = Bowl::new(2);
    let config = OptGanConfig {
        max_fes: 1_000_000,
        time_limit_secs: Some(0.2),
        ..OptGanConfig::default()
    };
    let start = std::time::Instant::now();
    let out = optimize(&mut f, &config, &mut seeded_rng(0)).unwrap();
    assert_eq!(out.termination, TerminationReason::Time);
    assert!(start.elapsed().as_secs_f64() < 5.0);
    assert_eq!(out.state.fes, f.calls);
}

#[test]
fn nan_values_rank_last() {
    let mut f = Bowl::new(2);
    f.nan_left_half = true;
    let out = optimize(&mut f, &small(300), &mut seeded_rng(2)).unwrap();
    assert!(out.best.fitness.is_finite());
    assert!(out.best.x[0] >= 0.0);
    assert!(out.state.opt_set.members().iter().all(|m| !m.fitness.is_nan()));
}

#[test]
fn rejects_budget_below_initial_set() {
    let mut f = Bowl::new(2);
    let err = optimize(&mut f, &small(20), &mut seeded_rng(0)).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
    assert_eq!(f.calls, 0);
}

#[test]
fn ablations_run() {
    let variants = [
        Ablation { no_exploitation: true, ..Default::default() },
        Ablation { no_exploration: true, ..Default::default() },
        Ablation { no_shrinking: true, ..Default::default() },
        Ablation { no_pretraining: true, ..Default::default() },
    ];
    for ablation in variants {
        let mut f = Bowl::new(2);
        let config = OptGanConfig { ablation: ablation.clone(), ..small(200) };
        let out = optimize(&mut f, &config, &mut seeded_rng(0)).unwrap();
        assert_eq!(out.state.fes, f.calls);
        if ablation.no_shrinking {
            assert_eq!(out.state.opt_set.capacity(), 20);
        }
    }
}

#[test]
fn generator_samples_stay_inside_the_box() {
    let domain = Domain::new(vec![-1.0, 10.0, -100.0], vec![1.0, 10.5, 100.0]).unwrap();
    let config = small(1000);
    let mut rng = seeded_rng(4);
    let mut state = OptGanState::new(&domain, &config, &mut rng).unwrap();
    state.pretrain_generator(&config, &mut rng).unwrap();
    let samples = state.sample_generator(5000, &mut rng).unwrap();
    assert!(samples.iter().all(|x| domain.contains(x) && x.iter().zip(domain.lower()).all(|(v, lo)| v > lo)));
    assert_eq!(state.fes, 0);
}

#[test]
fn wasserstein_of_identical_batches_is_zero() {
    let domain = Domain::cube(2, -5.0, 5.0).unwrap();
    let mut rng = seeded_rng(0);
    let state = OptGanState::new(&domain, &OptGanConfig::default(), &mut rng).unwrap();
    let batch = domain.sample_batch(30, &mut rng);
    assert_eq!(wasserstein_estimate(&state.d_i.params, &batch, &batch).unwrap(), 0.0);
}
