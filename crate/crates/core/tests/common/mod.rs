//! Independent oracles shared by the integration and acceptance tests. The
//! network math here is written from the raw parameter layout and never calls
//! the library's forward or gradient code.

#![allow(dead_code)]

use optgan::nn::{
    critic_loss_param_grad, generator_loss_param_grad, gp_penalty_param_grad, GradBundle, MlpParams, OutputActivation,
};
use optgan::knowledge::ScoredSolution;
use optgan::trace::TraceRecord;
use optgan::{seeded_rng, Domain};
use rand::Rng;

fn leaky(z: f64, slope: f64) -> f64 {
    if z >= 0.0 {
        z
    } else {
        slope * z
    }
}

fn leaky_d(z: f64, slope: f64) -> f64 {
    if z >= 0.0 {
        1.0
    } else {
        slope
    }
}

fn hidden_pre(p: &MlpParams, x: &[f64]) -> Vec<f64> {
    (0..p.hidden_dim)
        .map(|j| p.b1[j] + (0..p.in_dim).map(|k| p.w1[j * p.in_dim + k] * x[k]).sum::<f64>())
        .collect()
}

fn raw_out(p: &MlpParams, x: &[f64]) -> Vec<f64> {
    let z = hidden_pre(p, x);
    (0..p.out_dim)
        .map(|o| {
            p.b2[o]
                + (0..p.hidden_dim)
                    .map(|j| p.w2[o * p.hidden_dim + j] * leaky(z[j], p.hidden_slope))
                    .sum::<f64>()
        })
        .collect()
}

pub fn forward(p: &MlpParams, x: &[f64]) -> Vec<f64> {
    let o = raw_out(p, x);
    match &p.output {
        OutputActivation::Linear => o,
        OutputActivation::ScaledTanh { domain } => o
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let (lo, hi) = (domain.lower()[k], domain.upper()[k]);
                0.5 * (lo + hi) + 0.5 * (hi - lo) * v.tanh()
            })
            .collect(),
    }
}

pub fn critic(p: &MlpParams, x: &[f64]) -> f64 {
    raw_out(p, x)[0]
}

pub fn critic_input_grad(p: &MlpParams, x: &[f64]) -> Vec<f64> {
    let z = hidden_pre(p, x);
    (0..p.in_dim)
        .map(|k| {
            (0..p.hidden_dim)
                .map(|j| p.w2[j] * leaky_d(z[j], p.hidden_slope) * p.w1[j * p.in_dim + k])
                .sum()
        })
        .collect()
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    s / n as f64
}

pub fn critic_loss(p: &MlpParams, pos: &[Vec<f64>], neg: &[Vec<f64>]) -> f64 {
    mean(neg.iter().map(|x| critic(p, x))) - mean(pos.iter().map(|x| critic(p, x)))
}

pub fn gp_loss(p: &MlpParams, x_hat: &[Vec<f64>], beta: f64) -> f64 {
    beta * mean(x_hat.iter().map(|x| {
        let g = critic_input_grad(p, x);
        (g.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).powi(2)
    }))
}

pub fn generator_loss(gen: &MlpParams, d_i: &MlpParams, d_r: &MlpParams, noise: &[Vec<f64>], lambda: f64) -> f64 {
    let w_i = 1.0 / (1.0 + lambda);
    let w_r = lambda / (1.0 + lambda);
    -mean(noise.iter().map(|eta| {
        let x = forward(gen, eta);
        w_i * critic(d_i, &x) + w_r * critic(d_r, &x)
    }))
}

fn signs(p: &MlpParams, x: &[f64]) -> Vec<bool> {
    hidden_pre(p, x).into_iter().map(|z| z >= 0.0).collect()
}

fn len_of(p: &MlpParams) -> usize {
    p.w1.len() + p.b1.len() + p.w2.len() + p.b2.len()
}

fn slot(p: &mut MlpParams, mut i: usize) -> &mut f64 {
    for v in [&mut p.w1, &mut p.b1, &mut p.w2, &mut p.b2] {
        if i < v.len() {
            return &mut v[i];
        }
        i -= v.len();
    }
    unreachable!()
}

fn grad_at(g: &GradBundle, i: usize) -> f64 {
    *g.iter().nth(i).unwrap()
}

#[derive(Debug, Default, Clone, Copy)]
pub struct FdStats {
    pub max_rel: f64,
    pub checked: usize,
    pub skipped: usize,
}

impl FdStats {
    fn merge(&mut self, other: FdStats) {
        self.max_rel = self.max_rel.max(other.max_rel);
        self.checked += other.checked;
        self.skipped += other.skipped;
    }
}

/// Relative error with an absolute floor for near-zero gradients.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-5)
}

/// Central differences of `loss` against `analytic`. Coordinates whose
/// perturbation flips any hidden-unit sign reported by `pattern` are skipped.
pub fn fd_check(
    params: &MlpParams,
    analytic: &GradBundle,
    loss: impl Fn(&MlpParams) -> f64,
    pattern: impl Fn(&MlpParams) -> Vec<bool>,
    h: f64,
) -> FdStats {
    let base = pattern(params);
    let mut stats = FdStats::default();
    for i in 0..len_of(params) {
        let mut plus = params.clone();
        *slot(&mut plus, i) += h;
        let mut minus = params.clone();
        *slot(&mut minus, i) -= h;
        if pattern(&plus) != base || pattern(&minus) != base {
            stats.skipped += 1;
            continue;
        }
        let fd = (loss(&plus) - loss(&minus)) / (2.0 * h);
        stats.max_rel = stats.max_rel.max(rel_err(grad_at(analytic, i), fd));
        stats.checked += 1;
    }
    stats
}

pub fn random_net<R: Rng>(in_dim: usize, hidden: usize, out_dim: usize, rng: &mut R) -> MlpParams {
    let mut p = MlpParams::zeros(in_dim, hidden, out_dim).unwrap();
    for v in p.w1.iter_mut().chain(p.w2.iter_mut()) {
        *v = rng.random_range(-1.0..1.0);
    }
    for v in p.b1.iter_mut().chain(p.b2.iter_mut()) {
        *v = rng.random_range(-0.5..0.5);
    }
    let slope = if rng.random_bool(0.5) { 0.01 } else { 0.2 };
    p.with_slope(slope).unwrap()
}

fn batch<R: Rng>(count: usize, dim: usize, scale: f64, rng: &mut R) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(-scale..scale)).collect())
        .collect()
}

#[derive(Debug, Default, Clone, Copy)]
pub struct GradientSweep {
    pub first_order: FdStats,
    pub second_order: FdStats,
}

/// Checks critic, generator and gradient-penalty gradients on `nets` random
/// small networks.
pub fn gradient_sweep(nets: usize, seed: u64) -> GradientSweep {
    let mut rng = seeded_rng(seed);
    let mut sweep = GradientSweep::default();
    let h = 1e-5;
    for _ in 0..nets {
        let n = rng.random_range(1..=3);
        let hidden = rng.random_range(2..=6);
        let s = rng.random_range(1..=4);

        let d = random_net(n, hidden, 1, &mut rng);
        let pos = batch(s, n, 2.0, &mut rng);
        let neg = batch(s, n, 2.0, &mut rng);
        let (_, g) = critic_loss_param_grad(&d, &pos, &neg).unwrap();
        let pattern = |p: &MlpParams| pos.iter().chain(&neg).flat_map(|x| signs(p, x)).collect::<Vec<_>>();
        sweep
            .first_order
            .merge(fd_check(&d, &g, |p| critic_loss(p, &pos, &neg), pattern, h));

        let beta = rng.random_range(0.05..2.0);
        let (_, g) = gp_penalty_param_grad(&d, &pos, beta).unwrap();
        let pattern = |p: &MlpParams| pos.iter().flat_map(|x| signs(p, x)).collect::<Vec<_>>();
        sweep
            .second_order
            .merge(fd_check(&d, &g, |p| gp_loss(p, &pos, beta), pattern, h));

        let domain = Domain::cube(n, -5.0, 5.0).unwrap();
        let gen = random_net(2 * n, hidden, n, &mut rng)
            .with_output(OutputActivation::ScaledTanh { domain })
            .unwrap();
        let d_i = random_net(n, rng.random_range(2..=6), 1, &mut rng);
        let d_r = random_net(n, rng.random_range(2..=6), 1, &mut rng);
        let noise = batch(s, 2 * n, 1.0, &mut rng);
        let lambda = rng.random_range(0.0..3.0);
        let (_, g) = generator_loss_param_grad(&gen, &d_i, &d_r, &noise, lambda).unwrap();
        let pattern = |p: &MlpParams| {
            noise
                .iter()
                .flat_map(|eta| {
                    let x = forward(p, eta);
                    let mut v = signs(p, eta);
                    v.extend(signs(&d_i, &x));
                    v.extend(signs(&d_r, &x));
                    v
                })
                .collect::<Vec<_>>()
        };
        sweep.first_order.merge(fd_check(
            &gen,
            &g,
            |p| generator_loss(p, &d_i, &d_r, &noise, lambda),
            pattern,
            h,
        ));
    }
    sweep
}

/// Pearson statistic of `values` in `bins` equal cells on `[lo, hi]`.
pub fn chi_square(values: impl Iterator<Item = f64>, lo: f64, hi: f64, bins: usize) -> f64 {
    let mut counts = vec![0usize; bins];
    let mut total = 0usize;
    for v in values {
        let b = (((v - lo) / (hi - lo)) * bins as f64).floor() as usize;
        counts[b.min(bins - 1)] += 1;
        total += 1;
    }
    let expected = total as f64 / bins as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Repeatedly extracts the minimum of `pool`, lowest index first on ties.
pub fn brute_force_select(pool: &[ScoredSolution], k: usize) -> Vec<ScoredSolution> {
    let mut taken = vec![false; pool.len()];
    let mut out = Vec::new();
    while out.len() < k {
        let mut best: Option<usize> = None;
        for (i, s) in pool.iter().enumerate() {
            if taken[i] {
                continue;
            }
            if best.is_none_or(|b| s.fitness.total_cmp(&pool[b].fitness).is_lt()) {
                best = Some(i);
            }
        }
        let Some(b) = best else { break };
        taken[b] = true;
        out.push(pool[b].clone());
    }
    out
}

/// Counts (trace, target, budget) hits directly.
pub fn brute_force_ecdf(traces: &[Vec<TraceRecord>], targets: &[f64], budgets: &[u64]) -> Vec<f64> {
    budgets
        .iter()
        .map(|&b| {
            let mut hits = 0usize;
            for t in traces {
                for &target in targets {
                    if t.iter().any(|r| r.fes <= b && r.indicator < target) {
                        hits += 1;
                    }
                }
            }
            hits as f64 / (traces.len() * targets.len()) as f64
        })
        .collect()
}
