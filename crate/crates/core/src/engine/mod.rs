//! Generator/bi-critic optimizer.
//!
//! One run: fill the optimal set with `k0` uniform samples, pre-train the
//! generator against the exploration critic until it covers the box, then
//! alternate epochs of adversarial training with sampling `m` candidates,
//! merging them into the optimal set and shrinking it.

mod config;
mod run;

pub use config::{Ablation, OptGanConfig};
pub use run::{optimize, OptGanOutcome};

use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::knowledge::OptimalSet;
use crate::nn::{
    adam_step, critic_loss_param_grad, generator_loss_weighted, gp_penalty_param_grad, init_params,
    mixture_weights, AdamState, GradBundle, MlpParams, OutputActivation,
};

/// Network parameters together with their optimizer state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    pub params: MlpParams,
    pub adam: AdamState,
}

impl Network {
    fn new(params: MlpParams, config: &OptGanConfig) -> Result<Self> {
        let adam = AdamState::new(&params).with_hyperparameters(
            config.adam_beta1,
            config.adam_beta2,
            config.adam_epsilon,
        )?;
        Ok(Self { params, adam })
    }

    fn step(&mut self, grads: &GradBundle, lr: f64) -> Result<()> {
        adam_step(&mut self.params, &mut self.adam, grads, lr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Critic {
    /// Compares generated solutions with the optimal set.
    Exploitation,
    /// Compares generated solutions with uniform samples on the box.
    Exploration,
}

/// Per-epoch diagnostics of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochDiagnostics {
    pub fes: u64,
    pub k_t: usize,
    pub fbest: f64,
    /// Wasserstein estimate of the exploitation critic.
    pub w_di: f64,
    /// Wasserstein estimate of the exploration critic.
    pub w_dr: f64,
}

/// Everything a run owns: the three networks, the optimal set and the
/// evaluation count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptGanState {
    pub gen: Network,
    pub d_i: Network,
    pub d_r: Network,
    pub opt_set: OptimalSet,
    pub fes: u64,
    pub epoch: u64,
    pub domain: Domain,
}

pub(crate) struct Deadline(Option<Instant>);

impl Deadline {
    pub(crate) fn new(limit_secs: Option<f64>) -> Self {
        Self(limit_secs.map(|s| Instant::now() + std::time::Duration::from_secs_f64(s)))
    }

    pub(crate) fn passed(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

impl OptGanState {
    /// Fresh networks for a problem on `domain`; the optimal set starts empty.
    pub fn new<R: Rng + ?Sized>(domain: &Domain, config: &OptGanConfig, rng: &mut R) -> Result<Self> {
        config.validate()?;
        let n = domain.dim();
        let gen = init_params(config.noise_dim_factor * n, config.hidden, n, rng)?
            .with_slope(config.hidden_slope)?
            .with_output(OutputActivation::ScaledTanh {
                domain: domain.clone(),
            })?;
        let d_i = init_params(n, config.hidden, 1, rng)?.with_slope(config.hidden_slope)?;
        let d_r = init_params(n, config.hidden, 1, rng)?.with_slope(config.hidden_slope)?;
        Ok(Self {
            gen: Network::new(gen, config)?,
            d_i: Network::new(d_i, config)?,
            d_r: Network::new(d_r, config)?,
            opt_set: OptimalSet::empty(config.k0)?,
            fes: 0,
            epoch: 0,
            domain: domain.clone(),
        })
    }

    pub fn noise_dim(&self) -> usize {
        self.gen.params.in_dim
    }

    /// `count` noise vectors with components uniform on `[-1, 1]`.
    pub fn noise_batch<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
        let d = self.noise_dim();
        (0..count)
            .map(|_| (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect()
    }

    fn generate(&self, noise: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        self.gen.params.forward_batch(noise)
    }

    /// `count` solutions from the generator. Evaluating them is the caller's job.
    pub fn sample_generator<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::InvalidArgument("sample count must be >= 1".into()));
        }
        let noise = self.noise_batch(count, rng);
        self.generate(&noise)
    }

    fn network(&self, which: Critic) -> &Network {
        match which {
            Critic::Exploitation => &self.d_i,
            Critic::Exploration => &self.d_r,
        }
    }

    fn network_mut(&mut self, which: Critic) -> &mut Network {
        match which {
            Critic::Exploitation => &mut self.d_i,
            Critic::Exploration => &mut self.d_r,
        }
    }

    /// Critic loss on given batches: mean `D(fake) - D(real)` plus the
    /// gradient penalty on `xi * fake + (1 - xi) * real`. Returns the loss and
    /// its parameter gradient without touching the critic.
    pub fn critic_objective(
        &self,
        which: Critic,
        fake: &[Vec<f64>],
        real: &[Vec<f64>],
        xi: &[f64],
        beta: f64,
    ) -> Result<(f64, GradBundle)> {
        if xi.len() != fake.len() {
            return Err(Error::ShapeMismatch {
                context: "interpolation weights",
                expected: fake.len(),
                actual: xi.len(),
            });
        }
        let params = &self.network(which).params;
        let (w_loss, mut grads) = critic_loss_param_grad(params, real, fake)?;
        let x_hat = interpolate(fake, real, xi);
        let (penalty, gp_grads) = gp_penalty_param_grad(params, &x_hat, beta)?;
        grads.add_assign(&gp_grads);
        Ok((w_loss + penalty, grads))
    }

    /// One Adam update of a critic on the given batches; returns the loss
    /// before the update.
    pub fn critic_update(
        &mut self,
        which: Critic,
        fake: &[Vec<f64>],
        real: &[Vec<f64>],
        xi: &[f64],
        config: &OptGanConfig,
    ) -> Result<f64> {
        let (loss, grads) = self.critic_objective(which, fake, real, xi, config.beta)?;
        self.network_mut(which).step(&grads, config.lr_d)?;
        Ok(loss)
    }

    /// Exploitation critic update on a bootstrap batch of the optimal set
    /// against fresh generator samples.
    pub fn train_exploit_step<R: Rng + ?Sized>(&mut self, config: &OptGanConfig, rng: &mut R) -> Result<f64> {
        let real = self.opt_set.bootstrap_sample(config.s, rng)?;
        let fake = self.sample_generator(config.s, rng)?;
        let xi = uniform_weights(config.s, rng);
        self.critic_update(Critic::Exploitation, &fake, &real, &xi, config)
    }

    /// Exploration critic update on fresh uniform samples of the box against
    /// fresh generator samples.
    pub fn train_explore_step<R: Rng + ?Sized>(&mut self, config: &OptGanConfig, rng: &mut R) -> Result<f64> {
        let real = self.domain.sample_batch(config.s, rng);
        let fake = self.sample_generator(config.s, rng)?;
        let xi = uniform_weights(config.s, rng);
        self.critic_update(Critic::Exploration, &fake, &real, &xi, config)
    }

    /// Critic weights used in the generator loss after ablations.
    pub fn generator_weights(&self, config: &OptGanConfig) -> Result<(f64, f64)> {
        let ab = &config.ablation;
        match (ab.no_exploitation, ab.no_exploration) {
            (false, false) => mixture_weights(config.lambda),
            (true, false) => Ok((0.0, 1.0)),
            (false, true) => Ok((1.0, 0.0)),
            (true, true) => Err(Error::Config("both critics disabled".into())),
        }
    }

    fn generator_update(&mut self, weights: (f64, f64), noise: &[Vec<f64>], lr: f64) -> Result<f64> {
        let (loss, grads) = generator_loss_weighted(
            &self.gen.params,
            &[(&self.d_i.params, weights.0), (&self.d_r.params, weights.1)],
            noise,
        )?;
        self.gen.step(&grads, lr)?;
        Ok(loss)
    }

    /// One generator update against the weighted critic mixture.
    pub fn train_generator_step<R: Rng + ?Sized>(&mut self, config: &OptGanConfig, rng: &mut R) -> Result<f64> {
        let weights = self.generator_weights(config)?;
        let noise = self.noise_batch(config.s, rng);
        self.generator_update(weights, &noise, config.lr_g)
    }

    /// Pre-trains the generator toward the uniform distribution on the box.
    /// Consumes no evaluations.
    pub fn pretrain_generator<R: Rng + ?Sized>(&mut self, config: &OptGanConfig, rng: &mut R) -> Result<()> {
        self.pretrain_until(config, rng, &Deadline(None)).map(|_| ())
    }

    /// Returns `false` if the deadline cut pre-training short.
    pub(crate) fn pretrain_until<R: Rng + ?Sized>(
        &mut self,
        config: &OptGanConfig,
        rng: &mut R,
        deadline: &Deadline,
    ) -> Result<bool> {
        for _ in 0..config.pre_iter {
            for _ in 0..config.gan_iter {
                if deadline.passed() {
                    return Ok(false);
                }
                for _ in 0..config.d_iter {
                    self.train_explore_step(config, rng)?;
                }
                let noise = self.noise_batch(config.s, rng);
                self.generator_update((0.0, 1.0), &noise, config.lr_g)?;
            }
        }
        Ok(true)
    }

    /// One epoch of adversarial training: `gan_iter` rounds of `d_iter`
    /// updates of both critics on shared generator batches, then a generator
    /// update. Returns `false` if the deadline passed.
    pub(crate) fn train_epoch<R: Rng + ?Sized>(
        &mut self,
        config: &OptGanConfig,
        rng: &mut R,
        deadline: &Deadline,
    ) -> Result<bool> {
        let weights = self.generator_weights(config)?;
        let s = config.s;
        for _ in 0..config.gan_iter {
            if deadline.passed() {
                return Ok(false);
            }
            for _ in 0..config.d_iter {
                let sampled = self.opt_set.bootstrap_sample(s, rng)?;
                let uniform = self.domain.sample_batch(s, rng);
                let noise = self.noise_batch(s, rng);
                let fake = self.generate(&noise)?;
                if !config.ablation.no_exploitation {
                    let xi = uniform_weights(s, rng);
                    self.critic_update(Critic::Exploitation, &fake, &sampled, &xi, config)?;
                }
                if !config.ablation.no_exploration {
                    let xi = uniform_weights(s, rng);
                    self.critic_update(Critic::Exploration, &fake, &uniform, &xi, config)?;
                }
            }
            let noise = self.noise_batch(s, rng);
            self.generator_update(weights, &noise, config.lr_g)?;
        }
        Ok(true)
    }

    /// Critic-based Wasserstein estimates `(W_DI, W_DR)`: mean critic value on
    /// generated solutions minus mean value on the respective real batch.
    pub fn wasserstein_estimates<R: Rng + ?Sized>(&self, config: &OptGanConfig, rng: &mut R) -> Result<(f64, f64)> {
        let sampled = self.opt_set.bootstrap_sample(config.s, rng)?;
        let uniform = self.domain.sample_batch(config.s, rng);
        let fake = self.sample_generator(config.s, rng)?;
        let w_di = wasserstein_estimate(&self.d_i.params, &fake, &sampled)?;
        let w_dr = wasserstein_estimate(&self.d_r.params, &fake, &uniform)?;
        Ok((w_di, w_dr))
    }
}

/// `(1/S) sum_s [D(fake_s) - D(real_s)]`.
pub fn wasserstein_estimate(critic: &MlpParams, fake: &[Vec<f64>], real: &[Vec<f64>]) -> Result<f64> {
    Ok(critic_loss_param_grad(critic, real, fake)?.0)
}

/// `xi_s * fake_s + (1 - xi_s) * real_s` per pair.
pub fn interpolate(fake: &[Vec<f64>], real: &[Vec<f64>], xi: &[f64]) -> Vec<Vec<f64>> {
    fake.iter()
        .zip(real)
        .zip(xi)
        .map(|((f, r), &t)| f.iter().zip(r).map(|(a, b)| t * a + (1.0 - t) * b).collect())
        .collect()
}

fn uniform_weights<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    (0..count).map(|_| rng.random::<f64>()).collect()
}
