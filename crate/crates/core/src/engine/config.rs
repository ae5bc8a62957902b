use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPSILON, DEFAULT_SLOPE};
use crate::trace::DEFAULT_PREC;

/// Components that can be switched off for ablation runs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ablation {
    /// Skip training the exploitation critic and drop it from the generator loss.
    pub no_exploitation: bool,
    /// Skip training the exploration critic and drop it from the generator loss.
    pub no_exploration: bool,
    /// Keep the optimal set at its initial size.
    pub no_shrinking: bool,
    pub no_pretraining: bool,
}

/// Hyperparameters of one optimization run. Defaults are the reference
/// settings (`K = 150`, `M = 30`, `a = 1.5`, `lambda = 0.3`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptGanConfig {
    /// Initial optimal-set size.
    pub k0: usize,
    /// Solutions sampled and evaluated per epoch.
    pub m: usize,
    /// Shrinking rate.
    pub a: f64,
    /// Exploration/exploitation balancing coefficient.
    pub lambda: f64,
    pub gan_iter: usize,
    pub d_iter: usize,
    pub pre_iter: usize,
    /// Gradient penalty factor.
    pub beta: f64,
    /// Training batch size.
    pub s: usize,
    pub hidden: usize,
    /// Generator noise has `noise_dim_factor * n` components.
    pub noise_dim_factor: usize,
    pub lr_g: f64,
    pub lr_d: f64,
    pub max_fes: u64,
    pub prec: f64,
    pub time_limit_secs: Option<f64>,
    pub seed: u64,
    pub hidden_slope: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub ablation: Ablation,
}

impl Default for OptGanConfig {
    fn default() -> Self {
        Self {
            k0: 150,
            m: 30,
            a: 1.5,
            lambda: 0.3,
            gan_iter: 150,
            d_iter: 4,
            pre_iter: 100,
            beta: 0.1,
            s: 30,
            hidden: 50,
            noise_dim_factor: 2,
            lr_g: 1e-4,
            lr_d: 5e-3,
            max_fes: 10_000,
            prec: DEFAULT_PREC,
            time_limit_secs: None,
            seed: 0,
            hidden_slope: DEFAULT_SLOPE,
            adam_beta1: DEFAULT_BETA1,
            adam_beta2: DEFAULT_BETA2,
            adam_epsilon: DEFAULT_EPSILON,
            ablation: Ablation::default(),
        }
    }
}

impl OptGanConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("k0", self.k0),
            ("m", self.m),
            ("gan_iter", self.gan_iter),
            ("d_iter", self.d_iter),
            ("pre_iter", self.pre_iter),
            ("s", self.s),
            ("hidden", self.hidden),
            ("noise_dim_factor", self.noise_dim_factor),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be >= 1")));
            }
        }
        if self.max_fes == 0 {
            return Err(Error::Config("max_fes must be >= 1".into()));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return Err(Error::Config(format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!("beta must be >= 0, got {}", self.beta)));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::Config(format!("a must be >= 0, got {}", self.a)));
        }
        if !(self.prec > 0.0) {
            return Err(Error::Config(format!("prec must be > 0, got {}", self.prec)));
        }
        for (name, lr) in [("lr_g", self.lr_g), ("lr_d", self.lr_d)] {
            if !(lr > 0.0 && lr.is_finite()) {
                return Err(Error::Config(format!("{name} must be > 0, got {lr}")));
            }
        }
        if !(self.hidden_slope > 0.0 && self.hidden_slope < 1.0) {
            return Err(Error::Config(format!(
                "hidden_slope must lie in (0, 1), got {}",
                self.hidden_slope
            )));
        }
        if !(0.0..1.0).contains(&self.adam_beta1)
            || !(0.0..1.0).contains(&self.adam_beta2)
            || !(self.adam_epsilon > 0.0)
        {
            return Err(Error::Config("Adam betas must lie in [0, 1), epsilon > 0".into()));
        }
        if let Some(t) = self.time_limit_secs {
            if !(t > 0.0) {
                return Err(Error::Config(format!("time_limit_secs must be > 0, got {t}")));
            }
        }
        Ok(())
    }
}
