use serde::{Deserialize, Serialize};

use super::mlp::{GradBundle, MlpParams};
use crate::error::{Error, Result};

pub const DEFAULT_BETA1: f64 = 0.9;
pub const DEFAULT_BETA2: f64 = 0.999;
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Adam moment estimates for one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: GradBundle,
    pub v: GradBundle,
    pub step_count: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(params: &MlpParams) -> Self {
        Self {
            m: GradBundle::zeros_like(params),
            v: GradBundle::zeros_like(params),
            step_count: 0,
            beta1: DEFAULT_BETA1,
            beta2: DEFAULT_BETA2,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn with_hyperparameters(mut self, beta1: f64, beta2: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) || !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Adam needs beta1, beta2 in [0, 1) and epsilon > 0 (got {beta1}, {beta2}, {epsilon})"
            )));
        }
        self.beta1 = beta1;
        self.beta2 = beta2;
        self.epsilon = epsilon;
        Ok(self)
    }
}

/// One bias-corrected Adam update of `params` in place.
///
/// Non-finite gradients are rejected before anything is modified, so a failed
/// call leaves both `params` and `state` untouched.
pub fn adam_step(
    params: &mut MlpParams,
    state: &mut AdamState,
    grads: &GradBundle,
    lr: f64,
) -> Result<()> {
    if !grads.matches(params) || !state.m.matches(params) || !state.v.matches(params) {
        return Err(Error::InvalidArgument(
            "gradient or optimizer state shape does not match parameters".into(),
        ));
    }
    if !(lr > 0.0) || !lr.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "learning rate must be finite and > 0, got {lr}"
        )));
    }
    if !grads.is_finite() {
        return Err(Error::NonFinite("Adam gradient"));
    }

    let (b1, b2, eps) = (state.beta1, state.beta2, state.epsilon);
    let t = state.step_count + 1;
    let bias1 = 1.0 - b1.powf(t as f64);
    let bias2 = 1.0 - b2.powf(t as f64);

    let [mw1, mb1, mw2, mb2] = state.m.slices_mut();
    let [vw1, vb1, vw2, vb2] = state.v.slices_mut();
    let moments = [(mw1, vw1), (mb1, vb1), (mw2, vw2), (mb2, vb2)];
    for ((p, g), (m, v)) in params
        .slices_mut()
        .into_iter()
        .zip(grads.slices())
        .zip(moments)
    {
        for i in 0..p.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let m_hat = m[i] / bias1;
            let v_hat = v[i] / bias2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    state.step_count = t;
    Ok(())
}
