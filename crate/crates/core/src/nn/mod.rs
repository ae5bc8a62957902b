//! Single-hidden-layer perceptrons with closed-form gradients.
//!
//! The architecture is fixed (`in -> hidden (LeakyReLU) -> out`), so every
//! gradient the optimizer needs is written out by hand, including the
//! parameter gradient of the input-gradient-norm penalty. All arithmetic is
//! `f64`.

mod adam;
mod grad;
mod mlp;

pub use adam::{adam_step, AdamState, DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPSILON};
pub use grad::{
    critic_loss_param_grad, generator_loss_param_grad, generator_loss_weighted, gp_penalty_param_grad,
    mixture_weights,
};
pub use mlp::{
    init_params, leaky_relu, leaky_relu_derivative, GradBundle, MlpParams, OutputActivation,
    DEFAULT_SLOPE,
};
