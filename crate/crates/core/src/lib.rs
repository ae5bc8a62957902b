//! Black-box global optimization by adversarial distribution reshaping.
//!
//! A generator network learns a sampling distribution over the search box that
//! mixes the empirical distribution of the best solutions seen so far with the
//! uniform distribution on the box. Two Wasserstein critics with gradient
//! penalty drive it: one compares generated solutions to the optimal set
//! (exploitation), the other to uniform samples (exploration).
//!
//! Crate layout:
//!
//! - [`nn`]: single-hidden-layer perceptrons with closed-form first and second
//!   order gradients and Adam.
//! - [`knowledge`]: the optimal set and its shrinking schedule.
//! - [`engine`]: generator pre-training, critic/generator updates and the full
//!   optimization loop.
//! - [`benchmarks`]: analytic test functions with shift/rotation instances.
//! - [`harness`]: run traces, baselines, ECDF curves, heatmaps and the
//!   experiment runner behind the `optgan` binary.

pub mod benchmarks;
pub mod domain;
pub mod engine;
pub mod error;
pub mod harness;
pub mod knowledge;
pub mod nn;
pub mod objective;
pub mod trace;

pub use domain::Domain;
pub use engine::{optimize, OptGanConfig, OptGanOutcome, OptGanState};
pub use error::{Error, Result};
pub use objective::Objective;

use rand::SeedableRng;

/// RNG used for every run; one stream per (problem, optimizer, seed) cell.
pub type RunRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> RunRng {
    RunRng::seed_from_u64(seed)
}
