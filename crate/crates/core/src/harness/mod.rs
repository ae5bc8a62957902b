pub mod baselines;
pub mod ecdf;
pub mod experiment;
pub mod heatmap;
pub mod runtrace;
