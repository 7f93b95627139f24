//! Orlicz-norm machinery for row streams: norm evaluation, online
//! L1-sensitivity sampling into subspace-embedding coresets (streaming and
//! sliding-window), and a regression solver over the weighted samples.

pub mod gfunc;
pub mod lp;
pub mod norm;
pub mod regression;
pub mod sampler;
pub mod sensitivity;

pub use gfunc::GFunc;
pub use norm::{orlicz_norm, weighted_orlicz_norm};
pub use regression::{
    solve_coreset_regression, solve_regression, RegressionOptions, RegressionResult,
};
pub use sampler::{
    stream_sample, CoresetRow, OnlineSampler, SamplerConfig, WindowCoreset, WindowCoresetConfig,
};
pub use sensitivity::{exact_online_l1_sensitivities, online_sensitivity, SpanBasis};
