//! Sliding-window streaming toolkit: heavy hitters with (1+nu)-accurate
//! frequencies over the last W updates, symmetric-norm estimation through
//! subsampled level sets, and Orlicz-norm subspace embeddings / coresets for
//! row streams, plus the synthetic-stream lab used to validate all of it.

pub mod error;
pub mod hash;
pub mod hh;
pub mod lab;
pub mod orlicz;
pub mod sketch;
pub mod symnorm;

pub use error::{Error, Result};
