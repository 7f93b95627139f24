//! Ground-truth machinery: synthetic stream generators, the exact sliding
//! window oracle, and uniform-sampling baselines.

pub mod baseline;
pub mod gen;
pub mod oracle;

pub use baseline::{baseline_uniform, BaselineEstimate, BaselineMode};
pub use gen::{
    gaussian_rows, generate, read_rows, read_stream, write_rows, write_stream, Stream,
    StreamVariant, SyntheticSpec,
};
pub use oracle::ExactWindowOracle;
