//! Streaming primitives: CountSketch, the AMS second-moment sketch, the
//! smooth-histogram suffix-L2 estimator, and the deterministic approximate
//! counter. Everything above (heavy hitters, norm estimation) composes these.

pub mod ams;
pub mod count_sketch;
pub mod counter;
pub mod suffix;

pub use ams::{AmsAccumulator, AmsSigns, AmsSketch};
pub use count_sketch::CountSketch;
pub use counter::ApproxCounter;
pub use suffix::{SuffixHistogram, SuffixL2Estimator, COMPACTION_RATIO, FREQ_EST_SCALE};
