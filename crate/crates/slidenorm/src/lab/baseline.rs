//! Uniform-sampling baselines the sketch competes against: thin the stream
//! and rescale counts, or subsample the universe and rescale the norm.

use crate::error::{Error, Result};
use crate::hash::mix64;
use crate::symnorm::norms::{NormDescriptor, NormKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineMode {
    /// Keep each in-window update independently with probability `rate` and
    /// rescale counts by 1/rate.
    Stream,
    /// Keep coordinates whose hash falls below `rate` and rescale the norm by
    /// the inclusion factor (L_p only; top-k has no unbiased rescale and is
    /// reported raw, flagged).
    Universe,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BaselineEstimate {
    pub value: f64,
    /// Set when no unbiased rescale exists for the norm and the raw
    /// subsampled value is reported instead.
    pub flagged: bool,
}

pub fn baseline_uniform(
    window_updates: &[u64],
    rate: f64,
    mode: BaselineMode,
    norm: &NormDescriptor,
    seed: u64,
) -> Result<BaselineEstimate> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::parameter("rate", format!("{rate} not in (0,1]")));
    }
    match mode {
        BaselineMode::Stream => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut freq: HashMap<u64, u64> = HashMap::new();
            for &x in window_updates {
                if rate >= 1.0 || rng.random::<f64>() < rate {
                    *freq.entry(x).or_default() += 1;
                }
            }
            let counts: Vec<f64> = freq.values().map(|&c| c as f64 / rate).collect();
            Ok(BaselineEstimate {
                value: norm.evaluate_dense(&counts)?,
                flagged: false,
            })
        }
        BaselineMode::Universe => {
            let cut = (rate * u64::MAX as f64) as u64;
            let mut freq: HashMap<u64, u64> = HashMap::new();
            for &x in window_updates {
                let kept = rate >= 1.0
                    || mix64(seed ^ x.wrapping_mul(0xa076_1d64_78bd_642f)) < cut;
                if kept {
                    *freq.entry(x).or_default() += 1;
                }
            }
            let counts: Vec<f64> = freq.values().map(|&c| c as f64).collect();
            let raw = norm.evaluate_dense(&counts)?;
            match norm.kind() {
                NormKind::Lp { p } => Ok(BaselineEstimate {
                    value: raw * rate.powf(-1.0 / p),
                    flagged: false,
                }),
                NormKind::TopK { .. } => Ok(BaselineEstimate {
                    value: raw,
                    flagged: true,
                }),
                _ => Err(Error::Unsupported(format!(
                    "no universe-sampling rescale for {}",
                    norm.name()
                ))),
            }
        }
    }
}
