//! AMS second-moment sketch: signed accumulators with 4-wise independent
//! signs, combined by median-of-means.

use crate::error::{Error, Result};
use crate::hash::{derive_seed, FourwiseHash};

pub const DEFAULT_GROUPS: usize = 6;
pub const DEFAULT_GROUP_SIZE: usize = 8;

/// The shared sign functions for a bank of AMS accumulators. A suffix
/// histogram keeps one of these and many accumulator sets, so that one sign
/// evaluation per repetition serves every retained timestamp.
#[derive(Clone, Debug)]
pub struct AmsSigns {
    signs: Vec<FourwiseHash>,
    groups: usize,
    group_size: usize,
}

impl AmsSigns {
    pub fn new(groups: usize, group_size: usize, seed: u64) -> Result<Self> {
        if groups == 0 || group_size == 0 {
            return Err(Error::parameter("repetitions", "groups and group size must be positive"));
        }
        let reps = groups * group_size;
        let signs = (0..reps)
            .map(|r| FourwiseHash::from_seed(derive_seed(seed, 0x616d_73, r as u64)))
            .collect();
        Ok(AmsSigns {
            signs,
            groups,
            group_size,
        })
    }

    pub fn repetitions(&self) -> usize {
        self.signs.len()
    }

    pub fn groups(&self) -> usize {
        self.groups
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    /// Signs of `item` packed into a bitmask (bit r set means +1).
    #[inline]
    pub fn sign_mask(&self, item: u64) -> u64 {
        debug_assert!(self.signs.len() <= 64);
        let mut mask = 0u64;
        for (r, h) in self.signs.iter().enumerate() {
            if h.sign(item) > 0 {
                mask |= 1 << r;
            }
        }
        mask
    }
}

/// Accumulator state for one stream (or one suffix): per-repetition signed
/// sums plus per-group running sums of squares, so the F2 estimate is O(groups)
/// to read at any time.
#[derive(Clone, Debug)]
pub struct AmsAccumulator {
    acc: Vec<i64>,
    group_sq: Vec<i64>,
    group_size: usize,
}

impl AmsAccumulator {
    pub fn new(signs: &AmsSigns) -> Self {
        AmsAccumulator {
            acc: vec![0; signs.repetitions()],
            group_sq: vec![0; signs.groups()],
            group_size: signs.group_size(),
        }
    }

    /// Apply one +1 update whose signs are `mask` (from `AmsSigns::sign_mask`).
    #[inline]
    pub fn add(&mut self, mask: u64) {
        for (r, a) in self.acc.iter_mut().enumerate() {
            let s: i64 = if mask >> r & 1 == 1 { 1 } else { -1 };
            let v = *a + s;
            *a = v;
            // (a+s)^2 - a^2 = 2*s*(a+s) - 1
            self.group_sq[r / self.group_size] += 2 * s * v - 1;
        }
    }

    /// Median of group means of squared accumulators: an F2 estimate.
    pub fn f2_estimate(&self) -> f64 {
        let mut means: Vec<f64> = self
            .group_sq
            .iter()
            .map(|&s| s as f64 / self.group_size as f64)
            .collect();
        means.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        let g = means.len();
        if g % 2 == 1 {
            means[g / 2]
        } else {
            0.5 * (means[g / 2 - 1] + means[g / 2])
        }
    }

    pub fn l2_estimate(&self) -> f64 {
        self.f2_estimate().max(0.0).sqrt()
    }

    /// Mean over all repetitions of the squared accumulators (unbiased for F2).
    pub fn f2_mean(&self) -> f64 {
        let total: i64 = self.group_sq.iter().sum();
        total as f64 / self.acc.len() as f64
    }
}

/// Standalone AMS sketch over a full stream.
#[derive(Clone, Debug)]
pub struct AmsSketch {
    signs: AmsSigns,
    acc: AmsAccumulator,
    universe: u64,
}

impl AmsSketch {
    pub fn new(universe: u64, groups: usize, group_size: usize, seed: u64) -> Result<Self> {
        let signs = AmsSigns::new(groups, group_size, seed)?;
        let acc = AmsAccumulator::new(&signs);
        Ok(AmsSketch {
            signs,
            acc,
            universe,
        })
    }

    pub fn with_default_shape(universe: u64, seed: u64) -> Result<Self> {
        Self::new(universe, DEFAULT_GROUPS, DEFAULT_GROUP_SIZE, seed)
    }

    pub fn update(&mut self, item: u64) -> Result<()> {
        if item == 0 || item > self.universe {
            return Err(Error::Range {
                item,
                universe: self.universe,
            });
        }
        self.acc.add(self.signs.sign_mask(item));
        Ok(())
    }

    pub fn f2_estimate(&self) -> f64 {
        self.acc.f2_estimate()
    }

    pub fn l2_estimate(&self) -> f64 {
        self.acc.l2_estimate()
    }

    pub fn f2_mean(&self) -> f64 {
        self.acc.f2_mean()
    }
}
