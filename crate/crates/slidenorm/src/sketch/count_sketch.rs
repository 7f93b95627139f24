//! CountSketch point queries and heavy-hitter candidate tracking.
//!
//! Signed-counter sketch: each row hashes items to buckets (pairwise
//! independent) and flips a 4-wise independent sign, so the point query is the
//! median over rows of the signed bucket values. The sketch is linear: two
//! instances built from the same seed merge by entrywise addition.
//!
//! A sliding-window histogram builds one of these per retained timestamp —
//! one per update, most of them compacted away within a few arrivals — so the
//! counter table starts as a small update buffer and only materializes into
//! the dense rows-by-width array once the sketch has absorbed enough updates
//! to outlive its infancy. Estimates are identical in both representations.
//!
//! CountSketch alone cannot enumerate the universe, so the sketch also keeps a
//! bounded candidate set of the items with the largest current estimates;
//! `heavy_hitters` filters that set against a caller-supplied L2 estimate.

use crate::error::{Error, Result};
use crate::hash::{derive_seed, FourwiseHash, PairwiseHash};
use std::collections::HashMap;

/// Buffered updates tolerated before switching to the dense table.
const BUFFER_LIMIT: usize = 64;

#[derive(Clone, Debug)]
enum Backing {
    Buffered(Vec<(u64, i64)>),
    Dense(Vec<i64>),
}

#[derive(Clone, Debug)]
pub struct CountSketch {
    universe: u64,
    rows: usize,
    width: usize,
    /// Reporting threshold nu: items at nu * ||f||_2 should surface.
    threshold: f64,
    seed: u64,
    backing: Backing,
    buckets: Vec<PairwiseHash>,
    signs: Vec<FourwiseHash>,
    candidate_cap: usize,
    candidates: HashMap<u64, ()>,
    /// Admissions refused because the candidate set was full and the arriving
    /// item did not beat the weakest tracked estimate.
    refusals: u64,
}

impl CountSketch {
    /// `width` must be a power of two; `rows` must be odd so the median is an
    /// actual table value. `candidate_cap = 0` disables candidate tracking
    /// (callers that track candidates themselves).
    pub fn new(
        universe: u64,
        rows: usize,
        width: usize,
        threshold: f64,
        candidate_cap: usize,
        seed: u64,
    ) -> Result<Self> {
        if rows == 0 || rows % 2 == 0 || rows > 63 {
            return Err(Error::parameter("rows", format!("{rows} is not odd in [1, 63]")));
        }
        if !width.is_power_of_two() {
            return Err(Error::parameter("width", format!("{width} is not a power of two")));
        }
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::parameter("threshold", format!("{threshold} not in (0,1)")));
        }
        if universe == 0 {
            return Err(Error::parameter("universe", "must be positive"));
        }
        let buckets = (0..rows)
            .map(|r| PairwiseHash::from_seed(derive_seed(seed, 0x6373_6b62, r as u64)))
            .collect();
        let signs = (0..rows)
            .map(|r| FourwiseHash::from_seed(derive_seed(seed, 0x6373_7367, r as u64)))
            .collect();
        Ok(CountSketch {
            universe,
            rows,
            width,
            threshold,
            seed,
            backing: Backing::Buffered(Vec::new()),
            buckets,
            signs,
            candidate_cap,
            candidates: HashMap::new(),
            refusals: 0,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    /// Stored counter entries (buffer length until materialized).
    pub fn cells(&self) -> usize {
        match &self.backing {
            Backing::Buffered(buf) => buf.len(),
            Backing::Dense(_) => self.rows * self.width,
        }
    }

    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn refusals(&self) -> u64 {
        self.refusals
    }

    fn check_item(&self, item: u64) -> Result<()> {
        if item == 0 || item > self.universe {
            return Err(Error::Range {
                item,
                universe: self.universe,
            });
        }
        Ok(())
    }

    /// Add `delta` to the item's counters (insertion streams pass +1).
    pub fn update(&mut self, item: u64, delta: i64) -> Result<()> {
        self.check_item(item)?;
        self.update_table(item, delta);
        if self.candidate_cap > 0 {
            self.consider_candidate(item);
        }
        Ok(())
    }

    /// Table-only update; used when the caller runs its own candidate set.
    #[inline]
    pub fn update_table(&mut self, item: u64, delta: i64) {
        match &mut self.backing {
            Backing::Buffered(buf) => {
                buf.push((item, delta));
                if buf.len() > BUFFER_LIMIT {
                    self.materialize();
                }
            }
            Backing::Dense(table) => {
                let mask = (self.width - 1) as u64;
                for r in 0..self.rows {
                    let b = self.buckets[r].bucket(item, mask);
                    let s = self.signs[r].sign(item);
                    table[r * self.width + b] += s * delta;
                }
            }
        }
    }

    fn materialize(&mut self) {
        let buf = match std::mem::replace(
            &mut self.backing,
            Backing::Dense(vec![0; self.rows * self.width]),
        ) {
            Backing::Buffered(buf) => buf,
            Backing::Dense(t) => {
                self.backing = Backing::Dense(t);
                return;
            }
        };
        let mask = (self.width - 1) as u64;
        let Backing::Dense(table) = &mut self.backing else {
            unreachable!()
        };
        for (item, delta) in buf {
            for r in 0..self.rows {
                let b = self.buckets[r].bucket(item, mask);
                let s = self.signs[r].sign(item);
                table[r * self.width + b] += s * delta;
            }
        }
    }

    /// Median over rows of the signed bucket counters.
    pub fn estimate(&self, item: u64) -> Result<i64> {
        self.check_item(item)?;
        Ok(self.estimate_unchecked(item))
    }

    #[inline]
    pub fn estimate_unchecked(&self, item: u64) -> i64 {
        let mask = (self.width - 1) as u64;
        let mut vals = [0i64; 64];
        match &self.backing {
            Backing::Dense(table) => {
                for r in 0..self.rows {
                    let b = self.buckets[r].bucket(item, mask);
                    vals[r] = self.signs[r].sign(item) * table[r * self.width + b];
                }
            }
            Backing::Buffered(buf) => {
                // Replay the buffer per row; identical to the dense lookup.
                for r in 0..self.rows {
                    let target = self.buckets[r].bucket(item, mask);
                    let mut cell = 0i64;
                    for &(x, delta) in buf {
                        if self.buckets[r].bucket(x, mask) == target {
                            cell += self.signs[r].sign(x) * delta;
                        }
                    }
                    vals[r] = self.signs[r].sign(item) * cell;
                }
            }
        }
        let vals = &mut vals[..self.rows];
        vals.sort_unstable();
        vals[self.rows / 2]
    }

    fn consider_candidate(&mut self, item: u64) {
        if self.candidates.contains_key(&item) {
            return;
        }
        if self.candidates.len() < self.candidate_cap {
            self.candidates.insert(item, ());
            return;
        }
        // Full: evict the weakest tracked item if the arrival beats it.
        let est = self.estimate_unchecked(item);
        let weakest = self
            .candidates
            .keys()
            .map(|&c| (self.estimate_unchecked(c), c))
            .min()
            .expect("candidate set is non-empty");
        if est > weakest.0 {
            self.candidates.remove(&weakest.1);
            self.candidates.insert(item, ());
        } else {
            self.refusals += 1;
        }
    }

    /// Tracked candidates whose estimate clears `(threshold / 2) * l2_estimate`,
    /// where `l2_estimate` is a factor-2 approximation of the stream L2 norm.
    /// Sorted by item id for reproducible output.
    pub fn heavy_hitters(&self, l2_estimate: f64) -> Result<Vec<u64>> {
        if !(l2_estimate > 0.0) {
            return Err(Error::parameter("l2_estimate", "must be positive"));
        }
        let cut = self.threshold / 2.0 * l2_estimate;
        let mut out: Vec<u64> = self
            .candidates
            .keys()
            .copied()
            .filter(|&c| self.estimate_unchecked(c) as f64 >= cut)
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Entrywise merge; both sketches must share seed and dimensions.
    pub fn merge(&mut self, other: &CountSketch) -> Result<()> {
        if self.seed != other.seed
            || self.rows != other.rows
            || self.width != other.width
            || self.universe != other.universe
        {
            return Err(Error::Input(
                "cannot merge CountSketch instances with different seeds or shapes".into(),
            ));
        }
        match &other.backing {
            // A buffered other is just a short update stream.
            Backing::Buffered(buf) => {
                for &(item, delta) in buf.clone().iter() {
                    self.update_table(item, delta);
                }
            }
            Backing::Dense(theirs) => {
                self.materialize();
                let Backing::Dense(table) = &mut self.backing else {
                    unreachable!()
                };
                for (a, b) in table.iter_mut().zip(theirs.iter()) {
                    *a += *b;
                }
            }
        }
        for (&item, _) in other.candidates.iter() {
            if self.candidate_cap > 0 {
                self.consider_candidate(item);
            }
        }
        Ok(())
    }

    /// The dense counter table (materializing the buffer if needed).
    pub fn dense_table(&mut self) -> &[i64] {
        self.materialize();
        match &self.backing {
            Backing::Dense(t) => t,
            Backing::Buffered(_) => unreachable!(),
        }
    }
}
