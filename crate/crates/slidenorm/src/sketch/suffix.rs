//! Smooth-histogram estimator for the L2 norm of every stream suffix.
//!
//! The structure keeps an ordered set of timestamps, each owning an AMS
//! accumulator over the updates from that timestamp to the present. All
//! accumulators share one bank of sign functions, so an arrival costs one
//! sign evaluation per repetition plus an add per retained timestamp.
//!
//! Compaction enforces the histogram invariant: no retained triple a < b < c
//! may satisfy X_a <= C * X_c (C = 17/16). Adjacent retained estimates then
//! sandwich any suffix within a constant factor, which is what turns suffix
//! estimates into sliding-window estimates.
//!
//! Timestamps carry a caller-supplied payload; the heavy-hitter layer stores a
//! CountSketch and its per-item counters there so everything is pruned in
//! lockstep.

use crate::error::{Error, Result};
use crate::sketch::ams::{AmsAccumulator, AmsSigns};

/// Compaction ratio from the smooth-histogram analysis.
pub const COMPACTION_RATIO: f64 = 17.0 / 16.0;

/// Window queries return the bracketing suffix estimate divided by this
/// constant. The raw estimate sits between the window norm and about twice
/// it (histogram invariant) with AMS noise on top; measured over synthetic
/// streams the ratio estimate/norm spans roughly [0.70, 1.28], so dividing
/// by 4/3 centers it inside the contract F <= ||f||_2 <= 2F with equal
/// margins on both sides.
pub const FREQ_EST_SCALE: f64 = 4.0 / 3.0;

#[derive(Clone, Debug)]
pub struct TimestampEntry<P> {
    pub start: u64,
    ams: AmsAccumulator,
    pub payload: P,
}

impl<P> TimestampEntry<P> {
    pub fn l2_estimate(&self) -> f64 {
        self.ams.l2_estimate()
    }

    pub fn f2_estimate(&self) -> f64 {
        self.ams.f2_estimate()
    }
}

#[derive(Clone, Debug)]
pub struct SuffixHistogram<P> {
    universe: u64,
    ratio: f64,
    /// When set, timestamps older than the window are pruned down to one
    /// bracketing entry (the sliding-window mode of the heavy-hitter state).
    window: Option<u64>,
    pos: u64,
    signs: AmsSigns,
    // Boxed: entries are a few hundred bytes and middle deletions memmove
    // the tail on nearly every update.
    entries: Vec<Box<TimestampEntry<P>>>,
    max_entries_seen: usize,
    cardinality_violations: u64,
}

impl<P> SuffixHistogram<P> {
    pub fn new(
        universe: u64,
        groups: usize,
        group_size: usize,
        ratio: f64,
        window: Option<u64>,
        seed: u64,
    ) -> Result<Self> {
        if !(ratio > 1.0) {
            return Err(Error::parameter("ratio", "compaction ratio must exceed 1"));
        }
        if window == Some(0) {
            return Err(Error::parameter("window", "must be positive"));
        }
        Ok(SuffixHistogram {
            universe,
            ratio,
            window,
            pos: 0,
            signs: AmsSigns::new(groups, group_size, seed)?,
            entries: Vec::new(),
            max_entries_seen: 0,
            cardinality_violations: 0,
        })
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_timestamps_seen(&self) -> usize {
        self.max_entries_seen
    }

    /// Times the retained-timestamp count exceeded ceil(log_C(pos^2)) + 2.
    pub fn cardinality_violations(&self) -> u64 {
        self.cardinality_violations
    }

    pub fn entries(&self) -> &[Box<TimestampEntry<P>>] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [Box<TimestampEntry<P>>] {
        &mut self.entries
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

    /// Process one arrival. `new_payload` builds the payload for the fresh
    /// timestamp; `feed` applies the arrival to every retained payload
    /// (including the fresh one); `on_delete` hands a compacted timestamp's
    /// payload to its younger neighbor so per-item state can migrate instead
    /// of dying with the timestamp.
    pub fn update_with(
        &mut self,
        item: u64,
        new_payload: impl FnOnce(u64) -> P,
        mut feed: impl FnMut(&mut P, u64),
        on_delete: impl FnMut(P, &mut P),
    ) -> Result<()> {
        self.check_item(item)?;
        self.pos += 1;
        self.entries.push(Box::new(TimestampEntry {
            start: self.pos,
            ams: AmsAccumulator::new(&self.signs),
            payload: new_payload(self.pos),
        }));
        let mask = self.signs.sign_mask(item);
        for e in self.entries.iter_mut() {
            e.ams.add(mask);
            feed(&mut e.payload, item);
        }
        self.compact(on_delete);
        self.max_entries_seen = self.max_entries_seen.max(self.entries.len());
        if self.entries.len() > self.cardinality_bound() {
            self.cardinality_violations += 1;
        }
        debug_assert!(self.invariant_holds());
        Ok(())
    }

    /// ceil(log_C(pos^2)) + 2, the retained-timestamp budget.
    pub fn cardinality_bound(&self) -> usize {
        let pos = self.pos.max(2) as f64;
        (2.0 * pos.ln() / self.ratio.ln()).ceil() as usize + 2
    }

    fn compact(&mut self, mut on_delete: impl FnMut(P, &mut P)) {
        // Window rule: keep at most one timestamp strictly before the window.
        if let Some(w) = self.window {
            let boundary = self.pos.saturating_sub(w) + 1; // window = [boundary, pos]
            while self.entries.len() >= 2 && self.entries[1].start < boundary {
                let removed = self.entries.remove(0);
                on_delete(removed.payload, &mut self.entries[0].payload);
            }
        }
        // Histogram rule: while some triple a < b < c has X_a <= C * X_c,
        // delete the timestamp just before c. A prefix-minimum scan finds the
        // smallest such c even when estimates are not monotone.
        let mut xs: Vec<f64> = self.entries.iter().map(|e| e.l2_estimate()).collect();
        loop {
            let mut deleted = false;
            let mut prefix_min = f64::INFINITY;
            for c in 2..xs.len() {
                prefix_min = prefix_min.min(xs[c - 2]);
                if prefix_min <= self.ratio * xs[c] {
                    let removed = self.entries.remove(c - 1);
                    on_delete(removed.payload, &mut self.entries[c - 1].payload);
                    xs.remove(c - 1);
                    deleted = true;
                    break;
                }
            }
            if !deleted {
                break;
            }
        }
    }

    fn invariant_holds(&self) -> bool {
        let xs: Vec<f64> = self.entries.iter().map(|e| e.l2_estimate()).collect();
        let mut prefix_min = f64::INFINITY;
        for c in 2..xs.len() {
            prefix_min = prefix_min.min(xs[c - 2]);
            if prefix_min <= self.ratio * xs[c] {
                return false;
            }
        }
        true
    }

    /// Index of the latest timestamp at or before the window boundary
    /// pos - w + 1; falls back to the oldest retained timestamp.
    pub fn bracketing_index(&self, w: u64) -> usize {
        let boundary = self.pos.saturating_sub(w) + 1;
        match self.entries.partition_point(|e| e.start <= boundary) {
            0 => 0,
            k => k - 1,
        }
    }

    /// Scaled L2 estimate for the last `w` updates.
    pub fn window_l2(&self, w: u64) -> Result<f64> {
        if w == 0 || w > self.pos {
            return Err(Error::parameter("W", format!("{w} not in [1, {}]", self.pos)));
        }
        let a = self.bracketing_index(w);
        Ok(self.entries[a].l2_estimate() / FREQ_EST_SCALE)
    }
}

/// The plain suffix-L2 estimator: a histogram with no payloads.
#[derive(Clone, Debug)]
pub struct SuffixL2Estimator {
    inner: SuffixHistogram<()>,
}

impl SuffixL2Estimator {
    pub fn new(universe: u64, seed: u64) -> Result<Self> {
        use crate::sketch::ams::{DEFAULT_GROUPS, DEFAULT_GROUP_SIZE};
        Ok(SuffixL2Estimator {
            inner: SuffixHistogram::new(
                universe,
                DEFAULT_GROUPS,
                DEFAULT_GROUP_SIZE,
                COMPACTION_RATIO,
                None,
                seed,
            )?,
        })
    }

    pub fn update(&mut self, item: u64) -> Result<()> {
        self.inner.update_with(item, |_| (), |_, _| (), |_, _| ())
    }

    /// Estimate F for the last `w` updates with F <= ||f||_2 <= 2F whp.
    pub fn query(&self, w: u64) -> Result<f64> {
        self.inner.window_l2(w)
    }

    pub fn timestamp_count(&self) -> usize {
        self.inner.len()
    }

    pub fn max_timestamps_seen(&self) -> usize {
        self.inner.max_timestamps_seen()
    }

    pub fn position(&self) -> u64 {
        self.inner.position()
    }

    pub fn cardinality_bound(&self) -> usize {
        self.inner.cardinality_bound()
    }

    pub fn suffix_estimates(&self) -> Vec<(u64, f64)> {
        self.inner
            .entries()
            .iter()
            .map(|e| (e.start, e.l2_estimate()))
            .collect()
    }
}
