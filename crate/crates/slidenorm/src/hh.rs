//! Sliding-window heavy hitters with (1 + nu)-accurate reported frequencies.
//!
//! One smooth histogram drives everything: each retained timestamp owns a
//! CountSketch over its suffix (threshold nu*eta/32, low enough that a future
//! heavy hitter starts being tracked after missing only an O(nu) fraction of
//! its occurrences) and an approximate counter per tracked candidate. At
//! report time the window L2 estimate F gates candidates: an item is emitted
//! when some live counter certifies a window frequency of at least
//! (eta/2) * F. Reported frequencies are always underestimates of the true
//! window frequency; counters that started before the window subtract an
//! upper bound on their pre-window count.

use crate::error::{Error, Result};
use crate::hash::derive_seed;
use crate::sketch::count_sketch::CountSketch;
use crate::sketch::counter::ApproxCounter;
use crate::sketch::suffix::{SuffixHistogram, COMPACTION_RATIO};
use std::collections::HashMap;
use std::fmt;

/// Sketch sizing knobs. The theory constants (nu*eta/32 CountSketch threshold,
/// 17/16 compaction ratio, candidate cap 2*(32/(nu*eta))^2) stay fixed unless
/// explicitly overridden, which marks the run nonconforming.
#[derive(Clone, Debug)]
pub struct HhBudget {
    pub cs_rows: usize,
    pub cs_width: usize,
    pub ams_groups: usize,
    pub ams_group_size: usize,
    pub compaction_ratio: f64,
    pub cs_threshold_override: Option<f64>,
    pub candidate_cap_override: Option<usize>,
}

impl Default for HhBudget {
    fn default() -> Self {
        HhBudget {
            cs_rows: 9,
            cs_width: 1024,
            ams_groups: 6,
            ams_group_size: 8,
            compaction_ratio: COMPACTION_RATIO,
            cs_threshold_override: None,
            candidate_cap_override: None,
        }
    }
}

impl HhBudget {
    pub fn nonconforming(&self) -> bool {
        self.compaction_ratio != COMPACTION_RATIO
            || self.cs_threshold_override.is_some()
            || self.candidate_cap_override.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct HhConfig {
    pub universe: u64,
    /// Window length in updates; `u64::MAX` means the entire stream.
    pub window: u64,
    /// Heaviness threshold eta in (0, 1).
    pub eta: f64,
    /// Frequency accuracy nu in (0, 1/4).
    pub nu: f64,
    pub seed: u64,
    pub budget: HhBudget,
}

impl HhConfig {
    pub fn new(universe: u64, window: u64, eta: f64, nu: f64, seed: u64) -> Self {
        HhConfig {
            universe,
            window,
            eta,
            nu,
            seed,
            budget: HhBudget::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::parameter("eta", format!("{} not in (0,1)", self.eta)));
        }
        if !(self.nu > 0.0 && self.nu < 0.25) {
            return Err(Error::parameter("nu", format!("{} not in (0,1/4)", self.nu)));
        }
        if self.window == 0 {
            return Err(Error::parameter("W", "must be positive"));
        }
        if self.universe == 0 {
            return Err(Error::parameter("n", "must be positive"));
        }
        Ok(())
    }

    /// CountSketch threshold nu * eta / 32.
    pub fn cs_threshold(&self) -> f64 {
        self.budget
            .cs_threshold_override
            .unwrap_or(self.nu * self.eta / 32.0)
    }

    /// Per-timestamp candidate budget 2 * (32 / (nu * eta))^2.
    pub fn candidate_cap(&self) -> usize {
        if let Some(cap) = self.budget.candidate_cap_override {
            return cap;
        }
        let t = self.cs_threshold();
        let cap = 2.0 / (t * t);
        if cap >= usize::MAX as f64 {
            usize::MAX
        } else {
            cap.ceil() as usize
        }
    }
}

/// One emitted heavy hitter: the frequency estimate never exceeds the true
/// window frequency and the ratio check `f_hat >= (eta/2) * f_ref` held.
#[derive(Clone, Debug, PartialEq)]
pub struct HeavyHitterReport {
    pub item: u64,
    /// Window-frequency underestimate.
    pub f_hat: u64,
    /// The window-L2 underestimate used for the threshold test.
    pub f_ref: f64,
    /// Start of the timestamp whose counter produced `f_hat`.
    pub source_ts: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SpaceReport {
    pub timestamps: usize,
    pub max_timestamps: usize,
    pub timestamp_bound: usize,
    pub cardinality_violations: u64,
    pub countsketch_cells: u64,
    pub counters: u64,
    pub snapshot_entries: u64,
    pub max_candidates_per_timestamp: usize,
    pub candidate_cap: usize,
    pub admission_refusals: u64,
}

impl fmt::Display for SpaceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "timestamps={} max_timestamps={} timestamp_bound={} cardinality_violations={} \
             countsketch_cells={} counters={} snapshot_entries={} \
             max_candidates_per_timestamp={} candidate_cap={} admission_refusals={}",
            self.timestamps,
            self.max_timestamps,
            self.timestamp_bound,
            self.cardinality_violations,
            self.countsketch_cells,
            self.counters,
            self.snapshot_entries,
            self.max_candidates_per_timestamp,
            self.candidate_cap,
            self.admission_refusals
        )
    }
}

#[derive(Clone, Debug)]
struct HhCell {
    sketch: CountSketch,
    trackers: HashMap<u64, ApproxCounter>,
}

#[derive(Clone, Debug)]
pub struct HhState {
    cfg: HhConfig,
    cs_threshold: f64,
    candidate_cap: usize,
    hist: SuffixHistogram<HhCell>,
    max_trackers_per_ts: usize,
    admission_refusals: u64,
    counters_started: u64,
}

impl HhState {
    pub fn new(cfg: HhConfig) -> Result<Self> {
        cfg.validate()?;
        let window = if cfg.window == u64::MAX {
            None
        } else {
            Some(cfg.window)
        };
        let hist = SuffixHistogram::new(
            cfg.universe,
            cfg.budget.ams_groups,
            cfg.budget.ams_group_size,
            cfg.budget.compaction_ratio,
            window,
            derive_seed(cfg.seed, 0x6868_616d, 0),
        )?;
        let cs_threshold = cfg.cs_threshold();
        let candidate_cap = cfg.candidate_cap();
        if !(cs_threshold > 0.0) {
            return Err(Error::parameter("cs_threshold", "nu*eta/32 must be positive"));
        }
        Ok(HhState {
            cfg,
            cs_threshold,
            candidate_cap,
            hist,
            max_trackers_per_ts: 0,
            admission_refusals: 0,
            counters_started: 0,
        })
    }

    pub fn config(&self) -> &HhConfig {
        &self.cfg
    }

    pub fn position(&self) -> u64 {
        self.hist.position()
    }

    pub fn nonconforming(&self) -> bool {
        self.cfg.budget.nonconforming()
    }

    pub fn update(&mut self, item: u64) -> Result<()> {
        let cfg = &self.cfg;
        let cs_seed_master = cfg.seed;
        let universe = cfg.universe;
        let rows = cfg.budget.cs_rows;
        let width = cfg.budget.cs_width;
        let threshold = self.cs_threshold;
        self.hist.update_with(
            item,
            |start| HhCell {
                sketch: CountSketch::new(
                    universe,
                    rows,
                    width,
                    threshold,
                    0, // candidate tracking lives in `trackers`
                    derive_seed(cs_seed_master, 0x6373, start),
                )
                .expect("validated CountSketch parameters"),
                trackers: HashMap::new(),
            },
            |cell, x| cell.sketch.update_table(x, 1),
            // A deleted timestamp hands its counters to its younger neighbor;
            // on a clash the earlier-started counter wins (it has seen every
            // occurrence the later one has, and more).
            |dead, heir| {
                for (item, ctr) in dead.trackers {
                    match heir.trackers.entry(item) {
                        std::collections::hash_map::Entry::Occupied(mut o) => {
                            if ctr.start() < o.get().start() {
                                o.insert(ctr);
                            }
                        }
                        std::collections::hash_map::Entry::Vacant(v) => {
                            v.insert(ctr);
                        }
                    }
                }
            },
        )?;

        // Counter maintenance for the arriving item only; other candidates'
        // memberships are re-derived lazily at report time.
        let pos = self.hist.position();
        let nu = self.cfg.nu;
        let cs_threshold = self.cs_threshold;
        let cap = self.candidate_cap;
        let mut max_trackers = self.max_trackers_per_ts;
        let mut refusals = 0u64;
        let mut started = 0u64;
        for e in self.hist.entries_mut() {
            let x_a = e.l2_estimate();
            let cell = &mut e.payload;
            if let Some(ctr) = cell.trackers.get_mut(&item) {
                ctr.record(pos)?;
            } else {
                let est = cell.sketch.estimate_unchecked(item);
                if est as f64 >= cs_threshold / 2.0 * x_a {
                    if cell.trackers.len() < cap {
                        let mut ctr = ApproxCounter::new(pos, nu)?;
                        ctr.record(pos)?;
                        cell.trackers.insert(item, ctr);
                        started += 1;
                    } else {
                        refusals += 1;
                    }
                }
            }
            max_trackers = max_trackers.max(cell.trackers.len());
        }
        self.max_trackers_per_ts = max_trackers;
        self.admission_refusals += refusals;
        self.counters_started += started;
        Ok(())
    }

    fn effective_window(&self) -> u64 {
        self.cfg.window.min(self.hist.position())
    }

    /// The window-L2 underestimate used by the report threshold.
    pub fn window_l2_estimate(&self) -> Result<f64> {
        self.hist.window_l2(self.effective_window())
    }

    /// Emit every candidate whose certified window frequency reaches
    /// (eta/2) * F. Sorted by item id.
    pub fn report(&self) -> Vec<HeavyHitterReport> {
        let pos = self.hist.position();
        if pos == 0 {
            return Vec::new();
        }
        let w = self.effective_window();
        let f_ref = self
            .hist
            .window_l2(w)
            .expect("window clamped to stream length");
        let pre_boundary = pos - w; // window covers (pre_boundary, pos]
        let cut = self.cfg.eta / 2.0 * f_ref;

        // Membership in H_a is sticky: a counter exists exactly because its
        // item was once reported by the timestamp's CountSketch, and the
        // soundness of the final report rests on the frequency threshold
        // below, not on re-deriving sketch membership here.
        let mut best: HashMap<u64, (u64, u64)> = HashMap::new();
        for e in self.hist.entries() {
            for (&item, ctr) in e.payload.trackers.iter() {
                let in_suffix = ctr.query(pos).expect("pos >= counter start");
                let pre = ctr.query_upper(pre_boundary);
                let f_hat = in_suffix.saturating_sub(pre);
                let slot = best.entry(item).or_insert((0, 0));
                if f_hat > slot.0 {
                    *slot = (f_hat, e.start);
                }
            }
        }

        let mut out: Vec<HeavyHitterReport> = best
            .into_iter()
            .filter(|&(_, (f_hat, _))| f_hat > 0 && f_hat as f64 >= cut)
            .map(|(item, (f_hat, source_ts))| HeavyHitterReport {
                item,
                f_hat,
                f_ref,
                source_ts,
            })
            .collect();
        out.sort_unstable_by_key(|r| r.item);
        out
    }

    pub fn space_report(&self) -> SpaceReport {
        let mut cells = 0u64;
        let mut counters = 0u64;
        let mut snaps = 0u64;
        for e in self.hist.entries() {
            cells += e.payload.sketch.cells() as u64;
            counters += e.payload.trackers.len() as u64;
            snaps += e
                .payload
                .trackers
                .values()
                .map(|c| c.snapshot_entries() as u64)
                .sum::<u64>();
        }
        SpaceReport {
            timestamps: self.hist.len(),
            max_timestamps: self.hist.max_timestamps_seen(),
            timestamp_bound: self.hist.cardinality_bound(),
            cardinality_violations: self.hist.cardinality_violations(),
            countsketch_cells: cells,
            counters,
            snapshot_entries: snaps,
            max_candidates_per_timestamp: self.max_trackers_per_ts,
            candidate_cap: self.candidate_cap,
            admission_refusals: self.admission_refusals,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg(window: u64, seed: u64) -> HhConfig {
        let mut cfg = HhConfig::new(1 << 16, window, 0.1, 0.2, seed);
        cfg.budget.cs_width = 256;
        cfg.budget.cs_rows = 5;
        cfg
    }

    #[test]
    fn fresh_state_space_report_is_zero() {
        let st = HhState::new(small_cfg(u64::MAX, 1)).unwrap();
        let sp = st.space_report();
        assert_eq!(sp.timestamps, 0);
        assert_eq!(sp.countsketch_cells, 0);
        assert_eq!(sp.counters, 0);
        assert_eq!(sp.snapshot_entries, 0);
        assert!(st.report().is_empty());
    }

    #[test]
    fn first_update_starts_a_counter_immediately() {
        let mut st = HhState::new(small_cfg(u64::MAX, 2)).unwrap();
        st.update(7).unwrap();
        let sp = st.space_report();
        assert_eq!(sp.timestamps, 1);
        // The arriving item is 1-sparse in its own suffix, so it is tracked
        // from position 1 on.
        assert_eq!(sp.counters, 1);
        let rep = st.report();
        assert_eq!(rep.len(), 1);
        assert_eq!(rep[0].item, 7);
        assert_eq!(rep[0].f_hat, 1);
        assert_eq!(rep[0].source_ts, 1);
    }

    #[test]
    fn stale_timestamps_are_pruned_by_window_rule() {
        let mut st = HhState::new(small_cfg(4, 3)).unwrap();
        for item in 1..=32u64 {
            st.update(item).unwrap();
        }
        // At most one timestamp may start before the window boundary.
        let boundary = st.position() - 4 + 1;
        let older = st
            .hist
            .entries()
            .iter()
            .filter(|e| e.start < boundary)
            .count();
        assert!(older <= 1, "{older} timestamps below the boundary");
    }

    #[test]
    fn single_heavy_item_is_reported_with_exact_frequency() {
        let mut st = HhState::new(small_cfg(u64::MAX, 4)).unwrap();
        // Background noise plus one strong item.
        for j in 0..400u64 {
            st.update(100 + j).unwrap();
        }
        for _ in 0..200 {
            st.update(7).unwrap();
        }
        let rep = st.report();
        let hit = rep.iter().find(|r| r.item == 7).expect("item 7 reported");
        assert_eq!(hit.f_hat, 200);
        // Sandwich: f_hat <= f <= (1 + nu) f_hat.
        assert!(hit.f_hat <= 200 && 200.0 <= 1.2 * hit.f_hat as f64);
    }

    #[test]
    fn reports_are_deterministic_replays() {
        let stream: Vec<u64> = (0..500u64).map(|t| (t * 37 % 100) + 1).collect();
        let run = |seed: u64| {
            let mut st = HhState::new(small_cfg(250, seed)).unwrap();
            for &x in &stream {
                st.update(x).unwrap();
            }
            st.report()
        };
        assert_eq!(run(11), run(11));
        assert_ne!(format!("{:?}", run(11)), String::new());
    }

    #[test]
    fn window_restriction_subtracts_pre_window_mass() {
        // Item 5 occurs heavily before the window and exactly 3 times inside.
        let mut st = HhState::new(small_cfg(16, 6)).unwrap();
        for _ in 0..100 {
            st.update(5).unwrap();
        }
        for j in 0..13u64 {
            st.update(200 + j).unwrap();
        }
        for _ in 0..3 {
            st.update(5).unwrap();
        }
        let rep = st.report();
        if let Some(r) = rep.iter().find(|r| r.item == 5) {
            // Must be an underestimate of the true window frequency 3.
            assert!(r.f_hat <= 3, "f_hat={}", r.f_hat);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(HhState::new(HhConfig::new(100, 10, 0.0, 0.2, 1)).is_err());
        assert!(HhState::new(HhConfig::new(100, 10, 0.1, 0.3, 1)).is_err());
        assert!(HhState::new(HhConfig::new(100, 0, 0.1, 0.2, 1)).is_err());
        let mut st = HhState::new(small_cfg(10, 1)).unwrap();
        assert!(matches!(st.update(0), Err(Error::Range { .. })));
    }
}
