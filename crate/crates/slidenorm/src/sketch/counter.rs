//! Deterministic approximate counter for a single tracked item.
//!
//! Counts occurrences from a fixed start position and answers, for any
//! position u at or after the start, an estimate c_hat with
//! c_hat <= true(u) <= (1 + accuracy/4) * c_hat. Small counts (below
//! ceil(4/accuracy)) are snapshotted on every increment and are exact;
//! afterwards a snapshot is recorded each time the count crosses
//! ceil(prev * (1 + accuracy/4)).

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct ApproxCounter {
    start: u64,
    accuracy: f64,
    exact_limit: u64,
    count: u64,
    last_pos: u64,
    next_snap: u64,
    snaps: Vec<(u64, u64)>,
}

impl ApproxCounter {
    pub fn new(start: u64, accuracy: f64) -> Result<Self> {
        if !(accuracy > 0.0 && accuracy < 4.0) {
            return Err(Error::parameter("accuracy", format!("{accuracy} not in (0,4)")));
        }
        Ok(ApproxCounter {
            start,
            accuracy,
            exact_limit: (4.0 / accuracy).ceil() as u64,
            count: 0,
            last_pos: start,
            next_snap: 1,
            snaps: Vec::new(),
        })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    /// Exact number of occurrences seen so far.
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn snapshot_entries(&self) -> usize {
        self.snaps.len()
    }

    /// Record one occurrence of the tracked item at stream position `pos`.
    /// Occurrences must arrive in order.
    pub fn record(&mut self, pos: u64) -> Result<()> {
        if pos < self.last_pos {
            return Err(Error::parameter("pos", "occurrences must arrive in order"));
        }
        self.count += 1;
        self.last_pos = pos;
        if self.count < self.exact_limit {
            self.snaps.push((pos, self.count));
        } else if self.count >= self.next_snap {
            self.snaps.push((pos, self.count));
            self.next_snap = (self.count as f64 * (1.0 + self.accuracy / 4.0)).ceil() as u64;
            if self.next_snap <= self.count {
                self.next_snap = self.count + 1;
            }
        }
        Ok(())
    }

    /// Lower estimate of the count on [start, u]: the largest recorded count
    /// at a position <= u (the live count serves as an implicit snapshot).
    pub fn query(&self, u: u64) -> Result<u64> {
        if u < self.start {
            return Err(Error::parameter("u", "query position precedes counter start"));
        }
        if u >= self.last_pos {
            return Ok(self.count);
        }
        Ok(match self.snaps.partition_point(|&(p, _)| p <= u) {
            0 => 0,
            k => self.snaps[k - 1].1,
        })
    }

    /// Upper bound on the count on [start, u]. Positions below `start` count
    /// as zero so window-boundary subtraction can call this unconditionally.
    pub fn query_upper(&self, u: u64) -> u64 {
        if u < self.start {
            return 0;
        }
        if u >= self.last_pos {
            return self.count;
        }
        let k = self.snaps.partition_point(|&(p, _)| p <= u);
        if k == self.snaps.len() {
            self.count
        } else {
            // Count is strictly below the next snapshot value until it is hit.
            self.snaps[k].1 - 1
        }
    }
}
