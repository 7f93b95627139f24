//! Exact sliding-window ground truth: O(W) memory, used only to judge the
//! sketches.

use crate::error::Result;
use crate::orlicz::gfunc::GFunc;
use crate::orlicz::norm::orlicz_norm;
use crate::symnorm::norms::NormDescriptor;
use std::collections::{HashMap, VecDeque};

#[derive(Clone, Debug)]
pub struct ExactWindowOracle {
    window: u64,
    ring: VecDeque<u64>,
    freq: HashMap<u64, u64>,
}

impl ExactWindowOracle {
    pub fn new(window: u64) -> Self {
        ExactWindowOracle {
            window: window.max(1),
            ring: VecDeque::new(),
            freq: HashMap::new(),
        }
    }

    pub fn push(&mut self, item: u64) {
        self.ring.push_back(item);
        *self.freq.entry(item).or_default() += 1;
        if self.ring.len() as u64 > self.window {
            let old = self.ring.pop_front().expect("ring non-empty");
            let c = self.freq.get_mut(&old).expect("tracked item");
            *c -= 1;
            if *c == 0 {
                self.freq.remove(&old);
            }
        }
    }

    pub fn window_len(&self) -> usize {
        self.ring.len()
    }

    pub fn frequencies(&self) -> &HashMap<u64, u64> {
        &self.freq
    }

    pub fn count(&self, item: u64) -> u64 {
        self.freq.get(&item).copied().unwrap_or(0)
    }

    pub fn counts_vec(&self) -> Vec<f64> {
        self.freq.values().map(|&c| c as f64).collect()
    }

    pub fn l2(&self) -> f64 {
        self.freq
            .values()
            .map(|&c| (c as f64) * (c as f64))
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm(&self, norm: &NormDescriptor) -> Result<f64> {
        norm.evaluate_dense(&self.counts_vec())
    }

    pub fn orlicz(&self, g: &GFunc, tol: f64) -> Result<f64> {
        orlicz_norm(&self.counts_vec(), g, tol)
    }

    /// Items with frequency at least eta * ||f||_2.
    pub fn heavy_set(&self, eta: f64) -> Vec<u64> {
        let cut = eta * self.l2();
        let mut out: Vec<u64> = self
            .freq
            .iter()
            .filter(|&(_, &c)| c as f64 >= cut)
            .map(|(&i, _)| i)
            .collect();
        out.sort_unstable();
        out
    }

    /// Recount the ring from scratch and compare with the incremental map.
    pub fn self_consistent(&self) -> bool {
        let mut re: HashMap<u64, u64> = HashMap::new();
        for &x in &self.ring {
            *re.entry(x).or_default() += 1;
        }
        re == self.freq
    }
}
