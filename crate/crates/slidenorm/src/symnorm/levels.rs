//! Compressed level vectors: coordinates bucketed by magnitude into powers of
//! alpha, each bucket represented by (level index, count). The bucket value is
//! the level's upper edge, so replacing a vector by its level vector can only
//! round magnitudes up, by strictly less than a factor alpha.
//!
//! Bucket edges carry a per-run uniform offset u in [0,1): level j covers
//! [alpha^(j-1+u), alpha^(j+u)). The offset keeps integer frequencies off the
//! edges.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LevelBucket {
    pub level: i64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelVector {
    alpha: f64,
    offset: f64,
    universe: u64,
    buckets: Vec<LevelBucket>,
}

impl LevelVector {
    pub fn new(
        alpha: f64,
        offset: f64,
        universe: u64,
        mut buckets: Vec<LevelBucket>,
    ) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(Error::parameter("alpha", format!("{alpha} must exceed 1")));
        }
        if !(0.0..1.0).contains(&offset) {
            return Err(Error::parameter("offset", format!("{offset} not in [0,1)")));
        }
        buckets.sort_unstable_by_key(|b| b.level);
        for w in buckets.windows(2) {
            if w[0].level >= w[1].level {
                return Err(Error::parameter("buckets", "levels must be strictly increasing"));
            }
        }
        if buckets.iter().any(|b| b.count == 0) {
            return Err(Error::parameter("buckets", "counts must be positive"));
        }
        let total: u64 = buckets.iter().map(|b| b.count).sum();
        if total > universe {
            return Err(Error::parameter(
                "buckets",
                format!("total count {total} exceeds universe {universe}"),
            ));
        }
        Ok(LevelVector {
            alpha,
            offset,
            universe,
            buckets,
        })
    }

    pub fn empty(alpha: f64, offset: f64, universe: u64) -> Result<Self> {
        Self::new(alpha, offset, universe, Vec::new())
    }

    /// Bucket every positive magnitude of `v`; zeros are dropped.
    pub fn from_exact(alpha: f64, offset: f64, universe: u64, v: &[f64]) -> Result<Self> {
        let probe = Self::empty(alpha, offset, universe)?;
        let mut counts: std::collections::BTreeMap<i64, u64> = std::collections::BTreeMap::new();
        for &x in v {
            let m = x.abs();
            if m > 0.0 {
                *counts.entry(probe.level_of(m)).or_default() += 1;
            }
        }
        Self::new(
            alpha,
            offset,
            universe,
            counts
                .into_iter()
                .map(|(level, count)| LevelBucket { level, count })
                .collect(),
        )
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn buckets(&self) -> &[LevelBucket] {
        &self.buckets
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn total_count(&self) -> u64 {
        self.buckets.iter().map(|b| b.count).sum()
    }

    /// Level index j with alpha^(j-1+offset) <= m < alpha^(j+offset).
    pub fn level_of(&self, magnitude: f64) -> i64 {
        debug_assert!(magnitude > 0.0);
        let t = magnitude.ln() / self.alpha.ln() - self.offset;
        t.floor() as i64 + 1
    }

    /// Upper edge of level j; the value every member is rounded up to.
    pub fn value(&self, level: i64) -> f64 {
        self.alpha.powf(level as f64 + self.offset)
    }

    /// One-bucket view, for per-level contribution tests.
    pub fn single(&self, index: usize) -> LevelVector {
        LevelVector {
            alpha: self.alpha,
            offset: self.offset,
            universe: self.universe,
            buckets: vec![self.buckets[index]],
        }
    }

    /// Sub-vector restricted to the given bucket indices.
    pub fn restricted(&self, keep: &[usize]) -> LevelVector {
        LevelVector {
            alpha: self.alpha,
            offset: self.offset,
            universe: self.universe,
            buckets: keep.iter().map(|&i| self.buckets[i]).collect(),
        }
    }

    /// Materialize the level vector (one entry per counted coordinate).
    pub fn expanded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total_count() as usize);
        for b in &self.buckets {
            let v = self.value(b.level);
            out.extend(std::iter::repeat(v).take(b.count as usize));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binning_matches_edges() {
        let lv = LevelVector::empty(1.1, 0.0, 1000).unwrap();
        // ceil(log_1.1(8)) = 22 with zero offset.
        assert_eq!(lv.level_of(8.0), 22);
        assert_eq!(lv.level_of(1.0), 1);
        let e = LevelVector::empty(2.0, 0.0, 1000).unwrap();
        assert_eq!(e.level_of(1.0), 1); // [1, 2)
        assert_eq!(e.level_of(1.99), 1);
        assert_eq!(e.level_of(2.0), 2); // [2, 4)
    }

    #[test]
    fn value_rounds_up_by_less_than_alpha() {
        let lv = LevelVector::empty(1.3, 0.37, 1000).unwrap();
        for &m in &[0.2, 0.9, 1.0, 1.5, 7.9, 123.4] {
            let j = lv.level_of(m);
            let v = lv.value(j);
            assert!(v > m * (1.0 - 1e-12), "value {v} below magnitude {m}");
            assert!(v <= m * 1.3 * (1.0 + 1e-12), "value {v} above alpha * {m}");
        }
    }

    #[test]
    fn from_exact_counts() {
        let v = [1.0, 1.0, 1.0, 8.0, 8.0, 0.0];
        let lv = LevelVector::from_exact(2.0, 0.0, 100, &v).unwrap();
        assert_eq!(
            lv.buckets(),
            &[
                LevelBucket { level: 1, count: 3 },
                LevelBucket { level: 4, count: 2 }
            ]
        );
        assert_eq!(lv.total_count(), 5);
        assert_eq!(lv.expanded().len(), 5);
    }

    #[test]
    fn validation() {
        assert!(LevelVector::new(1.0, 0.0, 10, vec![]).is_err());
        assert!(LevelVector::new(1.5, 1.0, 10, vec![]).is_err());
        assert!(
            LevelVector::new(1.5, 0.0, 2, vec![LevelBucket { level: 1, count: 3 }]).is_err(),
            "count above universe"
        );
        assert!(LevelVector::new(
            1.5,
            0.0,
            10,
            vec![LevelBucket { level: 1, count: 0 }]
        )
        .is_err());
    }
}
