//! Online sensitivity sampling for Orlicz-norm subspace embeddings, plus the
//! checkpointed variant that restricts the guarantee to a sliding window of
//! rows.
//!
//! Every arriving row gets a score tau: 1 if it leaves the current sample's
//! span, otherwise 2 * Delta times the LP maximization against the weighted
//! sample so far. The row survives with probability min(1, alpha * tau) with
//! alpha = C * d / eps^2 * ln(n); survivors enter the sample scaled by 1/p
//! (that reweighted matrix is what later taus maximize against) and carry
//! weight 1/p for G-norm sums. The induction is prefix-wise, so the sample is
//! an online coreset, which is what the sliding-window checkpoints exploit.

use crate::error::{Error, Result};
use crate::hash::derive_seed;
use crate::orlicz::sensitivity::{sensitivity_ratio, SpanBasis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub dim: usize,
    /// Embedding accuracy target.
    pub eps: f64,
    /// Aspect ratio Delta >= 1 of the loss over the data's inner-product
    /// range (see `GFunc::aspect_ratio`).
    pub delta: f64,
    /// Oversampling constant C in alpha = C d eps^-2 ln n.
    pub oversample: f64,
    /// Stream-length scale for the ln n factor.
    pub n_hint: u64,
    pub seed: u64,
}

impl SamplerConfig {
    pub fn alpha(&self) -> f64 {
        self.oversample * self.dim as f64 / (self.eps * self.eps)
            * (self.n_hint.max(2) as f64).ln()
    }

    fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::parameter("dim", "must be positive"));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::parameter("eps", format!("{} not in (0,1)", self.eps)));
        }
        if !(self.delta >= 1.0) {
            return Err(Error::parameter("delta", "aspect ratio must be at least 1"));
        }
        if !(self.oversample > 0.0) {
            return Err(Error::parameter("oversample", "must be positive"));
        }
        Ok(())
    }
}

/// One sampled row: the raw row, where it arrived, and how it was weighted.
#[derive(Clone, Debug)]
pub struct CoresetRow {
    pub row: Vec<f64>,
    pub index: u64,
    pub sensitivity: f64,
    pub probability: f64,
    pub weight: f64,
}

#[derive(Clone, Debug)]
pub struct OnlineSampler {
    cfg: SamplerConfig,
    alpha: f64,
    basis: SpanBasis,
    /// Reweighted sampled rows (a / p), the matrix the tau LP runs against.
    weighted_rows: Vec<Vec<f64>>,
    coreset: Vec<CoresetRow>,
    pos: u64,
    rng: ChaCha8Rng,
    lp_solves: u64,
}

impl OnlineSampler {
    pub fn new(cfg: SamplerConfig) -> Result<Self> {
        cfg.validate()?;
        let alpha = cfg.alpha();
        let rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0x6f72_6c73, 0));
        Ok(OnlineSampler {
            basis: SpanBasis::new(cfg.dim),
            weighted_rows: Vec::new(),
            coreset: Vec::new(),
            pos: 0,
            rng,
            lp_solves: 0,
            alpha,
            cfg,
        })
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn sampled_count(&self) -> usize {
        self.coreset.len()
    }

    pub fn coreset(&self) -> &[CoresetRow] {
        &self.coreset
    }

    pub fn lp_solves(&self) -> u64 {
        self.lp_solves
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    /// Feed one row; returns whether it was sampled.
    pub fn push(&mut self, row: &[f64]) -> Result<bool> {
        if row.len() != self.cfg.dim {
            return Err(Error::Input(format!(
                "row {} has dimension {}, expected {}",
                self.pos + 1,
                row.len(),
                self.cfg.dim
            )));
        }
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input(format!("row {} has non-finite entries", self.pos + 1)));
        }
        self.pos += 1;
        let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(false); // tau = 0: never sampled
        }

        let tau = if !self.basis.contains(row) {
            1.0
        } else {
            // Cheap lower bound first: evaluating the ratio at the projected
            // row direction. If even the bound forces p = 1 the LP is skipped
            // and the recorded score is exact whenever it is 1.
            let lb = self.ratio_at(row);
            let lb_tau = (2.0 * self.cfg.delta * lb).min(1.0);
            if lb_tau >= 1.0 {
                1.0
            } else if self.alpha * lb_tau >= 1.0 {
                lb_tau // p = 1 either way; the LP would only refine the score
            } else {
                self.lp_solves += 1;
                let ratio = sensitivity_ratio(row, &self.weighted_rows, &self.basis)
                    .map_err(|e| Error::Numeric(format!("row {}: {e}", self.pos)))?;
                (2.0 * self.cfg.delta * ratio).min(1.0)
            }
        };

        if tau <= 0.0 {
            return Ok(false);
        }
        let p = (self.alpha * tau).min(1.0);
        let sampled = p >= 1.0 || self.rng.random::<f64>() < p;
        if sampled {
            let weight = 1.0 / p;
            self.weighted_rows
                .push(row.iter().map(|x| x * weight).collect());
            self.basis.insert(row);
            self.coreset.push(CoresetRow {
                row: row.to_vec(),
                index: self.pos,
                sensitivity: tau,
                probability: p,
                weight,
            });
        }
        Ok(sampled)
    }

    /// Ratio evaluated at the single direction `x = proj(row)`; a lower bound
    /// on the LP maximum.
    fn ratio_at(&self, row: &[f64]) -> f64 {
        if self.weighted_rows.is_empty() {
            return 0.0;
        }
        let x = self.basis.project(row);
        let ax: f64 = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
        let ax = ax.abs();
        if ax == 0.0 {
            return 0.0;
        }
        let l1: f64 = self
            .weighted_rows
            .iter()
            .map(|m| m.iter().zip(x.iter()).map(|(a, b)| a * b).sum::<f64>().abs())
            .sum();
        ax / (l1 + ax)
    }
}

/// One-shot convenience wrapper around `OnlineSampler`.
pub fn stream_sample<'a>(
    rows: impl IntoIterator<Item = &'a [f64]>,
    cfg: SamplerConfig,
) -> Result<Vec<CoresetRow>> {
    let mut s = OnlineSampler::new(cfg)?;
    for row in rows {
        s.push(row)?;
    }
    Ok(s.coreset)
}

#[derive(Clone, Debug)]
pub struct WindowCoresetConfig {
    pub window: u64,
    pub dim: usize,
    /// Window-level accuracy; per-checkpoint samplers run at eps / log2(n).
    pub eps: f64,
    pub delta: f64,
    pub oversample: f64,
    pub n_hint: u64,
    pub seed: u64,
}

#[derive(Clone, Debug)]
struct Checkpoint {
    start: u64,
    samples_at_birth: usize,
    sampler: OnlineSampler,
}

/// Staggered online samplers covering the last `window` rows: a query serves
/// the youngest checkpoint at or before the window start, restricted to
/// in-window samples.
#[derive(Clone, Debug)]
pub struct WindowCoreset {
    cfg: WindowCoresetConfig,
    eps_inst: f64,
    spawn_every: u64,
    checkpoints: Vec<Checkpoint>,
    pos: u64,
    arrivals_since_spawn: u64,
    max_checkpoints_seen: usize,
}

impl WindowCoreset {
    pub fn new(cfg: WindowCoresetConfig) -> Result<Self> {
        if cfg.window == 0 {
            return Err(Error::parameter("W", "must be positive"));
        }
        let lg = (cfg.n_hint.max(2) as f64).log2().ceil().max(1.0);
        let eps_inst = cfg.eps / lg;
        let spawn_every = ((cfg.window as f64 / lg).floor() as u64).max(1);
        Ok(WindowCoreset {
            eps_inst,
            spawn_every,
            checkpoints: Vec::new(),
            pos: 0,
            arrivals_since_spawn: 0,
            max_checkpoints_seen: 0,
            cfg,
        })
    }

    fn sampler_config(&self, start: u64) -> SamplerConfig {
        SamplerConfig {
            dim: self.cfg.dim,
            eps: self.eps_inst,
            delta: self.cfg.delta,
            oversample: self.cfg.oversample,
            n_hint: self.cfg.n_hint,
            seed: derive_seed(self.cfg.seed, 0x6368_6b70, start),
        }
    }

    pub fn push(&mut self, row: &[f64]) -> Result<()> {
        self.pos += 1;
        // Spawn before feeding so the new checkpoint covers this arrival.
        let youngest_due = match self.checkpoints.last() {
            None => true,
            Some(c) => {
                self.arrivals_since_spawn >= self.spawn_every
                    || c.sampler.sampled_count() >= 2 * c.samples_at_birth.max(1)
            }
        };
        if youngest_due {
            let mut sampler = OnlineSampler::new(self.sampler_config(self.pos))?;
            let samples_at_birth = 0;
            // Note: the fresh sampler sees the stream from this row on.
            sampler.push(row)?;
            for c in self.checkpoints.iter_mut() {
                c.sampler.push(row)?;
            }
            self.checkpoints.push(Checkpoint {
                start: self.pos,
                samples_at_birth,
                sampler,
            });
            self.arrivals_since_spawn = 0;
        } else {
            for c in self.checkpoints.iter_mut() {
                c.sampler.push(row)?;
            }
            self.arrivals_since_spawn += 1;
        }
        if let Some(c) = self.checkpoints.last_mut() {
            if c.samples_at_birth == 0 {
                c.samples_at_birth = c.sampler.sampled_count().max(1);
            }
        }
        // Evict: keep one checkpoint at or before the window boundary.
        let boundary = self.pos.saturating_sub(self.cfg.window) + 1;
        while self.checkpoints.len() >= 2 && self.checkpoints[1].start <= boundary {
            self.checkpoints.remove(0);
        }
        self.max_checkpoints_seen = self.max_checkpoints_seen.max(self.checkpoints.len());
        Ok(())
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn checkpoint_count(&self) -> usize {
        self.checkpoints.len()
    }

    pub fn max_checkpoints_seen(&self) -> usize {
        self.max_checkpoints_seen
    }

    pub fn stored_rows(&self) -> usize {
        self.checkpoints.iter().map(|c| c.sampler.sampled_count()).sum()
    }

    /// Coreset for the current window: the bracketing checkpoint's samples,
    /// restricted to in-window arrivals. Sample indices are translated from
    /// the checkpoint's local numbering to stream positions.
    pub fn query(&self) -> Vec<CoresetRow> {
        let boundary = self.pos.saturating_sub(self.cfg.window) + 1;
        let idx = match self
            .checkpoints
            .iter()
            .rposition(|c| c.start <= boundary)
        {
            Some(i) => i,
            None => 0,
        };
        self.checkpoints
            .get(idx)
            .map(|c| {
                let offset = c.start - 1; // local index 1 is stream position c.start
                c.sampler
                    .coreset()
                    .iter()
                    .filter(|r| r.index + offset >= boundary)
                    .map(|r| {
                        let mut r = r.clone();
                        r.index += offset;
                        r
                    })
                    .collect()
            })
            .unwrap_or_default()
    }
}
