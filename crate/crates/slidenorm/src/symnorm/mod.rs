//! Symmetric-norm estimation over sliding windows.
//!
//! A grid of R repetitions by (L+1) sampling levels subsamples the universe at
//! rates 2^-i (a rate-1 row included so the largest items are recoverable
//! without subsampling). Each cell runs its own sliding-window heavy-hitter
//! instance on its substream. A query bins every reported frequency into
//! magnitude levels, estimates each level's population from the densest
//! sampling row where the level's survivors concentrate, and evaluates the
//! requested norm on the reconstructed level vector after discarding levels
//! that contribute a negligible share. One grid answers every norm whose
//! concentration bound fits its capacity.

pub mod levels;
pub mod norms;

pub use levels::{LevelBucket, LevelVector};
pub use norms::{NormDescriptor, NormKind, NormRegistry};

use crate::error::{Error, Result};
use crate::hash::{derive_seed, mix64};
use crate::hh::{HhBudget, HhConfig, HhState};

/// Survivor-count window: a sampling level is usable for a level-size
/// estimate when its per-repetition survivor count lies in
/// [C_LO, C_HI] / eps'^2.
pub const SURVIVOR_C_LO: f64 = 4.0;
pub const SURVIVOR_C_HI: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Instantiate the parameter formulas with unit constants, however large.
    Provable,
    /// Clip repetitions and floor the accuracy parameters to configured
    /// values; flags the run as nonconforming.
    Practical,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Provable => "provable",
            Mode::Practical => "practical",
        }
    }
}

/// Overrides applied in practical mode.
#[derive(Clone, Debug)]
pub struct PracticalOverrides {
    pub r_cap: usize,
    pub nu_floor: f64,
    pub eta_floor: f64,
    pub eps_prime_floor: f64,
    /// Sketch budget for each grid cell's heavy-hitter instance.
    pub cell_budget: HhBudget,
}

impl Default for PracticalOverrides {
    fn default() -> Self {
        let mut cell_budget = HhBudget {
            cs_rows: 5,
            cs_width: 1024,
            ams_groups: 4,
            ams_group_size: 4,
            ..HhBudget::default()
        };
        // Cells tolerate a coarser histogram; this costs constant-factor
        // accuracy in per-cell window estimates, which only gate reporting.
        cell_budget.compaction_ratio = 1.25;
        PracticalOverrides {
            r_cap: 64,
            nu_floor: 1e-3,
            eta_floor: 1e-3,
            eps_prime_floor: 0.1,
            cell_budget,
        }
    }
}

/// Parameters instantiated from the accuracy target and the norm-class
/// capacity. `theory_*` keep the formula values even when practical mode
/// clipped them.
#[derive(Clone, Debug)]
pub struct SelectedParams {
    pub nu: f64,
    pub eta: f64,
    pub repetitions: usize,
    pub alpha: f64,
    pub beta: f64,
    pub eps_prime: f64,
    pub nonconforming: bool,
    pub theory_nu: f64,
    pub theory_eta: f64,
    pub theory_repetitions: f64,
    pub theory_eps_prime: f64,
}

/// Instantiate (nu, eta, R, alpha, beta, eps') for accuracy `eps` and a grid
/// covering every symmetric norm with concentration bound at most `mmc_cap`:
/// nu = eps^2 / log n, eta = eps^{5/2} / (mmc * log^{5/2} n),
/// R = log^10 n / eps^5, alpha = 1 + eps, beta = eps^5 / (mmc^2 log^5 n),
/// eps' = eps^2 / log n, all with unit constants.
pub fn param_select(
    eps: f64,
    mmc_cap: f64,
    n: u64,
    mode: Mode,
    overrides: &PracticalOverrides,
) -> Result<SelectedParams> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::parameter("eps", format!("{eps} not in (0, 1/2)")));
    }
    if !(mmc_cap >= 1.0) {
        return Err(Error::parameter("mmc_cap", "must be at least 1"));
    }
    let lg = (n.max(2) as f64).log2().max(1.0);
    let theory_nu = eps * eps / lg;
    let theory_eta = eps.powf(2.5) / (mmc_cap * lg.powf(2.5));
    let theory_r = lg.powi(10) / eps.powi(5);
    let theory_eps_prime = eps * eps / lg;
    let alpha = 1.0 + eps;
    let beta = eps.powi(5) / (mmc_cap * mmc_cap * lg.powi(5));

    match mode {
        Mode::Provable => Ok(SelectedParams {
            nu: theory_nu,
            eta: theory_eta,
            repetitions: if theory_r >= usize::MAX as f64 {
                usize::MAX
            } else {
                theory_r.ceil() as usize
            },
            alpha,
            beta,
            eps_prime: theory_eps_prime,
            nonconforming: false,
            theory_nu,
            theory_eta,
            theory_repetitions: theory_r,
            theory_eps_prime,
        }),
        Mode::Practical => {
            let nu = theory_nu.max(overrides.nu_floor);
            let eta = theory_eta.max(overrides.eta_floor);
            let reps = if theory_r >= overrides.r_cap as f64 {
                overrides.r_cap
            } else {
                theory_r.ceil() as usize
            };
            let eps_prime = theory_eps_prime.max(overrides.eps_prime_floor);
            let nonconforming = nu != theory_nu
                || eta != theory_eta
                || (reps as f64) < theory_r
                || eps_prime != theory_eps_prime
                || overrides.cell_budget.nonconforming();
            Ok(SelectedParams {
                nu,
                eta,
                repetitions: reps.max(1),
                alpha,
                beta,
                eps_prime,
                nonconforming,
                theory_nu,
                theory_eta,
                theory_repetitions: theory_r,
                theory_eps_prime,
            })
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridConfig {
    pub universe: u64,
    /// Window length; `u64::MAX` means the whole stream.
    pub window: u64,
    pub eps: f64,
    /// Capacity: the grid serves every norm with mmc_bound <= mmc_cap.
    pub mmc_cap: f64,
    pub mode: Mode,
    pub overrides: PracticalOverrides,
    /// Stable nested sampling (cell i admits a superset of cell i+1) instead
    /// of fully independent per-cell sampling.
    pub nested_sampling: bool,
    pub seed: u64,
}

impl GridConfig {
    pub fn practical(universe: u64, window: u64, eps: f64, mmc_cap: f64, seed: u64) -> Self {
        GridConfig {
            universe,
            window,
            eps,
            mmc_cap,
            mode: Mode::Practical,
            overrides: PracticalOverrides::default(),
            nested_sampling: false,
            seed,
        }
    }
}

struct GridCell {
    sample_seed: u64,
    hh: HhState,
}

/// Diagnostics from a level-size estimation pass.
#[derive(Clone, Debug, Default)]
pub struct LevelDiagnostics {
    /// Levels seen in some report but left out for lack of a usable sampling
    /// row (treated as size zero).
    pub omitted_levels: Vec<i64>,
    /// (level, chosen sampling row, estimated size).
    pub chosen_rows: Vec<(i64, usize, u64)>,
}

pub struct LayerGrid {
    cfg: GridConfig,
    params: SelectedParams,
    sampling_levels: usize, // L + 1 rows, rates 2^0 .. 2^-L
    cells: Vec<GridCell>,   // row-major: level * reps + rep
    pos: u64,
}

impl LayerGrid {
    pub fn new(cfg: GridConfig) -> Result<Self> {
        let params = param_select(cfg.eps, cfg.mmc_cap, cfg.universe, cfg.mode, &cfg.overrides)?;
        let l = (cfg.universe.max(2) as f64).log2().ceil() as usize;
        let sampling_levels = l + 1;
        let budget = match cfg.mode {
            Mode::Provable => HhBudget::default(),
            Mode::Practical => cfg.overrides.cell_budget.clone(),
        };
        let mut cells = Vec::with_capacity(sampling_levels * params.repetitions);
        for level in 0..sampling_levels {
            for rep in 0..params.repetitions {
                let idx = (level * params.repetitions + rep) as u64;
                let hh_cfg = HhConfig {
                    universe: cfg.universe,
                    window: cfg.window,
                    eta: params.eta,
                    nu: params.nu,
                    seed: derive_seed(cfg.seed, 0x6365_6c6c, idx),
                    budget: budget.clone(),
                };
                // Nested mode shares the admission hash across levels of one
                // repetition; independent mode keys it per cell.
                let sample_seed = if cfg.nested_sampling {
                    derive_seed(cfg.seed, 0x6e65_7374, rep as u64)
                } else {
                    derive_seed(cfg.seed, 0x73616d70, idx)
                };
                cells.push(GridCell {
                    sample_seed,
                    hh: HhState::new(hh_cfg)?,
                });
            }
        }
        Ok(LayerGrid {
            cfg,
            params,
            sampling_levels,
            cells,
            pos: 0,
        })
    }

    pub fn params(&self) -> &SelectedParams {
        &self.params
    }

    pub fn config(&self) -> &GridConfig {
        &self.cfg
    }

    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn sampling_levels(&self) -> usize {
        self.sampling_levels
    }

    pub fn repetitions(&self) -> usize {
        self.params.repetitions
    }

    #[inline]
    fn admits(&self, cell: &GridCell, level: usize, item: u64) -> bool {
        if level == 0 {
            return true;
        }
        let h = mix64(cell.sample_seed ^ item.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        (h >> (64 - level)) == 0
    }

    /// Route one arrival to every cell whose coordinate sample admits it.
    pub fn update(&mut self, item: u64) -> Result<()> {
        if item == 0 || item > self.cfg.universe {
            return Err(Error::Range {
                item,
                universe: self.cfg.universe,
            });
        }
        self.pos += 1;
        let reps = self.params.repetitions;
        for idx in 0..self.cells.len() {
            let level = idx / reps;
            if self.admits(&self.cells[idx], level, item) {
                self.cells[idx].hh.update(item)?;
            }
        }
        Ok(())
    }

    /// Number of cells that would admit `item` (sampling diagnostics).
    pub fn admitted_cells(&self, item: u64) -> usize {
        let reps = self.params.repetitions;
        self.cells
            .iter()
            .enumerate()
            .filter(|(idx, cell)| self.admits(cell, idx / reps, item))
            .count()
    }

    /// Level-size reconstruction: bin per-cell reported frequencies, pick for
    /// every magnitude level the densest sampling row whose survivor count
    /// falls in the concentration window, rescale by the sampling rate, and
    /// shade the median down to keep the estimate one-sided.
    pub fn estimate_level_sizes(&self) -> Result<(LevelVector, LevelDiagnostics)> {
        if self.pos == 0 {
            return Err(Error::parameter("grid", "no updates processed"));
        }
        let alpha = self.params.alpha;
        let offset_bits = mix64(self.cfg.seed ^ 0x6f66_6673_6574);
        let offset = (offset_bits >> 11) as f64 / (1u64 << 53) as f64;
        let probe = LevelVector::empty(alpha, offset, self.cfg.universe)?;

        let reps = self.params.repetitions;
        // survivor counts: level -> per (sampling row, rep) counts
        let mut counts: std::collections::BTreeMap<i64, Vec<u32>> =
            std::collections::BTreeMap::new();
        for (idx, cell) in self.cells.iter().enumerate() {
            let row = idx / reps;
            let rep = idx % reps;
            for r in cell.hh.report() {
                let level = probe.level_of(r.f_hat as f64);
                counts
                    .entry(level)
                    .or_insert_with(|| vec![0; self.sampling_levels * reps])[row * reps + rep] +=
                    1;
            }
        }

        let eps_prime = self.params.eps_prime;
        let lo = SURVIVOR_C_LO / (eps_prime * eps_prime);
        let hi = SURVIVOR_C_HI / (eps_prime * eps_prime);
        let mut buckets = Vec::new();
        let mut diag = LevelDiagnostics::default();
        for (&level, per_cell) in counts.iter() {
            let mut chosen: Option<usize> = None;
            for row in 0..self.sampling_levels {
                let med = lower_median(&per_cell[row * reps..(row + 1) * reps]);
                let med = med as f64;
                if (med >= lo && med <= hi) || (row == 0 && med >= 1.0 && med <= hi) {
                    chosen = Some(row);
                    break;
                }
            }
            let Some(row) = chosen else {
                diag.omitted_levels.push(level);
                continue;
            };
            let mut scaled: Vec<f64> = (0..reps)
                .map(|rep| per_cell[row * reps + rep] as f64 * (1u64 << row) as f64)
                .collect();
            scaled.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            let med = scaled[(reps - 1) / 2];
            let shaded = ((1.0 - eps_prime / 2.0) * med).floor();
            let b_hat = if med >= 1.0 && shaded < 1.0 {
                1
            } else {
                shaded as u64
            };
            let b_hat = b_hat.min(self.cfg.universe);
            if b_hat > 0 {
                buckets.push(LevelBucket {
                    level,
                    count: b_hat,
                });
                diag.chosen_rows.push((level, row, b_hat));
            }
        }
        // Clamp the total to the universe (counts are per-level one-sided but
        // binning noise could in principle overfill).
        let lv = LevelVector::new(alpha, offset, self.cfg.universe, buckets)?;
        Ok((lv, diag))
    }

    /// Full pipeline for one norm. Errors with `Capacity` when the norm's
    /// concentration bound exceeds what the grid was sized for.
    pub fn estimate(&self, norm: &NormDescriptor) -> Result<f64> {
        self.check_capacity(norm)?;
        let (lv, _) = self.estimate_level_sizes()?;
        reconstruct_norm(&lv, norm, self.params.beta)
    }

    pub fn check_capacity(&self, norm: &NormDescriptor) -> Result<()> {
        let needed = norm.mmc_bound(self.cfg.universe);
        if needed > self.cfg.mmc_cap {
            return Err(Error::Capacity {
                norm: norm.name().to_string(),
                needed,
                cap: self.cfg.mmc_cap,
            });
        }
        Ok(())
    }

    /// Reconstruct a norm from an already-computed level vector (the
    /// universal-sketch path: one level vector, many norms).
    pub fn reconstruct(&self, lv: &LevelVector, norm: &NormDescriptor) -> Result<f64> {
        self.check_capacity(norm)?;
        reconstruct_norm(lv, norm, self.params.beta)
    }

    /// Total stored entries across all cells (space accounting).
    pub fn space_entries(&self) -> u64 {
        self.cells
            .iter()
            .map(|c| {
                let sp = c.hh.space_report();
                sp.countsketch_cells + sp.counters + sp.snapshot_entries
            })
            .sum()
    }
}

fn lower_median(counts: &[u32]) -> u32 {
    let mut v: Vec<u32> = counts.to_vec();
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

/// Evaluate `norm` on the level vector after dropping every bucket whose
/// single-bucket norm is below `beta` times the whole; empty input gives 0.
pub fn reconstruct_norm(lv: &LevelVector, norm: &NormDescriptor, beta: f64) -> Result<f64> {
    if lv.is_empty() {
        return Ok(0.0);
    }
    let whole = norm.evaluate_levels(lv)?;
    if whole <= 0.0 {
        return Ok(0.0);
    }
    let keep: Vec<usize> = (0..lv.buckets().len())
        .filter(|&i| {
            norm.evaluate_levels(&lv.single(i))
                .map(|c| c >= beta * whole)
                .unwrap_or(false)
        })
        .collect();
    if keep.is_empty() {
        return Ok(0.0);
    }
    norm.evaluate_levels(&lv.restricted(&keep))
}

/// One estimator result, serializable as a CSV row.
#[derive(Clone, Debug)]
pub struct EstimateRecord {
    pub norm: String,
    pub window: u64,
    pub eps: f64,
    pub mode: String,
    pub estimate: f64,
    pub exact: Option<f64>,
    pub relative_error: Option<f64>,
    pub seed: u64,
}

impl EstimateRecord {
    pub const CSV_HEADER: &'static str = "norm,W,eps,mode,estimate,exact,relative_error,seed";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.norm,
            self.window,
            self.eps,
            self.mode,
            self.estimate,
            self.exact.map_or(String::new(), |v| v.to_string()),
            self.relative_error
                .map_or(String::new(), |v| v.to_string()),
            self.seed
        )
    }
}
