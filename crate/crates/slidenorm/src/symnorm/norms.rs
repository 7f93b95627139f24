//! Symmetric norm descriptors: closed-form evaluation on dense vectors and on
//! compressed level vectors, plus the concentration bound that sizes sketches.

use crate::error::{Error, Result};
use crate::symnorm::levels::LevelVector;
use std::collections::BTreeMap;

/// Expansion guard for evaluations that fall back to materializing a level
/// vector (k-support only).
const MAX_EXPANSION: u64 = 1 << 21;

#[derive(Clone, Debug, PartialEq)]
pub enum NormKind {
    /// L_p for p >= 1.
    Lp { p: f64 },
    /// Sum of the k largest magnitudes.
    TopK { k: u64 },
    /// k-support norm: tightest convex relaxation of (k-sparse, L2-bounded).
    KSupport { k: u64 },
    /// Box norm: only the concentration preset ships; evaluation is an
    /// optimization problem and is out of scope.
    Box { a: f64, b: f64, c: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormDescriptor {
    name: String,
    kind: NormKind,
}

impl NormDescriptor {
    pub fn lp(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::parameter("p", format!("{p} must be >= 1")));
        }
        let name = if (p - p.round()).abs() < 1e-12 {
            format!("l{}", p.round() as u64)
        } else {
            format!("lp:{p}")
        };
        Ok(NormDescriptor {
            name,
            kind: NormKind::Lp { p },
        })
    }

    pub fn l1() -> Self {
        Self::lp(1.0).unwrap()
    }

    pub fn l2() -> Self {
        Self::lp(2.0).unwrap()
    }

    pub fn l3() -> Self {
        Self::lp(3.0).unwrap()
    }

    pub fn top_k(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::parameter("k", "must be positive"));
        }
        Ok(NormDescriptor {
            name: format!("topk:{k}"),
            kind: NormKind::TopK { k },
        })
    }

    pub fn k_support(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::parameter("k", "must be positive"));
        }
        Ok(NormDescriptor {
            name: format!("ksupport:{k}"),
            kind: NormKind::KSupport { k },
        })
    }

    pub fn box_norm(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(0.0 < a && a < b && b <= c) {
            return Err(Error::parameter("box", "need 0 < a < b <= c"));
        }
        Ok(NormDescriptor {
            name: format!("box:{a}:{b}:{c}"),
            kind: NormKind::Box { a, b, c },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    /// Unit-constant instantiation of the concentration presets: log2(n) for
    /// the quadratically-generated class (L_p with p <= 2, k-support, box),
    /// n^(1/2 - 1/p) for L_p with p > 2, sqrt(n/k) for top-k.
    pub fn mmc_bound(&self, n: u64) -> f64 {
        let lg = (n.max(2) as f64).log2().max(1.0);
        match self.kind {
            NormKind::Lp { p } if p > 2.0 => (n as f64).powf(0.5 - 1.0 / p),
            NormKind::Lp { .. } => lg,
            NormKind::TopK { k } => (n as f64 / k as f64).max(1.0).sqrt(),
            NormKind::KSupport { .. } => lg,
            NormKind::Box { .. } => lg,
        }
    }

    /// Evaluate on an explicit vector (entries may be any sign).
    pub fn evaluate_dense(&self, v: &[f64]) -> Result<f64> {
        match self.kind {
            NormKind::Lp { p } => Ok(lp_dense(v, p)),
            NormKind::TopK { k } => {
                let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
                mags.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
                Ok(mags.iter().take(k as usize).sum())
            }
            NormKind::KSupport { k } => {
                let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
                mags.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
                Ok(k_support_sorted(&mags, k))
            }
            NormKind::Box { .. } => Err(Error::Unsupported(
                "box norm evaluation is minimization-defined and not provided".into(),
            )),
        }
    }

    /// Evaluate on a level vector without expanding it (k-support expands
    /// internally, guarded by an expansion cap).
    pub fn evaluate_levels(&self, lv: &LevelVector) -> Result<f64> {
        match self.kind {
            NormKind::Lp { p } => {
                let mut acc = 0.0;
                for b in lv.buckets() {
                    acc += b.count as f64 * lv.value(b.level).powf(p);
                }
                Ok(acc.powf(1.0 / p))
            }
            NormKind::TopK { k } => {
                // Fill k slots greedily from the largest level down.
                let mut remaining = k;
                let mut acc = 0.0;
                for b in lv.buckets().iter().rev() {
                    if remaining == 0 {
                        break;
                    }
                    let take = b.count.min(remaining);
                    acc += take as f64 * lv.value(b.level);
                    remaining -= take;
                }
                Ok(acc)
            }
            NormKind::KSupport { k } => {
                if lv.total_count() > MAX_EXPANSION {
                    return Err(Error::Numeric(format!(
                        "k-support expansion of {} entries exceeds cap",
                        lv.total_count()
                    )));
                }
                let mut mags = lv.expanded();
                mags.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
                Ok(k_support_sorted(&mags, k))
            }
            NormKind::Box { .. } => Err(Error::Unsupported(
                "box norm evaluation is minimization-defined and not provided".into(),
            )),
        }
    }
}

fn lp_dense(v: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        v.iter().map(|x| x.abs()).sum()
    } else if p == 2.0 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    } else {
        v.iter()
            .map(|x| x.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

/// k-support norm of a magnitude vector sorted in descending order: split the
/// vector into an untouched head and an averaged tail, where r in [0, k-1] is
/// the unique index with x_{k-r-1} > (tail sum)/(r+1) >= x_{k-r} (1-based,
/// x_0 = infinity).
fn k_support_sorted(sorted: &[f64], k: u64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    let k = (k as usize).min(n);
    if k == n {
        return sorted.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    // suffix[i] = sum of sorted[i..].
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + sorted[i];
    }
    for r in 0..k {
        let head_end = k - r - 1; // entries [0, head_end) stay squared
        let tail_sum = suffix[head_end];
        let avg = tail_sum / (r as f64 + 1.0);
        let head_ok = head_end == 0 || sorted[head_end - 1] > avg;
        let tail_ok = avg >= sorted[head_end] - 1e-12;
        if head_ok && tail_ok {
            let head_sq: f64 = sorted[..head_end].iter().map(|x| x * x).sum();
            return (head_sq + tail_sum * tail_sum / (r as f64 + 1.0)).sqrt();
        }
    }
    // Fallback: fully averaged tail (r = k-1 always satisfies head_ok).
    let tail_sum = suffix[0];
    (tail_sum * tail_sum / k as f64).sqrt()
}

/// Name-keyed registry. `standard()` ships l1, l2, l3; parameterized norms
/// are added through `register` or parsed from specs like "lp:2.5",
/// "topk:100", "ksupport:8".
#[derive(Clone, Debug, Default)]
pub struct NormRegistry {
    map: BTreeMap<String, NormDescriptor>,
}

impl NormRegistry {
    pub fn standard() -> Self {
        let mut reg = NormRegistry::default();
        reg.register(NormDescriptor::l1());
        reg.register(NormDescriptor::l2());
        reg.register(NormDescriptor::l3());
        reg
    }

    pub fn register(&mut self, norm: NormDescriptor) {
        self.map.insert(norm.name().to_string(), norm);
    }

    pub fn get(&self, name: &str) -> Option<&NormDescriptor> {
        self.map.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(|s| s.as_str())
    }

    /// Parse "l1" / "l2" / "l3" / "lp:<p>" / "topk:<k>" / "ksupport:<k>" /
    /// "box:<a>:<b>:<c>".
    pub fn parse(spec: &str) -> Result<NormDescriptor> {
        let mut parts = spec.split(':');
        let head = parts.next().unwrap_or("");
        let rest: Vec<&str> = parts.collect();
        let bad = |why: String| Error::parameter("norm", why);
        match (head, rest.as_slice()) {
            ("l1", []) => Ok(NormDescriptor::l1()),
            ("l2", []) => Ok(NormDescriptor::l2()),
            ("l3", []) => Ok(NormDescriptor::l3()),
            ("lp", [p]) => NormDescriptor::lp(
                p.parse::<f64>()
                    .map_err(|e| bad(format!("bad p `{p}`: {e}")))?,
            ),
            ("topk", [k]) => NormDescriptor::top_k(
                k.parse::<u64>()
                    .map_err(|e| bad(format!("bad k `{k}`: {e}")))?,
            ),
            ("ksupport", [k]) => NormDescriptor::k_support(
                k.parse::<u64>()
                    .map_err(|e| bad(format!("bad k `{k}`: {e}")))?,
            ),
            ("box", [a, b, c]) => {
                let p = |s: &str| {
                    s.parse::<f64>()
                        .map_err(|e| bad(format!("bad box bound `{s}`: {e}")))
                };
                NormDescriptor::box_norm(p(a)?, p(b)?, p(c)?)
            }
            _ => Err(bad(format!("unrecognized norm spec `{spec}`"))),
        }
    }
}
