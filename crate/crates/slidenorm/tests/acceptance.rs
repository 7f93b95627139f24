//! Acceptance suite: every test prints one PASS line with its measured
//! numbers (visible under `cargo test --test acceptance -- --nocapture`).
//! Tolerances and thresholds are pinned in code, not configuration.

use rayon::prelude::*;
use slidenorm::hh::{HhConfig, HhState};
use slidenorm::lab::{
    baseline_uniform, gaussian_rows, generate, BaselineMode, ExactWindowOracle, Stream,
    StreamVariant, SyntheticSpec,
};
use slidenorm::orlicz::{
    orlicz_norm, solve_coreset_regression, solve_regression, stream_sample, GFunc,
    OnlineSampler, RegressionOptions, SamplerConfig, WindowCoreset, WindowCoresetConfig,
};
use slidenorm::sketch::{ApproxCounter, SuffixL2Estimator};
use slidenorm::symnorm::{
    reconstruct_norm, GridConfig, LayerGrid, LevelVector, NormDescriptor,
};
use std::collections::HashMap;
use std::sync::OnceLock;

const UNIVERSE: u64 = 1 << 16;
const M_GRID: [u64; 6] = [1 << 10, 1 << 11, 1 << 12, 1 << 13, 1 << 14, 1 << 15];

fn appc(m: u64, seed: u64) -> Stream {
    generate(&SyntheticSpec {
        m,
        n: UNIVERSE,
        seed,
        variant: StreamVariant::AppendixC,
    })
    .expect("valid appendix-c spec")
}

fn zipf(m: u64, seed: u64) -> Stream {
    generate(&SyntheticSpec {
        m,
        n: UNIVERSE,
        seed,
        variant: StreamVariant::Zipf { s: 1.1 },
    })
    .expect("valid zipf spec")
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn rel_err(est: f64, exact: f64) -> f64 {
    (est - exact).abs() / exact
}

// ---------------------------------------------------------------------------
// Criteria 1 + 2 share one sweep: the heavy-hitter contract and its space
// budgets are checked on identical runs.
// ---------------------------------------------------------------------------

struct HhSweep {
    runs: usize,
    completeness_violations: usize,
    soundness_violations: usize,
    sandwich_violations: usize,
    cardinality_violations: u64,
    candidate_cap_violations: usize,
    max_timestamps_over_bound: usize,
}

fn hh_sweep() -> &'static HhSweep {
    static SWEEP: OnceLock<HhSweep> = OnceLock::new();
    SWEEP.get_or_init(|| {
        const ETA: f64 = 0.1;
        const NU: f64 = 0.2;
        const SEEDS: u64 = 50;
        let configs: Vec<(u64, u64)> = M_GRID
            .iter()
            .flat_map(|&m| [(m, m), (m, m / 2)])
            .collect();
        let per_run: Vec<(usize, usize, usize, u64, usize, usize)> = configs
            .par_iter()
            .flat_map(|&(m, w)| {
                (0..SEEDS).into_par_iter().map(move |s| (m, w, s))
            })
            .map(|(m, w, s)| {
                let stream = appc(m, 0x5000 + s * 7919 + m);
                let mut st = HhState::new(HhConfig::new(UNIVERSE, w, ETA, NU, 0x9000 + s * 31 + m))
                    .expect("valid config");
                let mut oracle = ExactWindowOracle::new(w);
                for &x in &stream.items {
                    st.update(x).expect("in-range item");
                    oracle.push(x);
                }
                let report = st.report();
                let reported: HashMap<u64, u64> =
                    report.iter().map(|r| (r.item, r.f_hat)).collect();
                let l2 = oracle.l2();

                let mut completeness = 0;
                for heavy in oracle.heavy_set(ETA) {
                    if !reported.contains_key(&heavy) {
                        completeness += 1;
                    }
                }
                let mut soundness = 0;
                let mut sandwich = 0;
                for r in &report {
                    let f = oracle.count(r.item);
                    if (f as f64) <= ETA / 8.0 * l2 {
                        soundness += 1;
                    }
                    if !(r.f_hat <= f && f as f64 <= (1.0 + NU) * r.f_hat as f64) {
                        sandwich += 1;
                    }
                }
                let sp = st.space_report();
                let cap_viol = usize::from(sp.max_candidates_per_timestamp > sp.candidate_cap)
                    + sp.admission_refusals as usize;
                let ts_over = usize::from(sp.max_timestamps > sp.timestamp_bound);
                (
                    completeness,
                    soundness,
                    sandwich,
                    sp.cardinality_violations,
                    cap_viol,
                    ts_over,
                )
            })
            .collect();
        let mut sweep = HhSweep {
            runs: per_run.len(),
            completeness_violations: 0,
            soundness_violations: 0,
            sandwich_violations: 0,
            cardinality_violations: 0,
            candidate_cap_violations: 0,
            max_timestamps_over_bound: 0,
        };
        for (c, s, fs, card, cap, ts) in per_run {
            sweep.completeness_violations += c;
            sweep.soundness_violations += s;
            sweep.sandwich_violations += fs;
            sweep.cardinality_violations += card;
            sweep.candidate_cap_violations += cap;
            sweep.max_timestamps_over_bound += ts;
        }
        sweep
    })
}

#[test]
fn criterion_1_heavy_hitter_contract() {
    let s = hh_sweep();
    let ok = s.completeness_violations == 0
        && s.soundness_violations == 0
        && s.sandwich_violations == 0;
    println!(
        "criterion 1 (heavy-hitter contract): {} — {} runs, missed-heavy={} below-eta/8-reported={} sandwich-violations={}",
        if ok { "PASS" } else { "FAIL" },
        s.runs,
        s.completeness_violations,
        s.soundness_violations,
        s.sandwich_violations
    );
    assert!(ok);
}

#[test]
fn criterion_2_space_budgets() {
    let s = hh_sweep();
    let ok = s.cardinality_violations == 0
        && s.candidate_cap_violations == 0
        && s.max_timestamps_over_bound == 0;
    println!(
        "criterion 2 (space budgets): {} — {} runs, timestamp-bound-violations={} candidate-cap-violations={}",
        if ok { "PASS" } else { "FAIL" },
        s.runs,
        s.cardinality_violations + s.max_timestamps_over_bound as u64,
        s.candidate_cap_violations
    );
    assert!(ok);
}

// ---------------------------------------------------------------------------
// Criterion 3: exhaustive counter sandwich.
// ---------------------------------------------------------------------------

#[test]
fn criterion_3_counter_sandwich() {
    let m = 10_000u64;
    // Occurrence patterns: every position, and a pseudorandom half.
    let dense: Vec<u64> = (1..=m).collect();
    let sparse: Vec<u64> = (1..=m).filter(|p| (p * 2654435761) % 97 < 48).collect();
    let mut checks = 0u64;
    let mut violations = 0u64;
    for eta in [0.05f64, 0.2] {
        for occ in [&dense, &sparse] {
            // prefix[p] = occurrences at positions <= p
            let mut prefix = vec![0u64; (m + 1) as usize];
            let mut it = occ.iter().peekable();
            let mut c = 0u64;
            for p in 1..=m {
                if it.peek() == Some(&&p) {
                    c += 1;
                    it.next();
                }
                prefix[p as usize] = c;
            }
            for t in 1..=m {
                let mut ctr = ApproxCounter::new(t, eta).expect("valid accuracy");
                let first = occ.partition_point(|&p| p < t);
                for &p in &occ[first..] {
                    ctr.record(p).expect("in order");
                }
                for u in t..=m {
                    let truth = prefix[u as usize] - prefix[(t - 1) as usize];
                    let est = ctr.query(u).expect("u >= t");
                    checks += 1;
                    if !(est <= truth && truth as f64 <= (1.0 + eta / 4.0) * est as f64) {
                        violations += 1;
                    }
                }
            }
        }
    }
    println!(
        "criterion 3 (counter sandwich): {} — {checks} (t,u) checks, {violations} violations",
        if violations == 0 { "PASS" } else { "FAIL" }
    );
    assert_eq!(violations, 0);
}

// ---------------------------------------------------------------------------
// Criterion 4: smooth-histogram window-L2 estimates.
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_suffix_l2_estimator() {
    let m = 1u64 << 15;
    let mut total = 0u64;
    let mut failures = 0u64;
    for (name, stream) in [("appendix-c", appc(m, 401)), ("zipf", zipf(m, 402))] {
        let _ = name;
        // Exact suffix F2 by walking the stream backwards.
        let mut f2 = vec![0f64; (m + 1) as usize];
        let mut counts: HashMap<u64, u64> = HashMap::new();
        let mut acc = 0f64;
        for (k, &x) in stream.items.iter().rev().enumerate() {
            let c = counts.entry(x).or_default();
            acc += (2 * *c + 1) as f64;
            *c += 1;
            f2[k + 1] = acc;
        }
        for sketch_seed in 0..5u64 {
            let mut est = SuffixL2Estimator::new(UNIVERSE, 0xacc + sketch_seed).unwrap();
            for &x in &stream.items {
                est.update(x).unwrap();
            }
            // 200 pseudorandom window lengths per sketch.
            for q in 0..200u64 {
                let w = (slidenorm::hash::mix64(q * 977 + sketch_seed) % m) + 1;
                let exact = f2[w as usize].sqrt();
                let f = est.query(w).unwrap();
                total += 1;
                if !(f <= exact && exact <= 2.0 * f) {
                    failures += 1;
                }
            }
        }
    }
    let rate = failures as f64 / total as f64;
    println!(
        "criterion 4 (window L2 sandwich): {} — {failures}/{total} failures ({:.2}%), budget 1%",
        if rate <= 0.01 { "PASS" } else { "FAIL" },
        rate * 100.0
    );
    assert!(rate <= 0.01, "failure rate {rate}");
}

// ---------------------------------------------------------------------------
// Criterion 5: symmetric-norm estimation, one universal grid per run.
// ---------------------------------------------------------------------------

#[test]
fn criterion_5_symmetric_norm_estimation() {
    let m = 1u64 << 15;
    let eps = 0.2;
    let seeds = 20u64;
    let norms = [
        NormDescriptor::l1(),
        NormDescriptor::l2(),
        NormDescriptor::l3(),
        NormDescriptor::top_k(UNIVERSE / 8).unwrap(),
    ];
    let mmc_cap = norms
        .iter()
        .map(|n| n.mmc_bound(UNIVERSE))
        .fold(1.0f64, f64::max);

    let mut all_ok = true;
    for variant in ["appendix-c", "zipf"] {
        // per-norm relative errors across seeds
        let errors: Vec<Vec<f64>> = (0..seeds)
            .into_par_iter()
            .map(|s| {
                let stream = if variant == "appendix-c" {
                    appc(m, 0x500 + s)
                } else {
                    zipf(m, 0x600 + s)
                };
                let mut cfg = GridConfig::practical(UNIVERSE, m, eps, mmc_cap, 0x700 + s);
                cfg.overrides.r_cap = 5;
                let mut grid = LayerGrid::new(cfg).expect("valid grid");
                let mut oracle = ExactWindowOracle::new(m);
                for &x in &stream.items {
                    grid.update(x).expect("in range");
                    oracle.push(x);
                }
                assert!(grid.params().nonconforming, "practical mode flags the run");
                // Universal sketch: one level vector answers all four norms.
                let (lv, _diag) = grid.estimate_level_sizes().expect("grid queried");
                norms
                    .iter()
                    .map(|n| {
                        let est = grid.reconstruct(&lv, n).expect("norm fits capacity");
                        let exact = oracle.norm(n).expect("oracle norm");
                        rel_err(est, exact)
                    })
                    .collect::<Vec<f64>>()
            })
            .collect();
        for (j, n) in norms.iter().enumerate() {
            let mut errs: Vec<f64> = errors.iter().map(|e| e[j]).collect();
            let med = median(&mut errs);
            let ok = med <= eps;
            all_ok &= ok;
            println!(
                "criterion 5 (symmetric norms, {variant}/{}): {} — median rel err {:.4} (eps {eps}, {seeds} seeds, universal grid)",
                n.name(),
                if ok { "PASS" } else { "FAIL" },
                med
            );
        }
    }
    assert!(all_ok);
}

// ---------------------------------------------------------------------------
// Criterion 6: level-vector machinery, exact.
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_level_machinery() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(606);
    let norms = [
        NormDescriptor::l1(),
        NormDescriptor::l2(),
        NormDescriptor::l3(),
        NormDescriptor::top_k(64).unwrap(),
        NormDescriptor::k_support(16).unwrap(),
    ];
    let mut rounding_checks = 0;
    let mut drop_checks = 0;
    let mut closed_form_checks = 0;
    for trial in 0..50 {
        let n_entries = rng.random_range(1..=2000usize) * if trial % 7 == 0 { 5 } else { 1 };
        let alpha = 1.0 + rng.random_range(0.05..0.5);
        let offset = rng.random_range(0.0..1.0);
        let v: Vec<f64> = (0..n_entries)
            .map(|_| (rng.random_range(0.0..8.0f64)).exp2())
            .collect();
        let lv = LevelVector::from_exact(alpha, offset, 1 << 20, &v).unwrap();
        let expansion = lv.expanded();
        for norm in &norms {
            // Rounding: l(x) <= l(V(x)) <= alpha * l(x).
            let lx = norm.evaluate_dense(&v).unwrap();
            let lvx = norm.evaluate_levels(&lv).unwrap();
            assert!(
                lx <= lvx * (1.0 + 1e-9) && lvx <= alpha * lx * (1.0 + 1e-9),
                "{}: l(x)={lx} l(V)={lvx} alpha={alpha}",
                norm.name()
            );
            rounding_checks += 1;
            // Closed forms equal the expanded-vector computation.
            let dense = norm.evaluate_dense(&expansion).unwrap();
            assert!(
                (lvx - dense).abs() <= 1e-10 * dense.max(1.0),
                "{}: levels {lvx} vs expansion {dense}",
                norm.name()
            );
            closed_form_checks += 1;
            // Beta-drop bound: l(V') >= (1 - #buckets * beta) l(V-hat).
            let beta = rng.random_range(0.0..0.2) / lv.buckets().len() as f64;
            let pruned = reconstruct_norm(&lv, norm, beta).unwrap();
            let bound = (1.0 - lv.buckets().len() as f64 * beta) * lvx;
            assert!(
                pruned >= bound - 1e-9 * lvx && pruned <= lvx * (1.0 + 1e-12),
                "{}: pruned {pruned} below bound {bound}",
                norm.name()
            );
            drop_checks += 1;
        }
    }
    println!(
        "criterion 6 (level machinery): PASS — {rounding_checks} rounding, {drop_checks} beta-drop, {closed_form_checks} closed-form checks"
    );
}

// ---------------------------------------------------------------------------
// Criterion 7: Orlicz subspace embedding on Gaussian streams.
// ---------------------------------------------------------------------------

/// Largest and smallest eigenvalues of a small symmetric matrix (Jacobi).
fn sym_eig_extremes(a: &[Vec<f64>]) -> (f64, f64) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for _ in 0..200 {
        let mut p = 0;
        let mut q = 1;
        let mut big = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                if m[i][j].abs() > big {
                    big = m[i][j].abs();
                    p = i;
                    q = j;
                }
            }
        }
        if big < 1e-14 {
            break;
        }
        let theta = 0.5 * (2.0 * m[p][q]).atan2(m[p][p] - m[q][q]);
        let (c, s) = (theta.cos(), theta.sin());
        for k in 0..n {
            let (mkp, mkq) = (m[k][p], m[k][q]);
            m[k][p] = c * mkp + s * mkq;
            m[k][q] = -s * mkp + c * mkq;
        }
        for k in 0..n {
            let (mpk, mqk) = (m[p][k], m[q][k]);
            m[p][k] = c * mpk + s * mqk;
            m[q][k] = -s * mpk + c * mqk;
        }
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..n {
        lo = lo.min(m[i][i]);
        hi = hi.max(m[i][i]);
    }
    (hi, lo)
}

fn g_norm(values: &[f64], g: &GFunc) -> f64 {
    orlicz_norm(values, g, 1e-9).expect("finite values")
}

fn weighted_g_norm(values: &[f64], weights: &[f64], g: &GFunc) -> f64 {
    slidenorm::orlicz::weighted_orlicz_norm(values, weights, g, 1e-9).expect("finite values")
}

#[test]
fn criterion_7_orlicz_embedding() {
    let n = 1024usize;
    let d = 4usize;
    let eps = 0.25;
    let seeds = 50u64;
    let dirs = 1000usize;
    let mut all_ok = true;
    for g in [GFunc::Square, GFunc::Abs, GFunc::huber()] {
        let results: Vec<(bool, bool)> = (0..seeds)
            .into_par_iter()
            .map(|seed| {
                use rand::{Rng, SeedableRng};
                let rows = gaussian_rows(n, d, false, 0x7000 + seed);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x7100 + seed);
                let probes: Vec<Vec<f64>> = (0..dirs)
                    .map(|_| {
                        let v: Vec<f64> = (0..d)
                            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
                            .collect();
                        let nm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                        v.into_iter().map(|x| x / nm).collect()
                    })
                    .collect();
                // Measured inner-product range over the probe set.
                let mut d1 = f64::INFINITY;
                let mut d2 = 0.0f64;
                let mut products = vec![vec![0.0f64; n]; dirs];
                for (j, x) in probes.iter().enumerate() {
                    for (i, a) in rows.iter().enumerate() {
                        let p: f64 = a.iter().zip(x.iter()).map(|(u, v)| u * v).sum();
                        products[j][i] = p;
                        let ap = p.abs();
                        if ap > 1e-12 {
                            d1 = d1.min(ap);
                        }
                        d2 = d2.max(ap);
                    }
                }
                let delta = g.aspect_ratio(d1, d2).expect("positive range");
                let coreset = stream_sample(
                    rows.iter().map(|r| r.as_slice()),
                    SamplerConfig {
                        dim: d,
                        eps,
                        delta,
                        oversample: 1.0,
                        n_hint: n as u64,
                        seed: 0x7200 + seed,
                    },
                )
                .expect("sampler runs");
                // Embedding band on every probe direction.
                let weights: Vec<f64> = coreset.iter().map(|r| r.weight).collect();
                let mut band_ok = true;
                for (j, _x) in probes.iter().enumerate() {
                    let full = g_norm(&products[j], &g);
                    let sampled: Vec<f64> = coreset
                        .iter()
                        .map(|r| products[j][(r.index - 1) as usize])
                        .collect();
                    let emb = weighted_g_norm(&sampled, &weights, &g);
                    if (emb - full).abs() > eps * full {
                        band_ok = false;
                        break;
                    }
                }
                // Sampled-row budget with measured Delta and kappa, C = 1,
                // 8x slack.
                let mut ata = vec![vec![0.0f64; d]; d];
                for a in &rows {
                    for i in 0..d {
                        for j in 0..d {
                            ata[i][j] += a[i] * a[j];
                        }
                    }
                }
                let (hi, lo) = sym_eig_extremes(&ata);
                let kappa = (hi / lo.max(1e-300)).sqrt();
                let bound = 8.0
                    * (d * d) as f64
                    * delta
                    / (eps * eps)
                    * (n as f64).ln().powi(2)
                    * kappa.ln().max(1.0_f64.ln_1p());
                let budget_ok = (coreset.len() as f64) <= bound.max(1.0);
                (band_ok, budget_ok)
            })
            .collect();
        let band_passes = results.iter().filter(|r| r.0).count();
        let budget_passes = results.iter().filter(|r| r.1).count();
        let ok = band_passes >= 45 && budget_passes == seeds as usize;
        all_ok &= ok;
        println!(
            "criterion 7 (orlicz embedding, {}): {} — band {band_passes}/{seeds} (need 45), budget {budget_passes}/{seeds}",
            g.name(),
            if ok { "PASS" } else { "FAIL" }
        );
    }
    assert!(all_ok);
}

// ---------------------------------------------------------------------------
// Criterion 8: online-coreset prefix property and its sliding-window variant.
// ---------------------------------------------------------------------------

#[test]
fn criterion_8_online_coreset_prefix_property() {
    use rand::{Rng, SeedableRng};
    let n = 256usize;
    let d = 3usize;
    let eps = 0.3;
    let seeds = 20u64;
    let dirs = 1000usize;
    // The loss here is G(t) = |t|: its Orlicz norm is the plain L1 sum, which
    // updates in O(1) per prefix so all 256 prefixes can be checked exactly.
    let prefix_results: Vec<bool> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let rows = gaussian_rows(n, d, false, 0x8000 + seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x8100 + seed);
            let probes: Vec<Vec<f64>> = (0..dirs)
                .map(|_| (0..d).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect())
                .collect();
            let mut sampler = OnlineSampler::new(SamplerConfig {
                dim: d,
                eps,
                delta: 1.0,
                oversample: 1.0,
                n_hint: n as u64,
                seed: 0x8200 + seed,
            })
            .expect("valid sampler");
            let mut full = vec![0.0f64; dirs];
            let mut emb = vec![0.0f64; dirs];
            let mut ok = true;
            for (i, row) in rows.iter().enumerate() {
                let sampled = sampler.push(row).expect("row fits");
                for (j, x) in probes.iter().enumerate() {
                    let p: f64 = row.iter().zip(x.iter()).map(|(u, v)| u * v).sum();
                    full[j] += p.abs();
                    if sampled {
                        let w = sampler.coreset().last().unwrap().weight;
                        emb[j] += w * p.abs();
                    }
                }
                let _ = i;
                for j in 0..dirs {
                    if full[j] > 0.0 && (emb[j] - full[j]).abs() > eps * full[j] {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    break;
                }
            }
            ok
        })
        .collect();
    let prefix_passes = prefix_results.iter().filter(|&&b| b).count();

    let window = 128u64;
    let window_results: Vec<(bool, usize)> = (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let rows = gaussian_rows(n, d, false, 0x8300 + seed);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x8400 + seed);
            let probes: Vec<Vec<f64>> = (0..dirs)
                .map(|_| (0..d).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect())
                .collect();
            let mut wc = WindowCoreset::new(WindowCoresetConfig {
                window,
                dim: d,
                eps,
                delta: 1.0,
                oversample: 1.0,
                n_hint: n as u64,
                seed: 0x8500 + seed,
            })
            .expect("valid window coreset");
            for row in &rows {
                wc.push(row).expect("row fits");
            }
            let coreset = wc.query();
            let boundary = (n as u64) - window + 1;
            let mut ok = true;
            for x in &probes {
                let mut full = 0.0;
                for row in &rows[(boundary - 1) as usize..] {
                    full += row
                        .iter()
                        .zip(x.iter())
                        .map(|(u, v)| u * v)
                        .sum::<f64>()
                        .abs();
                }
                let mut emb = 0.0;
                for r in &coreset {
                    emb += r.weight
                        * rows[(r.index - 1) as usize]
                            .iter()
                            .zip(x.iter())
                            .map(|(u, v)| u * v)
                            .sum::<f64>()
                            .abs();
                }
                if (emb - full).abs() > eps * full {
                    ok = false;
                    break;
                }
            }
            (ok, wc.max_checkpoints_seen())
        })
        .collect();
    let window_passes = window_results.iter().filter(|r| r.0).count();
    let checkpoint_cap = 4 * (n as f64).log2() as usize;
    let checkpoints_ok = window_results.iter().all(|r| r.1 <= checkpoint_cap);

    let ok = prefix_passes >= 18 && window_passes >= 18 && checkpoints_ok;
    println!(
        "criterion 8 (online coreset): {} — prefix {prefix_passes}/{seeds}, window {window_passes}/{seeds} (need 18), checkpoints <= {checkpoint_cap}: {checkpoints_ok}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok);
}

// ---------------------------------------------------------------------------
// Criterion 9: regression on the coreset vs the dense solve.
// ---------------------------------------------------------------------------

#[test]
fn criterion_9_coreset_regression() {
    let n = 1024usize;
    let d = 4usize;
    let eps = 0.25;
    let g = GFunc::huber();
    let instances = 20u64;
    let results: Vec<(f64, f64)> = (0..instances)
        .into_par_iter()
        .map(|seed| {
            let rows = gaussian_rows(n, d, true, 0x9100 + seed); // d cols + response
            let plain: Vec<(Vec<f64>, f64)> = rows
                .iter()
                .map(|r| (r[..d].to_vec(), r[d]))
                .collect();
            let ones = vec![1.0; n];
            let dense =
                solve_regression(&plain, &ones, &g, &RegressionOptions::default()).expect("dense");

            // Responses ride along as column d+1 through the sampler.
            let d1 = 1e-3;
            let d2 = 64.0;
            let delta = g.aspect_ratio(d1, d2).unwrap();
            let coreset = stream_sample(
                rows.iter().map(|r| r.as_slice()),
                SamplerConfig {
                    dim: d + 1,
                    eps,
                    delta,
                    oversample: 1.0,
                    n_hint: n as u64,
                    seed: 0x9200 + seed,
                },
            )
            .expect("sampler");
            let fit = solve_coreset_regression(&coreset, &g, &RegressionOptions::default())
                .expect("coreset solve");

            // Coreset solution evaluated on the full data.
            let residuals: Vec<f64> = plain
                .iter()
                .map(|(a, b)| {
                    a.iter().zip(fit.x.iter()).map(|(u, v)| u * v).sum::<f64>() - b
                })
                .collect();
            let full_obj = g_norm(&residuals, &g);
            (full_obj, dense.objective)
        })
        .collect();
    let mut worst = 0.0f64;
    let mut passes = 0;
    for (full_obj, dense_obj) in &results {
        let ratio = full_obj / dense_obj.max(1e-12);
        worst = worst.max(ratio);
        if ratio <= 1.0 + 3.0 * eps {
            passes += 1;
        }
    }
    let ok = passes == instances as usize;
    println!(
        "criterion 9 (coreset regression): {} — {passes}/{instances} within (1+3eps)={:.2}, worst ratio {:.4}",
        if ok { "PASS" } else { "FAIL" },
        1.0 + 3.0 * eps,
        worst
    );
    assert!(ok);
}

// ---------------------------------------------------------------------------
// Criterion 10: sketch vs uniform-sampling baselines across the m grid.
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_baseline_reproduction() {
    let eps = 0.2;
    let rate = 0.1;
    let seeds = 10u64;
    let norm = NormDescriptor::top_k(256).unwrap();
    let mmc_cap = norm.mmc_bound(UNIVERSE).max(16.0);
    let mut all_ok = true;
    for &m in &M_GRID {
        for w in [m, m / 2] {
            let errs: Vec<(f64, f64, f64)> = (0..seeds)
                .into_par_iter()
                .map(|s| {
                    let stream = appc(m, 0xa000 + s * 13 + m);
                    let mut cfg = GridConfig::practical(UNIVERSE, w, eps, mmc_cap, 0xb000 + s);
                    cfg.overrides.r_cap = 5;
                    let mut grid = LayerGrid::new(cfg).expect("grid");
                    let mut oracle = ExactWindowOracle::new(w);
                    for &x in &stream.items {
                        grid.update(x).expect("in range");
                        oracle.push(x);
                    }
                    let exact = oracle.norm(&norm).expect("oracle");
                    let ours = grid.estimate(&norm).expect("fits");
                    let window_updates =
                        &stream.items[stream.items.len() - w as usize..];
                    let st = baseline_uniform(
                        window_updates,
                        rate,
                        BaselineMode::Stream,
                        &norm,
                        0xc000 + s,
                    )
                    .expect("stream baseline");
                    let un = baseline_uniform(
                        window_updates,
                        rate,
                        BaselineMode::Universe,
                        &norm,
                        0xd000 + s,
                    )
                    .expect("universe baseline");
                    (
                        rel_err(ours, exact),
                        rel_err(st.value, exact),
                        rel_err(un.value, exact),
                    )
                })
                .collect();
            let mut ours: Vec<f64> = errs.iter().map(|e| e.0).collect();
            let mut stream_b: Vec<f64> = errs.iter().map(|e| e.1).collect();
            let mut universe_b: Vec<f64> = errs.iter().map(|e| e.2).collect();
            let mo = median(&mut ours);
            let ms = median(&mut stream_b);
            let mu = median(&mut universe_b);
            let beats_universe = mo < mu;
            let beats_stream = m < (1 << 13) || mo < ms;
            let ok = beats_universe && beats_stream;
            all_ok &= ok;
            println!
                ("criterion 10 (baselines, m=2^{} W={}): {} — ours {:.3}, stream {:.3}, universe {:.3}",
                m.trailing_zeros(),
                if w == m { "m" } else { "m/2" },
                if ok { "PASS" } else { "FAIL" },
                mo,
                ms,
                mu
            );
        }
    }
    assert!(all_ok);
}
