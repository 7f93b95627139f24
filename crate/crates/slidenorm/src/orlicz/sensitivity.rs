//! Online L1 sensitivities: how much of ||A x||_1 a single row can claim,
//! maximized over directions. Rows outside the current span get sensitivity 1;
//! rows inside reduce to the LP max a.x over ||M x||_1 <= 1 through
//! ratio = v* / (1 + v*).

use crate::error::{Error, Result};
use crate::orlicz::lp::max_inner_over_l1_ball;

/// Span tolerance, relative to the largest row norm seen (floating-point
/// stand-in for the exact "a in span(M)" test).
pub const SPAN_REL_TOL: f64 = 1e-9;

/// Incremental orthonormal basis of a growing row span.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    dim: usize,
    basis: Vec<Vec<f64>>,
    max_norm: f64,
}

impl SpanBasis {
    pub fn new(dim: usize) -> Self {
        SpanBasis {
            dim,
            basis: Vec::new(),
            max_norm: 0.0,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        for b in &self.basis {
            let dot: f64 = r.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
            for (ri, bi) in r.iter_mut().zip(b.iter()) {
                *ri -= dot * bi;
            }
        }
        r
    }

    /// Projection of `v` onto the span.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let r = self.residual(v);
        v.iter().zip(r.iter()).map(|(x, y)| x - y).collect()
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        if self.basis.len() == self.dim {
            return true;
        }
        let scale = self.max_norm.max(norm2(v));
        if scale == 0.0 {
            return true; // zero vector is in every span
        }
        norm2(&self.residual(v)) <= SPAN_REL_TOL * scale
    }

    /// Add `v` to the span; returns true when the rank grew.
    pub fn insert(&mut self, v: &[f64]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        self.max_norm = self.max_norm.max(norm2(v));
        if self.basis.len() == self.dim {
            return false;
        }
        let mut r = self.residual(v);
        let n = norm2(&r);
        if n <= SPAN_REL_TOL * self.max_norm.max(1e-300) {
            return false;
        }
        for x in r.iter_mut() {
            *x /= n;
        }
        self.basis.push(r);
        true
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// max over x of <a, x> / (||M x||_1 + |<a, x>|) for `a` inside the row span
/// of `m_rows`; equals v*/(1 + v*) for v* = max <a,x> s.t. ||Mx||_1 <= 1.
pub fn sensitivity_ratio(a: &[f64], m_rows: &[Vec<f64>], basis: &SpanBasis) -> Result<f64> {
    if norm2(a) == 0.0 {
        return Ok(0.0);
    }
    // Project away numerical out-of-span residue; the caller already decided
    // membership, and a stray component would unbound the LP.
    let a_proj = basis.project(a);
    if norm2(&a_proj) == 0.0 {
        return Ok(0.0);
    }
    let sol = max_inner_over_l1_ball(&a_proj, m_rows)?;
    let v = sol.value.max(0.0);
    Ok(v / (1.0 + v))
}

/// Alg-2 sampling score for one row against the current weighted sample:
/// 1 outside the span, otherwise min(1, 2 * delta * ratio).
pub fn online_sensitivity(a: &[f64], m_rows: &[Vec<f64>], delta: f64) -> Result<f64> {
    if !(delta >= 1.0) {
        return Err(Error::parameter("delta", "aspect ratio must be at least 1"));
    }
    if norm2(a) == 0.0 {
        return Ok(0.0);
    }
    let mut basis = SpanBasis::new(a.len());
    for r in m_rows {
        basis.insert(r);
    }
    if !basis.contains(a) {
        return Ok(1.0);
    }
    let ratio = sensitivity_ratio(a, m_rows, &basis)?;
    Ok((2.0 * delta * ratio).min(1.0))
}

/// Plain online L1 sensitivities of a full (unsampled) row sequence:
/// l_i = max_x |<a_i, x>| / ||A_i x||_1 with A_i the prefix through row i.
pub fn exact_online_l1_sensitivities(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    if rows.is_empty() {
        return Ok(Vec::new());
    }
    let d = rows[0].len();
    let mut basis = SpanBasis::new(d);
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if norm2(row) == 0.0 {
            out.push(0.0);
        } else if !basis.contains(row) {
            out.push(1.0);
        } else {
            let ratio = sensitivity_ratio(row, &rows[..i], &basis)?;
            out.push(ratio);
        }
        basis.insert(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row_not_in_span() {
        let tau = online_sensitivity(&[1.0, 2.0], &[], 1.0).unwrap();
        assert_eq!(tau, 1.0);
    }

    #[test]
    fn zero_row_never_sampled() {
        let tau = online_sensitivity(&[0.0, 0.0], &[vec![1.0, 0.0]], 1.0).unwrap();
        assert_eq!(tau, 0.0);
    }

    #[test]
    fn basis_vectors_then_repeat() {
        // M = {e1, e2}, a = e1, delta = 1:
        // max x1 / (|x1| + |x2| + |x1|) = 1/2, so tau = 2 * 1 * 1/2 = 1.
        let m = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let tau = online_sensitivity(&[1.0, 0.0], &m, 1.0).unwrap();
        assert!((tau - 1.0).abs() < 1e-9, "tau = {tau}");
    }

    #[test]
    fn ratio_agrees_with_direction_scan() {
        let m = vec![vec![1.0, 0.3], vec![-0.2, 1.1], vec![0.5, 0.5]];
        let a = vec![0.9, 0.8];
        let mut basis = SpanBasis::new(2);
        for r in &m {
            basis.insert(r);
        }
        let got = sensitivity_ratio(&a, &m, &basis).unwrap();
        let mut best: f64 = 0.0;
        for step in 0..50_000 {
            let th = step as f64 * std::f64::consts::PI * 2.0 / 50_000.0;
            let x = [th.cos(), th.sin()];
            let ax = (a[0] * x[0] + a[1] * x[1]).abs();
            let l1: f64 = m.iter().map(|r| (r[0] * x[0] + r[1] * x[1]).abs()).sum();
            best = best.max(ax / (l1 + ax));
        }
        assert!((got - best).abs() < 1e-3, "lp {got} vs scan {best}");
    }

    #[test]
    fn one_dimensional_closed_form() {
        // All rows equal 1 in d = 1: the j-th sensitivity is 1/j.
        let rows: Vec<Vec<f64>> = (0..12).map(|_| vec![1.0]).collect();
        let sens = exact_online_l1_sensitivities(&rows).unwrap();
        for (j, s) in sens.iter().enumerate() {
            let expect = 1.0 / (j as f64 + 1.0);
            assert!((s - expect).abs() < 1e-9, "j={j}: {s} vs {expect}");
        }
    }

    #[test]
    fn appending_rows_never_raises_the_ratio() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..25 {
            let d = 3usize;
            let base: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let extra: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a: Vec<f64> = base[0].iter().zip(base[1].iter()).map(|(x, y)| x + y).collect();
            let mut basis = SpanBasis::new(d);
            for r in &base {
                basis.insert(r);
            }
            let before = sensitivity_ratio(&a, &base, &basis).unwrap();
            let mut bigger = base.clone();
            bigger.push(extra.clone());
            let mut basis2 = SpanBasis::new(d);
            for r in &bigger {
                basis2.insert(r);
            }
            let after = sensitivity_ratio(&a, &bigger, &basis2).unwrap();
            assert!(after <= before + 1e-9, "{after} > {before}");
        }
    }
}
