//! Orlicz norm evaluation: ||x||_G is the unique alpha with
//! sum_i G(|x_i| / alpha) = 1 (zero for the zero vector). Phi(alpha) =
//! sum G(|x_i|/alpha) - 1 is strictly decreasing, so a bracketing search plus
//! bisection nails the root. Weighted variants appear wherever coreset rows
//! carry sampling weights.

use crate::error::{Error, Result};
use crate::orlicz::gfunc::GFunc;

const MAX_BRACKET_DOUBLINGS: usize = 200;

/// Unweighted norm; `tol` is the relative tolerance on alpha.
pub fn orlicz_norm(x: &[f64], g: &GFunc, tol: f64) -> Result<f64> {
    weighted_orlicz_norm_of(x.len(), |i| (x[i], 1.0), g, tol)
}

/// Weighted norm: the unique alpha with sum_i w_i G(|x_i| / alpha) = 1.
pub fn weighted_orlicz_norm(x: &[f64], w: &[f64], g: &GFunc, tol: f64) -> Result<f64> {
    debug_assert_eq!(x.len(), w.len());
    weighted_orlicz_norm_of(x.len(), |i| (x[i], w[i]), g, tol)
}

pub fn weighted_orlicz_norm_of(
    len: usize,
    entry: impl Fn(usize) -> (f64, f64),
    g: &GFunc,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::parameter("tol", "must be positive"));
    }
    let mut max_abs = 0.0f64;
    for i in 0..len {
        let (x, w) = entry(i);
        if !x.is_finite() || !w.is_finite() || w < 0.0 {
            return Err(Error::Input(format!(
                "non-finite or negative entry at index {i}: ({x}, {w})"
            )));
        }
        if w > 0.0 {
            max_abs = max_abs.max(x.abs());
        }
    }
    if max_abs == 0.0 {
        return Ok(0.0);
    }
    // Fast exact paths: square is the weighted L2 norm, abs the weighted L1.
    match g {
        GFunc::Square => {
            let mut s = 0.0;
            for i in 0..len {
                let (x, w) = entry(i);
                s += w * x * x;
            }
            return Ok(s.sqrt());
        }
        GFunc::Abs => {
            let mut s = 0.0;
            for i in 0..len {
                let (x, w) = entry(i);
                s += w * x.abs();
            }
            return Ok(s);
        }
        GFunc::Huber { .. } => {}
    }

    let phi = |alpha: f64| -> f64 {
        let mut s = 0.0;
        for i in 0..len {
            let (x, w) = entry(i);
            if w > 0.0 {
                s += w * g.value(x.abs() / alpha);
            }
        }
        s - 1.0
    };

    // Bracket the root: phi is strictly decreasing with lim_0 = +inf.
    let mut lo = max_abs; // may be on either side
    let mut hi = max_abs;
    let mut steps = 0;
    while phi(lo) < 0.0 {
        lo /= 2.0;
        steps += 1;
        if steps > MAX_BRACKET_DOUBLINGS {
            return Err(Error::Numeric("failed to bracket Orlicz root from below".into()));
        }
    }
    steps = 0;
    while phi(hi) > 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > MAX_BRACKET_DOUBLINGS {
            return Err(Error::Numeric("failed to bracket Orlicz root from above".into()));
        }
    }
    // Bisection to relative tolerance.
    while hi - lo > tol * lo {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
