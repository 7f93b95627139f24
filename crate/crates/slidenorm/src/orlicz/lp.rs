//! Small dense LP solver for the sensitivity maximization
//! v* = max a.x subject to ||M x||_1 <= 1.
//!
//! Standard-form encoding: x = x+ - x-, slack pair s+ - s- = M x with
//! sum(s+ + s-) + sigma = 1, all variables nonnegative. The all-zero point
//! with sigma = 1 is a basic feasible starting point, so no phase-1 is
//! needed. Bland's rule keeps the tableau from cycling; problem sizes here
//! are a few hundred rows at most (larger streams take the p = 1 shortcut
//! upstream and never reach the solver).

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

/// Maximize `a . x` over the polytope ||M x||_1 <= 1. `a` must lie in the
/// row span of `M`, otherwise the program is unbounded and an error returns.
pub fn max_inner_over_l1_ball(a: &[f64], m_rows: &[Vec<f64>]) -> Result<LpSolution> {
    let d = a.len();
    let k = m_rows.len();
    if k == 0 {
        return Err(Error::Numeric("empty constraint matrix".into()));
    }
    debug_assert!(m_rows.iter().all(|r| r.len() == d));

    // Column layout: x+ (d) | x- (d) | s+ (k) | s- (k) | sigma.
    let nv = 2 * d + 2 * k + 1;
    let rows = k + 1;
    let mut tab = vec![vec![0.0f64; nv + 1]; rows];
    for j in 0..k {
        for l in 0..d {
            tab[j][l] = m_rows[j][l];
            tab[j][d + l] = -m_rows[j][l];
        }
        tab[j][2 * d + j] = -1.0; // s+
        tab[j][2 * d + k + j] = 1.0; // s-
    }
    for j in 0..k {
        tab[k][2 * d + j] = 1.0;
        tab[k][2 * d + k + j] = 1.0;
    }
    tab[k][nv - 1] = 1.0; // sigma
    tab[k][nv] = 1.0; // rhs

    let mut cost = vec![0.0f64; nv];
    for l in 0..d {
        cost[l] = a[l];
        cost[d + l] = -a[l];
    }

    // Starting basis: s-_j for row j, sigma for the budget row. Clearing the
    // s- entries out of the budget row makes the basis columns identity.
    let mut basis: Vec<usize> = (0..k).map(|j| 2 * d + k + j).collect();
    basis.push(nv - 1);
    for j in 0..k {
        let pivot_row: Vec<f64> = tab[j].clone();
        for (t, p) in tab[k].iter_mut().zip(pivot_row.iter()) {
            *t -= *p;
        }
    }

    let max_iters = 200 * (nv + rows);
    for _ in 0..max_iters {
        // Reduced profits c_j - z_j with z = c_B^T tab.
        let mut entering = None;
        for col in 0..nv {
            let mut z = 0.0;
            for (i, &b) in basis.iter().enumerate() {
                let cb = cost[b];
                if cb != 0.0 {
                    z += cb * tab[i][col];
                }
            }
            if cost[col] - z > COST_TOL {
                entering = Some(col); // Bland: first improving column
                break;
            }
        }
        let Some(col) = entering else {
            // Optimal: read the solution.
            let mut x = vec![0.0f64; d];
            let mut value = 0.0;
            for (i, &b) in basis.iter().enumerate() {
                let v = tab[i][nv];
                value += cost[b] * v;
                if b < d {
                    x[b] += v;
                } else if b < 2 * d {
                    x[b - d] -= v;
                }
            }
            return Ok(LpSolution { value, x });
        };

        // Ratio test, Bland ties by lowest basis variable index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..rows {
            if tab[i][col] > PIVOT_TOL {
                let ratio = tab[i][nv] / tab[i][col];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - PIVOT_TOL
                            || ((ratio - br).abs() <= PIVOT_TOL && basis[i] < basis[bi])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::Numeric(
                "sensitivity LP unbounded (direction outside the row span)".into(),
            ));
        };

        // Pivot.
        let piv = tab[row][col];
        for v in tab[row].iter_mut() {
            *v /= piv;
        }
        let pivot_row = tab[row].clone();
        for (i, r) in tab.iter_mut().enumerate() {
            if i != row {
                let factor = r[col];
                if factor != 0.0 {
                    for (t, p) in r.iter_mut().zip(pivot_row.iter()) {
                        *t -= factor * p;
                    }
                }
            }
        }
        basis[row] = col;
    }
    Err(Error::Numeric("sensitivity LP failed to converge".into()))
}
