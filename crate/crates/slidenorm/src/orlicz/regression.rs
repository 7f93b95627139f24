//! Regression under an Orlicz-norm loss on (weighted) rows: backtracking
//! gradient descent on the convex objective ||Ax - b||_G, warm-started at the
//! weighted least-squares solution.

use crate::error::{Error, Result};
use crate::orlicz::gfunc::GFunc;
use crate::orlicz::norm::weighted_orlicz_norm_of;
use crate::orlicz::sampler::CoresetRow;

#[derive(Clone, Debug)]
pub struct RegressionOptions {
    /// Relative objective-improvement threshold that ends the descent.
    pub tol: f64,
    pub max_iters: usize,
    pub norm_tol: f64,
}

impl Default for RegressionOptions {
    fn default() -> Self {
        RegressionOptions {
            tol: 1e-8,
            max_iters: 600,
            norm_tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RegressionResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Minimize the weighted Orlicz norm of A x - b. `rows[i]` is (a_i, b_i) and
/// `weights[i]` scales G(|r_i|/alpha) inside the norm equation.
pub fn solve_regression(
    rows: &[(Vec<f64>, f64)],
    weights: &[f64],
    g: &GFunc,
    opts: &RegressionOptions,
) -> Result<RegressionResult> {
    if rows.is_empty() {
        return Err(Error::Input("empty regression system".into()));
    }
    if rows.len() != weights.len() {
        return Err(Error::Input("rows and weights disagree in length".into()));
    }
    let d = rows[0].0.len();
    if d == 0 || rows.iter().any(|(a, _)| a.len() != d) {
        return Err(Error::Input("inconsistent row dimensions".into()));
    }

    let objective = |x: &[f64]| -> Result<f64> {
        weighted_orlicz_norm_of(
            rows.len(),
            |i| {
                let (a, b) = &rows[i];
                let r: f64 = a.iter().zip(x.iter()).map(|(ai, xi)| ai * xi).sum::<f64>() - b;
                (r, weights[i])
            },
            g,
            opts.norm_tol,
        )
    };

    let mut x = weighted_least_squares(rows, weights)?;
    let mut obj = objective(&x)?;
    let mut converged = false;
    let mut iters = 0;
    for it in 0..opts.max_iters {
        iters = it + 1;
        if obj <= 0.0 {
            converged = true; // exact fit
            break;
        }
        let grad = gradient(rows, weights, g, &x, obj);
        let gnorm2: f64 = grad.iter().map(|v| v * v).sum();
        if gnorm2 <= 1e-28 {
            converged = true;
            break;
        }
        // Backtracking line search (Armijo).
        let mut step = obj / gnorm2; // natural first scale
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = x
                .iter()
                .zip(grad.iter())
                .map(|(xi, gi)| xi - step * gi)
                .collect();
            let trial_obj = objective(&trial)?;
            if trial_obj <= obj - 0.25 * step * gnorm2 {
                let improvement = (obj - trial_obj) / obj.max(1e-300);
                x = trial;
                obj = trial_obj;
                accepted = true;
                if improvement < opts.tol {
                    converged = true;
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            converged = true; // no descent direction progress left
            break;
        }
        if converged {
            break;
        }
    }
    Ok(RegressionResult {
        x,
        objective: obj,
        converged,
        iterations: iters,
    })
}

/// Solve on a sampled coreset whose rows carry the response as the final
/// column.
pub fn solve_coreset_regression(
    coreset: &[CoresetRow],
    g: &GFunc,
    opts: &RegressionOptions,
) -> Result<RegressionResult> {
    if coreset.is_empty() {
        return Err(Error::Input("empty coreset".into()));
    }
    let full_dim = coreset[0].row.len();
    if full_dim < 2 {
        return Err(Error::Input("coreset rows must carry a response column".into()));
    }
    let rows: Vec<(Vec<f64>, f64)> = coreset
        .iter()
        .map(|r| {
            let (a, b) = r.row.split_at(full_dim - 1);
            (a.to_vec(), b[0])
        })
        .collect();
    let weights: Vec<f64> = coreset.iter().map(|r| r.weight).collect();
    solve_regression(&rows, &weights, g, opts)
}

/// Gradient of the weighted Orlicz norm at x (objective value `alpha`).
fn gradient(
    rows: &[(Vec<f64>, f64)],
    weights: &[f64],
    g: &GFunc,
    x: &[f64],
    alpha: f64,
) -> Vec<f64> {
    let d = x.len();
    let mut num = vec![0.0f64; d];
    let mut den = 0.0f64;
    for ((a, b), &w) in rows.iter().zip(weights.iter()) {
        if w == 0.0 {
            continue;
        }
        let r: f64 = a.iter().zip(x.iter()).map(|(ai, xi)| ai * xi).sum::<f64>() - b;
        let gp = g.derivative(r / alpha);
        if gp == 0.0 {
            continue;
        }
        for (nl, al) in num.iter_mut().zip(a.iter()) {
            *nl += w * gp * al;
        }
        den += w * gp * r / alpha;
    }
    // den = sum w (r/alpha) G'(r/alpha) >= sum w G(r/alpha) = 1 by convexity.
    let den = den.max(1e-12);
    num.iter_mut().for_each(|v| *v /= den);
    num
}

fn weighted_least_squares(rows: &[(Vec<f64>, f64)], weights: &[f64]) -> Result<Vec<f64>> {
    let d = rows[0].0.len();
    let mut ata = vec![0.0f64; d * d];
    let mut atb = vec![0.0f64; d];
    for ((a, b), &w) in rows.iter().zip(weights.iter()) {
        for i in 0..d {
            atb[i] += w * a[i] * b;
            for j in 0..d {
                ata[i * d + j] += w * a[i] * a[j];
            }
        }
    }
    // Tikhonov jitter keeps rank-deficient systems solvable; descent fixes
    // the rest.
    let trace: f64 = (0..d).map(|i| ata[i * d + i]).sum();
    let jitter = 1e-12 * trace.max(1e-300);
    for i in 0..d {
        ata[i * d + i] += jitter;
    }
    solve_dense(&mut ata, &mut atb, d)
}

/// Gaussian elimination with partial pivoting on a d x d system.
fn solve_dense(a: &mut [f64], b: &mut [f64], d: usize) -> Result<Vec<f64>> {
    for col in 0..d {
        let mut piv = col;
        for r in col + 1..d {
            if a[r * d + col].abs() > a[piv * d + col].abs() {
                piv = r;
            }
        }
        if a[piv * d + col].abs() < 1e-300 {
            return Err(Error::Numeric("singular normal equations".into()));
        }
        if piv != col {
            for c in 0..d {
                a.swap(col * d + c, piv * d + c);
            }
            b.swap(col, piv);
        }
        let diag = a[col * d + col];
        for r in col + 1..d {
            let f = a[r * d + col] / diag;
            if f != 0.0 {
                for c in col..d {
                    a[r * d + c] -= f * a[col * d + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0f64; d];
    for r in (0..d).rev() {
        let mut s = b[r];
        for c in r + 1..d {
            s -= a[r * d + c] * x[c];
        }
        x[r] = s / a[r * d + r];
    }
    Ok(x)
}
