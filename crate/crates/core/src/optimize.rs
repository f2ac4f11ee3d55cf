//! Derivative-free Nelder-Mead simplex minimization with seeded restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Stop once the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter falls below this.
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evals: 4000,
            f_tol: 1e-15,
            x_tol: 1e-12,
            initial_step: 0.3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
}

/// Minimizes `f` from `x0` with the standard reflection/expansion/
/// contraction/shrink coefficients (1, 2, 1/2, 1/2).
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p)).collect();
    let mut evals = n + 1;

    let mut order: Vec<usize> = (0..=n).collect();
    while evals < opts.max_evals {
        order.sort_by(|&i, &j| vals[i].total_cmp(&vals[j]));
        let (best, worst, second) = (order[0], order[n], order[n.saturating_sub(1)]);
        let spread = vals[worst] - vals[best];
        let diameter = pts
            .iter()
            .map(|p| p.iter().zip(&pts[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && diameter <= opts.x_tol {
            break;
        }
        if diameter <= opts.x_tol * 1e-3 {
            break;
        }

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&pts[i]) {
                *c += x / n as f64;
            }
        }
        let along = |k: f64| -> Vec<f64> {
            centroid.iter().zip(&pts[worst]).map(|(c, w)| c + k * (c - w)).collect()
        };

        let xr = along(1.0);
        let fr = eval(&xr);
        evals += 1;
        if fr < vals[best] {
            let xe = along(2.0);
            let fe = eval(&xe);
            evals += 1;
            if fe < fr {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
            continue;
        }
        if fr < vals[second] {
            pts[worst] = xr;
            vals[worst] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[worst] {
            let xc = along(0.5);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc);
            (xc, fc)
        };
        evals += 1;
        if fc < vals[worst].min(fr) {
            pts[worst] = xc;
            vals[worst] = fc;
            continue;
        }
        let anchor = pts[best].clone();
        for i in 0..=n {
            if i == best {
                continue;
            }
            for (x, b) in pts[i].iter_mut().zip(&anchor) {
                *x = b + 0.5 * (*x - b);
            }
            vals[i] = eval(&pts[i]);
            evals += 1;
        }
    }
    let best = (0..=n).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(0);
    Minimum {
        x: pts[best].clone(),
        f: vals[best],
        evals,
    }
}

/// Simplex search followed by restarts from the incumbent until a restart
/// no longer improves it; restarting refreshes a collapsed simplex.
pub fn polish<F>(f: F, x0: &[f64], opts: &SimplexOptions, max_rounds: usize) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let mut best = nelder_mead(&f, x0, opts);
    let mut step = opts.initial_step;
    for _ in 0..max_rounds {
        step = (step * 0.5).max(1e-6);
        let next = nelder_mead(&f, &best.x, &SimplexOptions { initial_step: step, ..*opts });
        let evals = best.evals + next.evals;
        let improved = next.f < best.f * (1.0 - 1e-3) || (best.f > 0.0 && next.f == 0.0);
        if next.f < best.f {
            best = Minimum { evals, ..next };
        } else {
            best.evals = evals;
        }
        if !improved {
            break;
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiStart {
    pub restarts: usize,
    pub seed: u64,
    /// Start points are drawn uniformly from `[lo, hi)` per coordinate.
    pub lo: f64,
    pub hi: f64,
    pub polish_rounds: usize,
    /// Restarts whose value drops below this end the search early.
    pub target: f64,
}

/// Independent seeded restarts run in parallel; the minimum value wins with
/// ties broken by the lowest restart index, so the result does not depend
/// on scheduling. Restarts are evaluated in batches so that a batch meeting
/// `target` stops the search deterministically.
pub fn multi_start<F>(f: F, dim: usize, ms: &MultiStart, opts: &SimplexOptions) -> (Minimum, usize)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    // fixed batch size: the early exit must not depend on the thread count
    let batch = 8;
    let mut best: Option<(usize, Minimum)> = None;
    let mut done = 0;
    while done < ms.restarts {
        let end = (done + batch).min(ms.restarts);
        let results: Vec<(usize, Minimum)> = (done..end)
            .into_par_iter()
            .map(|idx| {
                let mut rng = ChaCha8Rng::seed_from_u64(ms.seed);
                rng.set_stream(idx as u64);
                let x0: Vec<f64> = (0..dim).map(|_| rng.random_range(ms.lo..ms.hi)).collect();
                (idx, polish(&f, &x0, opts, ms.polish_rounds))
            })
            .collect();
        for (idx, m) in results {
            let better = match &best {
                None => true,
                Some((_, b)) => m.f < b.f,
            };
            if better {
                best = Some((idx, m));
            }
        }
        done = end;
        if best.as_ref().is_some_and(|(_, b)| b.f <= ms.target) {
            break;
        }
    }
    let (idx, m) = best.expect("at least one restart");
    (m, idx)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None`
/// if `a` is numerically singular.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let k = a[row][col] / a[col][col];
            if k != 0.0 {
                for j in col..n {
                    a[row][j] -= k * a[col][j];
                }
                b[row] -= k * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Levenberg-Marquardt on a residual vector with a central-difference
/// Jacobian. Returns the parameters and the final squared norm.
pub fn levenberg_marquardt<F>(r: F, x0: &[f64], max_iter: usize) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let sq = |v: &[f64]| v.iter().map(|e| e * e).sum::<f64>();
    let mut x = x0.to_vec();
    let mut res = r(&x);
    let mut cost = sq(&res);
    let mut lambda = 1e-3;
    for _ in 0..max_iter {
        if cost == 0.0 {
            break;
        }
        let h = 1e-7;
        let mut jac = vec![vec![0.0; n]; res.len()];
        for k in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let (rp, rm) = (r(&xp), r(&xm));
            for i in 0..res.len() {
                jac[i][k] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for (row, ri) in jac.iter().zip(&res) {
            for a in 0..n {
                jtr[a] -= row[a] * ri;
                for b in 0..n {
                    jtj[a][b] += row[a] * row[b];
                }
            }
        }
        let mut accepted = false;
        for _ in 0..12 {
            let mut damped = jtj.clone();
            for (k, row) in damped.iter_mut().enumerate() {
                row[k] += lambda * (jtj[k][k] + 1e-12);
            }
            if let Some(step) = solve_linear(damped, jtr.clone()) {
                let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
                let tr = r(&trial);
                let tc = sq(&tr);
                if tc < cost {
                    x = trial;
                    res = tr;
                    cost = tc;
                    lambda = (lambda * 0.2).max(1e-12);
                    accepted = true;
                    break;
                }
            }
            lambda *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    (x, cost)
}
