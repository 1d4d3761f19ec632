//! Brute-force solvers for the SVM dual
//! `min 1/2 a'Qa - sum(a)  s.t.  y'a = 0, 0 <= a_i <= c_i`.

use nalgebra::{DMatrix, DVector};

pub fn dual_objective(q: &[Vec<f64>], a: &[f64]) -> f64 {
    let n = a.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += a[i] * a[j] * q[i][j];
        }
    }
    0.5 * quad - a.iter().sum::<f64>()
}

/// Enumerates every assignment of each variable to {lower bound, upper bound,
/// free}, solves the equality-constrained stationarity system for the free
/// ones and keeps the best feasible point. Exact whenever the optimum's KKT
/// system is nonsingular. Practical for `n <= 8`.
pub fn active_set_enumeration(q: &[Vec<f64>], y: &[f64], c: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = y.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut state = vec![0u8; n];
        let mut k = code;
        for s in state.iter_mut() {
            *s = (k % 3) as u8;
            k /= 3;
        }
        let mut a = vec![0.0; n];
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        for i in 0..n {
            if state[i] == 1 {
                a[i] = c[i];
            }
        }
        if free.is_empty() {
            let eq: f64 = (0..n).map(|i| y[i] * a[i]).sum();
            if eq.abs() > 1e-9 {
                continue;
            }
        } else {
            let m = free.len();
            let mut lhs = DMatrix::<f64>::zeros(m + 1, m + 1);
            let mut rhs = DVector::<f64>::zeros(m + 1);
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    lhs[(r, s)] = q[i][j];
                }
                lhs[(r, m)] = y[i];
                lhs[(m, r)] = y[i];
                let fixed: f64 = (0..n).filter(|j| state[*j] != 2).map(|j| q[i][j] * a[j]).sum();
                rhs[r] = 1.0 - fixed;
            }
            rhs[m] = -(0..n).filter(|j| state[*j] != 2).map(|j| y[j] * a[j]).sum::<f64>();
            let Some(sol) = lhs.lu().solve(&rhs) else {
                continue;
            };
            if sol.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let mut ok = true;
            for (r, &i) in free.iter().enumerate() {
                let v = sol[r];
                if v < -1e-12 || v > c[i] + 1e-12 {
                    ok = false;
                    break;
                }
                a[i] = v.clamp(0.0, c[i]);
            }
            if !ok {
                continue;
            }
            let eq: f64 = (0..n).map(|i| y[i] * a[i]).sum();
            if eq.abs() > 1e-9 {
                continue;
            }
        }
        let obj = dual_objective(q, &a);
        if best.as_ref().is_none_or(|(_, b)| obj < *b) {
            best = Some((a, obj));
        }
    }
    best
}

/// Euclidean projection onto `{0 <= a <= c, y'a = 0}` by bisection on the
/// multiplier of the equality constraint.
fn project(v: &[f64], y: &[f64], c: &[f64]) -> Vec<f64> {
    let clip = |lambda: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .zip(c)
            .map(|((vi, yi), ci)| (vi - lambda * yi).clamp(0.0, *ci))
            .collect()
    };
    let h = |a: &[f64]| -> f64 { a.iter().zip(y).map(|(ai, yi)| ai * yi).sum() };
    let bound = v
        .iter()
        .zip(c)
        .map(|(vi, ci)| vi.abs() + ci)
        .fold(0.0, f64::max)
        + 1.0;
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if h(&clip(mid)) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    clip(0.5 * (lo + hi))
}

/// Accelerated projected gradient with adaptive restart.
pub fn projected_gradient(q: &[Vec<f64>], y: &[f64], c: &[f64], iters: usize) -> (Vec<f64>, f64) {
    let n = y.len();
    let qm = DMatrix::from_fn(n, n, |i, j| q[i][j]);
    let lmax = qm
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
        .max(1e-12);
    let step = 1.0 / lmax;
    let grad = |a: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| (0..n).map(|j| q[i][j] * a[j]).sum::<f64>() - 1.0)
            .collect()
    };
    let mut x = vec![0.0; n];
    let mut z = x.clone();
    let mut t = 1.0f64;
    let mut fx = dual_objective(q, &x);
    for _ in 0..iters {
        let g = grad(&z);
        let v: Vec<f64> = z.iter().zip(&g).map(|(zi, gi)| zi - step * gi).collect();
        let xn = project(&v, y, c);
        let fxn = dual_objective(q, &xn);
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if fxn > fx {
            // restart momentum
            t = 1.0;
            z = x.clone();
            continue;
        }
        z = xn
            .iter()
            .zip(&x)
            .map(|(a, b)| a + (t - 1.0) / tn * (a - b))
            .collect();
        x = xn;
        fx = fxn;
        t = tn;
    }
    (x, fx)
}

/// Best objective value found by either brute-force route.
pub fn reference_dual_optimum(q: &[Vec<f64>], y: &[f64], c: &[f64]) -> f64 {
    let (_, pg) = projected_gradient(q, y, c, 20_000);
    match active_set_enumeration(q, y, c) {
        Some((_, enumerated)) => enumerated.min(pg),
        None => pg,
    }
}
