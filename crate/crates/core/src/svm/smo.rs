use crate::error::{Error, Result};
use crate::kernel::KernelMatrix;

use super::{Label, SolverOptions};

/// Raw output of the dual solver.
#[derive(Debug, Clone)]
pub struct DualSolution {
    /// Dual variables, `0 <= alpha_i <= C_i`.
    pub alpha: Vec<f64>,
    pub bias: f64,
    /// Dual objective `1/2 a'Qa - sum(a)` (minimization form).
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

const TAU: f64 = 1e-12;

/// Solves `min 1/2 a'Qa - e'a  s.t.  y'a = 0, 0 <= a_i <= C_i` with
/// `Q_ij = y_i y_j K_ij`, using SMO with maximal-violating-pair selection.
pub fn solve_dual(
    gram: &KernelMatrix,
    labels: &[Label],
    cost: &[f64],
    opts: &SolverOptions,
) -> Result<DualSolution> {
    let n = labels.len();
    if gram.n() != n || cost.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: if gram.n() != n { gram.n() } else { cost.len() },
        });
    }
    if n == 0 {
        return Err(Error::EmptyInput("dual problem has no variables"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
    let mut alpha = vec![0.0; n];
    // gradient of the dual objective, G = Q a - e
    let mut grad = vec![-1.0; n];
    let max_iter = opts.max_iterations(n);

    let upper = |a: f64, c: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    let mut iterations = 0;
    let mut converged = false;
    loop {
        // maximal violating pair
        let mut g_max = f64::NEG_INFINITY;
        let mut g_min = f64::INFINITY;
        let mut i_sel = usize::MAX;
        let mut j_sel = usize::MAX;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 {
                !upper(alpha[t], cost[t])
            } else {
                !lower(alpha[t])
            };
            let in_low = if y[t] > 0.0 {
                !lower(alpha[t])
            } else {
                !upper(alpha[t], cost[t])
            };
            if in_up && v > g_max {
                g_max = v;
                i_sel = t;
            }
            if in_low && v < g_min {
                g_min = v;
                j_sel = t;
            }
        }
        if i_sel == usize::MAX || j_sel == usize::MAX || g_max - g_min < opts.tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let (i, j) = (i_sel, j_sel);
        let (ci, cj) = (cost[i], cost[j]);
        let kii = gram.get(i, i);
        let kjj = gram.get(j, j);
        let kij = gram.get(i, j);
        let old_ai = alpha[i];
        let old_aj = alpha[j];

        if y[i] != y[j] {
            // Q_ij = -K_ij
            let mut quad = kii + kjj + 2.0 * (y[i] * y[j] * kij);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let mut quad = kii + kjj - 2.0 * kij;
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let dai = alpha[i] - old_ai;
        let daj = alpha[j] - old_aj;
        if dai == 0.0 && daj == 0.0 {
            // no progress possible on the selected pair; treat as converged to
            // avoid spinning on a numerically flat direction
            log::debug!("SMO stalled on pair ({i}, {j}) with gap {}", g_max - g_min);
            break;
        }
        let row_i = gram.row(i);
        let row_j = gram.row(j);
        let (si, sj) = (y[i] * dai, y[j] * daj);
        for k in 0..n {
            grad[k] += y[k] * (row_i[k] * si + row_j[k] * sj);
        }
    }

    let bias = compute_bias(&y, &alpha, cost, &grad);
    let objective = 0.5 * alpha.iter().zip(&grad).map(|(a, g)| a * (g - 1.0)).sum::<f64>();
    Ok(DualSolution {
        alpha,
        bias,
        objective,
        iterations,
        converged,
    })
}

/// Bias from the KKT conditions: average over free variables of `-y_i G_i`,
/// otherwise the midpoint of the feasible interval.
fn compute_bias(y: &[f64], alpha: &[f64], cost: &[f64], grad: &[f64]) -> f64 {
    let mut ub = f64::INFINITY;
    let mut lb = f64::NEG_INFINITY;
    let mut free_sum = 0.0;
    let mut n_free = 0usize;
    for t in 0..y.len() {
        let v = -y[t] * grad[t];
        let at_upper = alpha[t] >= cost[t];
        let at_lower = alpha[t] <= 0.0;
        if at_upper {
            // b <= v for positives, b >= v for negatives
            if y[t] > 0.0 {
                ub = ub.min(v);
            } else {
                lb = lb.max(v);
            }
        } else if at_lower {
            if y[t] > 0.0 {
                lb = lb.max(v);
            } else {
                ub = ub.min(v);
            }
        } else {
            n_free += 1;
            free_sum += v;
        }
    }
    if n_free > 0 {
        free_sum / n_free as f64
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / 2.0
    } else if ub.is_finite() {
        ub
    } else if lb.is_finite() {
        lb
    } else {
        0.0
    }
}
