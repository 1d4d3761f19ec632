//! Iterative multiplicative feature weighting.
//!
//! A linear SVM is trained on `z ⊙ x`, then every weight is multiplied by the
//! magnitude of the matching primal coefficient. Features the separator does
//! not use shrink geometrically towards 0; a used feature settles where its
//! coefficient has unit magnitude.

use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, KernelSpec};
use crate::svm::{solve_dual, Label, SolverOptions};

/// Box constraint of the inner SVM; large enough to act as a hard margin.
const INNER_COST: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WestonConfig {
    /// Added to the Gram diagonal so non-separable data stays feasible.
    pub ridge: f64,
    pub max_iter: usize,
    /// Stop once `max_k |z_t - z_{t-1}|` drops below this.
    pub eps: f64,
    pub solver: SolverOptions,
}

impl Default for WestonConfig {
    fn default() -> Self {
        Self {
            ridge: 1e-3,
            max_iter: 50,
            eps: 1e-4,
            solver: SolverOptions::default().with_tol(1e-6),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionState {
    /// Nonnegative per-feature weights.
    pub z: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WestonSelection {
    pub state: SelectionState,
    /// `z` after every iteration, starting with the all-ones vector.
    pub trajectory: Vec<Vec<f64>>,
    /// Input rows scaled columnwise by the final `z`.
    pub rescaled: Vec<Vec<f64>>,
}

/// Scales every row of `x` columnwise by `z`.
pub fn apply_weights(x: &[Vec<f64>], z: &[f64]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|row| row.iter().zip(z).map(|(v, w)| v * w).collect())
        .collect()
}

fn validate(x: &[Vec<f64>], labels: &[Label], cfg: &WestonConfig) -> Result<usize> {
    if x.is_empty() {
        return Err(Error::EmptyInput("feature selection needs examples"));
    }
    if labels.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: labels.len(),
        });
    }
    let d = x[0].len();
    if let Some(row) = x.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            actual: row.len(),
        });
    }
    let n_pos = labels.iter().filter(|l| l.is_positive()).count();
    if n_pos == 0 || n_pos == labels.len() {
        return Err(Error::DegenerateLabels(
            "feature selection needs both classes".into(),
        ));
    }
    if !(cfg.ridge > 0.0) {
        return Err(Error::param("ridge", "must be positive"));
    }
    if !(cfg.eps > 0.0) {
        return Err(Error::param("eps", "must be positive"));
    }
    Ok(d)
}

/// Runs the weighting loop from `z = 1`.
///
/// An unconverged inner SVM aborts with [`Error::SelectionAborted`], which
/// carries the weights reached so far.
pub fn weston_select(x: &[Vec<f64>], labels: &[Label], cfg: &WestonConfig) -> Result<WestonSelection> {
    let d = validate(x, labels, cfg)?;
    let mut z = vec![1.0; d];
    let mut trajectory = vec![z.clone()];
    let cost = vec![INNER_COST; x.len()];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let scaled = apply_weights(x, &z);
        let mut gram = kernel_matrix(&scaled, KernelSpec::Linear)?;
        gram.add_to_diagonal(cfg.ridge);
        let sol = solve_dual(&gram, labels, &cost, &cfg.solver)?;
        if !sol.converged {
            return Err(Error::SelectionAborted {
                iteration: iterations + 1,
                z,
            });
        }
        let mut w = vec![0.0; d];
        for ((a, l), row) in sol.alpha.iter().zip(labels).zip(&scaled) {
            if *a != 0.0 {
                let ay = a * l.sign();
                for (wk, v) in w.iter_mut().zip(row) {
                    *wk += ay * v;
                }
            }
        }
        let next: Vec<f64> = z.iter().zip(&w).map(|(zk, wk)| zk * wk.abs()).collect();
        let change = z
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        z = next;
        trajectory.push(z.clone());
        iterations += 1;
        if change < cfg.eps {
            converged = true;
            break;
        }
    }
    Ok(WestonSelection {
        rescaled: apply_weights(x, &z),
        state: SelectionState {
            z,
            iterations,
            converged,
        },
        trajectory,
    })
}
