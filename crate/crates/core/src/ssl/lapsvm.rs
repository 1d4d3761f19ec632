use nalgebra::DMatrix;

use super::AffinityGraph;
use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, KernelMatrix, KernelSpec};
use crate::svm::{solve_dual, DecisionFunction, Label, SolverOptions};

const JITTER: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LapSvmConfig {
    /// Weight of the RKHS norm `||f||_K^2`.
    pub gamma_a: f64,
    /// Weight of the graph smoothness `f' L f`.
    pub gamma_i: f64,
    pub kernel: KernelSpec,
    pub solver: SolverOptions,
}

impl Default for LapSvmConfig {
    fn default() -> Self {
        Self {
            gamma_a: 1e-2,
            gamma_i: 1e-2,
            kernel: KernelSpec::Linear,
            solver: SolverOptions::default(),
        }
    }
}

/// `f(x) = sum_i alpha_i K(x_i, x) + b` over every labeled and unlabeled
/// training point.
#[derive(Debug, Clone)]
pub struct LapSvmModel {
    points: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    bias: f64,
    kernel: KernelSpec,
    converged: bool,
}

impl LapSvmModel {
    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn converged(&self) -> bool {
        self.converged
    }
}

impl DecisionFunction for LapSvmModel {
    fn decision_value(&self, x: &[f64]) -> Result<f64> {
        let dim = self.points[0].len();
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        let sum: f64 = self
            .alpha
            .iter()
            .zip(&self.points)
            .filter(|(a, _)| **a != 0.0)
            .map(|(a, p)| a * self.kernel.apply(p, x))
            .sum();
        Ok(sum + self.bias)
    }
}

/// Laplacian SVM: minimizes
/// `1/l sum_labeled hinge + gamma_a ||f||_K^2 + gamma_i f' L f`
/// where `L` is the Laplacian of `graph` over `labeled ++ unlabeled`.
///
/// Solved exactly through its dual, an SVM dual in the labeled points with
/// Gram matrix `J K (2 gamma_a I + 2 gamma_i L K)^{-1} J'` and box `1/l`.
pub fn train_lapsvm(
    labeled: &[Vec<f64>],
    labels: &[Label],
    unlabeled: &[Vec<f64>],
    graph: &AffinityGraph,
    cfg: &LapSvmConfig,
) -> Result<LapSvmModel> {
    let l = labeled.len();
    if l == 0 {
        return Err(Error::EmptyInput("Laplacian SVM needs labeled points"));
    }
    if labels.len() != l {
        return Err(Error::DimensionMismatch {
            expected: l,
            actual: labels.len(),
        });
    }
    let n = l + unlabeled.len();
    if graph.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: graph.n(),
        });
    }
    if !(cfg.gamma_a > 0.0) {
        return Err(Error::param("gamma_a", "must be positive"));
    }
    if !(cfg.gamma_i >= 0.0) {
        return Err(Error::param("gamma_i", "must be nonnegative"));
    }
    let n_pos = labels.iter().filter(|s| s.is_positive()).count();
    if n_pos == 0 || n_pos == l {
        return Err(Error::DegenerateLabels(
            "Laplacian SVM needs both classes among labeled points".into(),
        ));
    }

    let points: Vec<Vec<f64>> = labeled.iter().chain(unlabeled).cloned().collect();
    let mut gram = kernel_matrix(&points, cfg.kernel)?;
    gram.add_to_diagonal(JITTER);
    let k = DMatrix::from_row_slice(n, n, gram.values());

    // M = 2 gamma_a I + 2 gamma_i L K
    let mut m = graph.laplacian() * &k * (2.0 * cfg.gamma_i);
    for i in 0..n {
        m[(i, i)] += 2.0 * cfg.gamma_a;
    }
    let mut jt = DMatrix::zeros(n, l);
    for i in 0..l {
        jt[(i, i)] = 1.0;
    }
    let x = m
        .lu()
        .solve(&jt)
        .ok_or_else(|| Error::Numerical("Laplacian SVM system is singular".into()))?;
    let reduced = k.rows(0, l) * &x;

    let mut values = vec![0.0; l * l];
    for i in 0..l {
        for j in 0..l {
            values[i * l + j] = 0.5 * (reduced[(i, j)] + reduced[(j, i)]);
        }
    }
    let reduced = KernelMatrix::from_values(l, values)?;
    let cost = vec![1.0 / l as f64; l];
    let sol = solve_dual(&reduced, labels, &cost, &cfg.solver)?;
    if !sol.converged {
        log::debug!("Laplacian SVM dual stopped after {} iterations", sol.iterations);
    }

    let y_beta: Vec<f64> = sol
        .alpha
        .iter()
        .zip(labels)
        .map(|(b, s)| b * s.sign())
        .collect();
    let alpha: Vec<f64> = (0..n)
        .map(|i| (0..l).map(|j| x[(i, j)] * y_beta[j]).sum())
        .collect();
    Ok(LapSvmModel {
        points,
        alpha,
        bias: sol.bias,
        kernel: cfg.kernel,
        converged: sol.converged,
    })
}
