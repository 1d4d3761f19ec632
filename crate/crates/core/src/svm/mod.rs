//! Soft-margin SVM with a per-example capacity, solved in the dual by SMO,
//! plus Platt sigmoid calibration.
//!
//! Every SVM-based learner in the crate reduces to [`train_svm`]: the naive
//! SVM uses a uniform cost, the Biased SVM two costs (one for positives, one
//! for unlabeled examples), and the Weighted SVM fractional per-example costs.

mod platt;
mod smo;

pub use platt::{platt_fit, platt_prob, PlattModel};
pub use smo::{solve_dual, DualSolution};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, KernelMatrix, KernelSpec};

/// Binary label. For PU data `Negative` is the observed label of an unlabeled example.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn from_sign(v: f64) -> Result<Self> {
        if v == 1.0 {
            Ok(Label::Positive)
        } else if v == -1.0 {
            Ok(Label::Negative)
        } else {
            Err(Error::InvalidData(format!("label must be +1 or -1, got {v}")))
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

/// Anything that maps a feature vector to a real-valued margin.
pub trait DecisionFunction: Send + Sync {
    fn decision_value(&self, x: &[f64]) -> Result<f64>;

    fn decision_values(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        rows.par_iter().map(|x| self.decision_value(x)).collect()
    }
}

/// Inputs to [`train_svm`].
#[derive(Debug, Clone)]
pub struct TrainingProblem {
    x: Vec<Vec<f64>>,
    labels: Vec<Label>,
    cost: Vec<f64>,
    kernel: KernelSpec,
}

impl TrainingProblem {
    /// Costs must be positive; `f64::INFINITY` gives a hard-margin example.
    pub fn new(
        x: Vec<Vec<f64>>,
        labels: Vec<Label>,
        cost: Vec<f64>,
        kernel: KernelSpec,
    ) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyInput("training problem has no examples"));
        }
        if labels.len() != x.len() || cost.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: if labels.len() != x.len() {
                    labels.len()
                } else {
                    cost.len()
                },
            });
        }
        let dim = x[0].len();
        if let Some(bad) = x.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        if let Some(c) = cost.iter().find(|c| !(**c > 0.0)) {
            return Err(Error::param("cost", format!("every cost must be > 0, got {c}")));
        }
        let n_pos = labels.iter().filter(|l| l.is_positive()).count();
        if n_pos == 0 || n_pos == labels.len() {
            return Err(Error::DegenerateLabels(
                "training problem needs both a positive and a negative example".into(),
            ));
        }
        kernel.validate()?;
        Ok(Self {
            x,
            labels,
            cost,
            kernel,
        })
    }

    pub fn with_uniform_cost(
        x: Vec<Vec<f64>>,
        labels: Vec<Label>,
        c: f64,
        kernel: KernelSpec,
    ) -> Result<Self> {
        let n = x.len();
        Self::new(x, labels, vec![c; n], kernel)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x[0].len()
    }

    pub fn x(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn gram(&self) -> KernelMatrix {
        kernel_matrix(&self.x, self.kernel).expect("validated at construction")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stopping tolerance on the maximal KKT violation.
    pub tol: f64,
    /// Budget in passes; one pass is `n` pair updates. `None` means `10 * n` passes.
    pub max_passes: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_passes: None,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_passes(mut self, passes: usize) -> Self {
        self.max_passes = Some(passes);
        self
    }

    pub(crate) fn max_iterations(&self, n: usize) -> usize {
        let passes = self.max_passes.unwrap_or(10 * n);
        passes.saturating_mul(n).max(1)
    }
}

/// Trained kernel SVM. Immutable once built.
#[derive(Debug, Clone)]
pub struct SvmModel {
    support_indices: Vec<usize>,
    /// Signed dual coefficients `alpha_i * y_i`, one per support.
    coefs: Vec<f64>,
    support_vectors: Vec<Vec<f64>>,
    bias: f64,
    kernel: KernelSpec,
    dim: usize,
    converged: bool,
    iterations: usize,
    dual_objective: f64,
}

impl SvmModel {
    pub(crate) fn from_solution(problem: &TrainingProblem, sol: &DualSolution) -> Self {
        let mut support_indices = Vec::new();
        let mut coefs = Vec::new();
        let mut support_vectors = Vec::new();
        for (i, &a) in sol.alpha.iter().enumerate() {
            if a > 0.0 {
                support_indices.push(i);
                coefs.push(a * problem.labels[i].sign());
                support_vectors.push(problem.x[i].clone());
            }
        }
        Self {
            support_indices,
            coefs,
            support_vectors,
            bias: sol.bias,
            kernel: problem.kernel,
            dim: problem.dim(),
            converged: sol.converged,
            iterations: sol.iterations,
            dual_objective: sol.objective,
        }
    }

    /// A model with no supports: its decision value is `bias` everywhere.
    pub fn constant(bias: f64, kernel: KernelSpec, dim: usize) -> Self {
        Self {
            support_indices: Vec::new(),
            coefs: Vec::new(),
            support_vectors: Vec::new(),
            bias,
            kernel,
            dim,
            converged: true,
            iterations: 0,
            dual_objective: 0.0,
        }
    }

    pub fn support_indices(&self) -> &[usize] {
        &self.support_indices
    }

    pub fn coefs(&self) -> &[f64] {
        &self.coefs
    }

    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support_vectors
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn dual_objective(&self) -> f64 {
        self.dual_objective
    }

    /// Primal weight vector; only defined for the linear kernel.
    pub fn linear_weights(&self) -> Option<Vec<f64>> {
        if self.kernel != KernelSpec::Linear {
            return None;
        }
        let mut w = vec![0.0; self.dim];
        for (c, sv) in self.coefs.iter().zip(&self.support_vectors) {
            for (wk, xk) in w.iter_mut().zip(sv) {
                *wk += c * xk;
            }
        }
        Some(w)
    }
}

impl DecisionFunction for SvmModel {
    fn decision_value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: x.len(),
            });
        }
        let sum: f64 = self
            .coefs
            .iter()
            .zip(&self.support_vectors)
            .map(|(c, sv)| c * self.kernel.apply(sv, x))
            .sum();
        Ok(sum + self.bias)
    }
}

/// Trains a kernel SVM on `problem`.
///
/// A run that exhausts its iteration budget still returns a model, with
/// [`SvmModel::converged`] set to `false`.
pub fn train_svm(problem: &TrainingProblem, opts: &SolverOptions) -> Result<SvmModel> {
    let gram = problem.gram();
    train_svm_with_gram(problem, &gram, opts)
}

/// Same as [`train_svm`] with a precomputed Gram matrix of `problem.x()`.
pub fn train_svm_with_gram(
    problem: &TrainingProblem,
    gram: &KernelMatrix,
    opts: &SolverOptions,
) -> Result<SvmModel> {
    if gram.n() != problem.len() {
        return Err(Error::DimensionMismatch {
            expected: problem.len(),
            actual: gram.n(),
        });
    }
    let sol = solve_dual(gram, &problem.labels, &problem.cost, opts)?;
    if !sol.converged {
        log::debug!(
            "SMO stopped after {} iterations without reaching tol {}",
            sol.iterations,
            opts.tol
        );
    }
    Ok(SvmModel::from_solution(problem, &sol))
}

/// Primal objective `1/2 ||w||^2 + sum_i C_i max(0, 1 - y_i f(x_i))` of a
/// model trained on `problem`, whose Gram matrix is `gram`.
pub fn primal_objective(problem: &TrainingProblem, gram: &KernelMatrix, model: &SvmModel) -> f64 {
    let sv = model.support_indices();
    let coefs = model.coefs();
    let mut w_norm = 0.0;
    for (a, &i) in coefs.iter().zip(sv) {
        for (b, &j) in coefs.iter().zip(sv) {
            w_norm += a * b * gram.get(i, j);
        }
    }
    let mut loss = 0.0;
    for i in 0..problem.len() {
        let f: f64 = coefs
            .iter()
            .zip(sv)
            .map(|(a, &j)| a * gram.get(i, j))
            .sum::<f64>()
            + model.bias();
        let slack = (1.0 - problem.labels()[i].sign() * f).max(0.0);
        loss += problem.cost()[i] * slack;
    }
    0.5 * w_norm + loss
}

/// Largest KKT violation of `alpha` for the problem with Gram matrix `gram`,
/// measured on the functional margins `y_i f(x_i)`.
pub fn kkt_violation(
    gram: &KernelMatrix,
    labels: &[Label],
    cost: &[f64],
    alpha: &[f64],
    bias: f64,
) -> f64 {
    let n = labels.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let f: f64 = (0..n)
            .map(|j| alpha[j] * labels[j].sign() * gram.get(i, j))
            .sum::<f64>()
            + bias;
        let m = labels[i].sign() * f;
        let v = if alpha[i] <= 0.0 {
            (1.0 - m).max(0.0)
        } else if alpha[i] >= cost[i] {
            (m - 1.0).max(0.0)
        } else {
            (m - 1.0).abs()
        };
        worst = worst.max(v);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_point() -> TrainingProblem {
        TrainingProblem::with_uniform_cost(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0]],
            vec![Label::Positive, Label::Negative],
            1.0,
            KernelSpec::Linear,
        )
        .unwrap()
    }

    #[test]
    fn two_point_analytic_solution() {
        let model = train_svm(&two_point(), &SolverOptions::default()).unwrap();
        assert!(model.converged());
        let w = model.linear_weights().unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12 && w[1].abs() < 1e-12, "w = {w:?}");
        assert!(model.bias().abs() < 1e-12);
        assert!((model.decision_value(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((model.decision_value(&[-1.0, 0.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(model.decision_value(&[0.0, 0.0]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn two_point_boundary_is_perpendicular_bisector() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let b: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let p = TrainingProblem::with_uniform_cost(
                vec![a.clone(), b.clone()],
                vec![Label::Positive, Label::Negative],
                1e6,
                KernelSpec::Linear,
            )
            .unwrap();
            let model = train_svm(&p, &SolverOptions::default().with_tol(1e-9)).unwrap();
            let mid: Vec<f64> = a.iter().zip(&b).map(|(u, v)| (u + v) / 2.0).collect();
            assert!(model.decision_value(&mid).unwrap().abs() < 1e-6);
            // w must be parallel to a - b
            let w = model.linear_weights().unwrap();
            let d = [a[0] - b[0], a[1] - b[1]];
            assert!((w[0] * d[1] - w[1] * d[0]).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_model_returns_bias() {
        let m = SvmModel::constant(0.25, KernelSpec::Linear, 3);
        assert_eq!(m.decision_value(&[1.0, 2.0, 3.0]).unwrap(), 0.25);
        assert!(m.decision_value(&[1.0]).is_err());
    }

    #[test]
    fn problem_validation() {
        let x = vec![vec![0.0], vec![1.0]];
        assert!(TrainingProblem::new(
            x.clone(),
            vec![Label::Positive, Label::Positive],
            vec![1.0, 1.0],
            KernelSpec::Linear
        )
        .is_err());
        assert!(TrainingProblem::new(
            x.clone(),
            vec![Label::Positive, Label::Negative],
            vec![1.0, 0.0],
            KernelSpec::Linear
        )
        .is_err());
        assert!(TrainingProblem::new(
            x.clone(),
            vec![Label::Positive],
            vec![1.0, 1.0],
            KernelSpec::Linear
        )
        .is_err());
        assert!(TrainingProblem::new(
            vec![vec![0.0], vec![1.0, 2.0]],
            vec![Label::Positive, Label::Negative],
            vec![1.0, 1.0],
            KernelSpec::Linear
        )
        .is_err());
        assert!(Label::from_sign(0.0).is_err());
    }

    #[test]
    fn exhausted_budget_is_flagged_not_fatal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<Vec<f64>> = (0..40)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let labels: Vec<Label> = (0..40)
            .map(|i| if i % 2 == 0 { Label::Positive } else { Label::Negative })
            .collect();
        let p = TrainingProblem::with_uniform_cost(x, labels, 100.0, KernelSpec::gaussian(5.0).unwrap())
            .unwrap();
        let model = train_svm(&p, &SolverOptions::default().with_tol(1e-12).with_max_passes(0))
            .unwrap();
        assert!(!model.converged());
    }

    #[test]
    fn doubling_cost_on_separable_data_keeps_training_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut x = Vec::new();
        let mut labels = Vec::new();
        for i in 0..30 {
            let pos = i % 2 == 0;
            let shift = if pos { 2.0 } else { -2.0 };
            x.push(vec![shift + rng.random_range(-0.5..0.5), rng.random_range(-1.0..1.0)]);
            labels.push(if pos { Label::Positive } else { Label::Negative });
        }
        let base: Vec<f64> = (0..30).map(|_| rng.random_range(0.1..2.0)).collect();
        let doubled: Vec<f64> = base.iter().map(|c| 2.0 * c).collect();
        let opts = SolverOptions::default().with_tol(1e-6);
        let m1 = train_svm(
            &TrainingProblem::new(x.clone(), labels.clone(), base, KernelSpec::Linear).unwrap(),
            &opts,
        )
        .unwrap();
        let m2 = train_svm(
            &TrainingProblem::new(x.clone(), labels.clone(), doubled, KernelSpec::Linear).unwrap(),
            &opts,
        )
        .unwrap();
        for xi in &x {
            let a = m1.decision_value(xi).unwrap();
            let b = m2.decision_value(xi).unwrap();
            assert_eq!(a > 0.0, b > 0.0);
        }
    }
}
