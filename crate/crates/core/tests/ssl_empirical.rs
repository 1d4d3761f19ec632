//! Empirical checks of the semi-supervised learners on synthetic manifolds.

use lpu_core::kernel::KernelSpec;
use lpu_core::ssl::{train_lapsvm, AffinityGraph, LapSvmConfig};
use lpu_core::svm::{train_svm, DecisionFunction, Label, SolverOptions, TrainingProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Two interleaved half circles with Gaussian jitter.
fn moons(rng: &mut ChaCha8Rng, n: usize, noise: f64) -> (Vec<Vec<f64>>, Vec<Label>) {
    let jitter = Normal::new(0.0, noise).unwrap();
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let t = rng.random_range(0.0..std::f64::consts::PI);
        let (px, py, label) = if i % 2 == 0 {
            (t.cos(), t.sin(), Label::Positive)
        } else {
            (1.0 - t.cos(), 0.5 - t.sin(), Label::Negative)
        };
        x.push(vec![px + jitter.sample(rng), py + jitter.sample(rng)]);
        y.push(label);
    }
    (x, y)
}

fn accuracy(model: &dyn DecisionFunction, x: &[Vec<f64>], y: &[Label]) -> f64 {
    let v = model.decision_values(x).unwrap();
    v.iter().zip(y).filter(|(f, l)| (**f > 0.0) == l.is_positive()).count() as f64 / y.len() as f64
}

#[test]
fn lapsvm_beats_labeled_only_svm_on_two_moons() {
    let gamma_a = 0.03125;
    let gamma_i = 10.0;
    let kernel = KernelSpec::gaussian(5.0).unwrap();
    // a sparser graph than the pipeline default keeps the two moons apart
    let mut wins = 0;
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let (pool, truth) = moons(&mut rng, 202, 0.1);
        // one labeled point per moon
        let labeled = vec![pool[0].clone(), pool[1].clone()];
        let labels = vec![truth[0], truth[1]];
        let unlabeled = pool[2..].to_vec();
        let (test_x, test_y) = moons(&mut rng, 400, 0.1);

        let graph = AffinityGraph::knn(&pool, 6).unwrap();
        let cfg = LapSvmConfig {
            gamma_a,
            gamma_i,
            kernel,
            solver: SolverOptions::default().with_tol(1e-6),
        };
        let lap = train_lapsvm(&labeled, &labels, &unlabeled, &graph, &cfg).unwrap();
        let c = 1.0 / (2.0 * gamma_a * 2.0);
        let svm = train_svm(
            &TrainingProblem::with_uniform_cost(labeled.clone(), labels.clone(), c, kernel).unwrap(),
            &SolverOptions::default(),
        )
        .unwrap();
        let (a_lap, a_svm) = (accuracy(&lap, &test_x, &test_y), accuracy(&svm, &test_x, &test_y));
        if a_lap > a_svm {
            wins += 1;
        }
    }
    assert!(wins >= 24, "Laplacian SVM won only {wins}/30 seeds");
}
