use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, KernelMatrix, KernelSpec};
use crate::lpu::PuDataset;
use crate::svm::{
    primal_objective, train_svm_with_gram, DecisionFunction, Label, SolverOptions, SvmModel,
    TrainingProblem,
};

/// Initial transductive cost of the negative class.
const C_STAR_START: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TsvmConfig {
    /// Cost of the training examples.
    pub c: f64,
    /// Target cost of the test examples. Zero disables transduction.
    pub c_star: f64,
    /// Fraction of test examples labeled positive. `None` uses the positive
    /// fraction of the training set.
    pub num_pos_fraction: Option<f64>,
    pub kernel: KernelSpec,
    pub solver: SolverOptions,
    /// Cap on accepted switches per annealing stage.
    pub max_switches_per_stage: usize,
}

impl Default for TsvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            c_star: 1.0,
            num_pos_fraction: None,
            kernel: KernelSpec::Linear,
            solver: SolverOptions::default(),
            max_switches_per_stage: 100,
        }
    }
}

/// One accepted label switch of test examples `pair.0` (was positive) and
/// `pair.1` (was negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchRecord {
    pub stage: usize,
    pub pair: (usize, usize),
    /// Primal objective before the switch, at the current stage's costs.
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone)]
pub struct TsvmFit {
    pub model: SvmModel,
    /// Final transductive labels of the test examples.
    pub test_labels: Vec<Label>,
    pub switches: Vec<SwitchRecord>,
    pub stages: usize,
}

impl DecisionFunction for TsvmFit {
    fn decision_value(&self, x: &[f64]) -> Result<f64> {
        self.model.decision_value(x)
    }
}

fn rank_labels(margins: &[f64], n_pos: usize) -> Vec<Label> {
    let mut order: Vec<usize> = (0..margins.len()).collect();
    order.sort_by(|&a, &b| margins[b].total_cmp(&margins[a]).then(a.cmp(&b)));
    let mut labels = vec![Label::Negative; margins.len()];
    for &i in order.iter().take(n_pos) {
        labels[i] = Label::Positive;
    }
    labels
}

struct Transductive<'a> {
    x: Vec<Vec<f64>>,
    train: &'a PuDataset,
    gram: KernelMatrix,
    cfg: &'a TsvmConfig,
}

impl Transductive<'_> {
    fn problem(&self, test_labels: &[Label], c_neg: f64, c_pos: f64) -> Result<TrainingProblem> {
        let mut labels = self.train.s().to_vec();
        labels.extend_from_slice(test_labels);
        let mut cost = vec![self.cfg.c; self.train.len()];
        cost.extend(
            test_labels
                .iter()
                .map(|l| if l.is_positive() { c_pos } else { c_neg }),
        );
        TrainingProblem::new(self.x.clone(), labels, cost, self.cfg.kernel)
    }

    fn fit(&self, test_labels: &[Label], c_neg: f64, c_pos: f64) -> Result<(SvmModel, f64, Vec<f64>)> {
        let problem = self.problem(test_labels, c_neg, c_pos)?;
        let model = train_svm_with_gram(&problem, &self.gram, &self.cfg.solver)?;
        let objective = primal_objective(&problem, &self.gram, &model);
        let offset = self.train.len();
        let slacks = test_labels
            .iter()
            .enumerate()
            .map(|(t, l)| {
                let f: f64 = model
                    .coefs()
                    .iter()
                    .zip(model.support_indices())
                    .map(|(a, &j)| a * self.gram.get(offset + t, j))
                    .sum::<f64>()
                    + model.bias();
                (1.0 - l.sign() * f).max(0.0)
            })
            .collect();
        Ok((model, objective, slacks))
    }
}

/// Pair of opposite-labeled test examples with positive slacks summing past 2,
/// maximizing that sum. Returned as `(positive, negative)`.
fn best_pair(labels: &[Label], slack: &[f64]) -> Option<(usize, usize)> {
    let best = |want: Label| {
        (0..labels.len())
            .filter(|&i| labels[i] == want && slack[i] > 0.0)
            .max_by(|&a, &b| slack[a].total_cmp(&slack[b]).then(b.cmp(&a)))
    };
    let (p, n) = (best(Label::Positive)?, best(Label::Negative)?);
    (slack[p] + slack[n] > 2.0).then_some((p, n))
}

/// Transductive SVM by label switching with annealed test costs.
///
/// Test labels start from the ranking of an inductive SVM's margins, with
/// `num_pos_fraction` of them positive. The test costs start at `1e-5`
/// (positives scaled by the class ratio) and double up to `c_star`. Within a
/// stage the pair with the largest joint slack is switched and the SVM
/// refit; a switch is kept only if it lowers the primal objective.
pub fn train_tsvm(train: &PuDataset, test_x: &[Vec<f64>], cfg: &TsvmConfig) -> Result<TsvmFit> {
    if !(cfg.c > 0.0) {
        return Err(Error::param("c", "must be positive"));
    }
    if !(cfg.c_star >= 0.0 && cfg.c_star.is_finite()) {
        return Err(Error::param("c_star", "must be a nonnegative number"));
    }
    let frac = cfg
        .num_pos_fraction
        .unwrap_or(train.n_positive() as f64 / train.len() as f64);
    if !(frac > 0.0 && frac < 1.0) {
        return Err(Error::param("num_pos_fraction", "must lie in (0, 1)"));
    }
    if let Some(bad) = test_x.iter().find(|r| r.len() != train.dim()) {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            actual: bad.len(),
        });
    }

    let inductive = TrainingProblem::with_uniform_cost(
        train.x().to_vec(),
        train.s().to_vec(),
        cfg.c,
        cfg.kernel,
    )?;
    let x: Vec<Vec<f64>> = train.x().iter().chain(test_x).cloned().collect();
    let gram = kernel_matrix(&x, cfg.kernel)?;
    let n_train = train.len();
    let train_gram = {
        let mut v = Vec::with_capacity(n_train * n_train);
        for i in 0..n_train {
            v.extend_from_slice(&gram.row(i)[..n_train]);
        }
        KernelMatrix::from_values(n_train, v)?
    };
    let initial = train_svm_with_gram(&inductive, &train_gram, &cfg.solver)?;
    let n_test = test_x.len();
    let n_pos = ((n_test as f64) * frac).round() as usize;
    let mut labels = rank_labels(&initial.decision_values(test_x)?, n_pos);
    if n_test == 0 || cfg.c_star == 0.0 {
        return Ok(TsvmFit {
            model: initial,
            test_labels: labels,
            switches: Vec::new(),
            stages: 0,
        });
    }

    let ctx = Transductive {
        x,
        train,
        gram,
        cfg,
    };
    let n_neg = n_test - n_pos;
    let mut c_neg = C_STAR_START.min(cfg.c_star);
    let mut c_pos = (C_STAR_START * n_pos as f64 / n_neg.max(1) as f64).min(cfg.c_star);
    let mut switches = Vec::new();
    let mut stage = 0;
    let mut current = ctx.fit(&labels, c_neg, c_pos)?;
    loop {
        let mut accepted = 0;
        while accepted < cfg.max_switches_per_stage {
            let Some((p, n)) = best_pair(&labels, &current.2) else {
                break;
            };
            let mut trial = labels.clone();
            trial[p] = Label::Negative;
            trial[n] = Label::Positive;
            let next = ctx.fit(&trial, c_neg, c_pos)?;
            if next.1 >= current.1 {
                log::debug!(
                    "tsvm stage {stage}: switch ({p}, {n}) rejected, objective {} -> {}",
                    current.1,
                    next.1
                );
                break;
            }
            switches.push(SwitchRecord {
                stage,
                pair: (p, n),
                before: current.1,
                after: next.1,
            });
            labels = trial;
            current = next;
            accepted += 1;
        }
        stage += 1;
        if c_neg >= cfg.c_star && c_pos >= cfg.c_star {
            break;
        }
        c_neg = (2.0 * c_neg).min(cfg.c_star);
        c_pos = (2.0 * c_pos).min(cfg.c_star);
        current = ctx.fit(&labels, c_neg, c_pos)?;
    }
    log::debug!("tsvm: {} switches over {stage} stages", switches.len());
    Ok(TsvmFit {
        model: current.0,
        test_labels: labels,
        switches,
        stages: stage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svm::train_svm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn clusters(rng: &mut ChaCha8Rng, n: usize, gap: f64) -> (Vec<Vec<f64>>, Vec<Label>) {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let pos = i % 2 == 0;
            let c = if pos { gap } else { -gap };
            x.push(vec![c + rng.random_range(-0.5..0.5), rng.random_range(-3.0..3.0)]);
            y.push(if pos { Label::Positive } else { Label::Negative });
        }
        (x, y)
    }

    #[test]
    fn zero_target_cost_is_the_inductive_svm() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (x, y) = clusters(&mut rng, 20, 1.0);
        let (tx, _) = clusters(&mut rng, 10, 1.0);
        let train = PuDataset::from_xs(x.clone(), y.clone()).unwrap();
        let cfg = TsvmConfig {
            c_star: 0.0,
            ..TsvmConfig::default()
        };
        let fit = train_tsvm(&train, &tx, &cfg).unwrap();
        let naive = train_svm(
            &TrainingProblem::with_uniform_cost(x, y, cfg.c, cfg.kernel).unwrap(),
            &cfg.solver,
        )
        .unwrap();
        assert_eq!(fit.model.decision_values(&tx).unwrap(), naive.decision_values(&tx).unwrap());
        assert!(fit.switches.is_empty());
    }

    #[test]
    fn accepted_switches_lower_the_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut total = 0;
        for _ in 0..5 {
            let (x, mut y) = clusters(&mut rng, 30, 0.6);
            // noisy training labels make the initial test labeling imperfect
            for l in y.iter_mut().take(6) {
                *l = l.flipped();
            }
            let (tx, _) = clusters(&mut rng, 40, 0.6);
            let train = PuDataset::from_xs(x, y).unwrap();
            let cfg = TsvmConfig {
                c: 1.0,
                c_star: 1.0,
                num_pos_fraction: Some(0.5),
                kernel: KernelSpec::Linear,
                solver: SolverOptions::default().with_tol(1e-6),
                max_switches_per_stage: 50,
            };
            let fit = train_tsvm(&train, &tx, &cfg).unwrap();
            total += fit.switches.len();
            for s in &fit.switches {
                assert!(s.after < s.before, "{s:?}");
            }
            for w in fit.switches.windows(2) {
                if w[0].stage == w[1].stage {
                    assert!(w[1].before <= w[0].after + 1e-12);
                }
            }
            let n_pos = fit.test_labels.iter().filter(|l| l.is_positive()).count();
            assert_eq!(n_pos, 20);
        }
        assert!(total > 0, "no switch was exercised");
    }

    #[test]
    fn separable_clusters_get_ground_truth_labels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (x, y) = clusters(&mut rng, 10, 2.0);
        let (tx, ty) = clusters(&mut rng, 30, 2.0);
        let train = PuDataset::from_xs(x, y).unwrap();
        let fit = train_tsvm(&train, &tx, &TsvmConfig::default()).unwrap();
        assert_eq!(fit.test_labels, ty);
        for (v, l) in fit.model.decision_values(&tx).unwrap().iter().zip(&ty) {
            assert_eq!(*v > 0.0, l.is_positive());
        }
    }

    #[test]
    fn empty_test_set_reduces_to_inductive_svm() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (x, y) = clusters(&mut rng, 10, 1.0);
        let fit = train_tsvm(&PuDataset::from_xs(x, y).unwrap(), &[], &TsvmConfig::default()).unwrap();
        assert!(fit.test_labels.is_empty());
        assert_eq!(fit.stages, 0);
    }
}
