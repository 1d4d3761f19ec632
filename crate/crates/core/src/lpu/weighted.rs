use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::biased::{lee_liu_score, GridCell, GridEntry, GridSearchReport};
use super::PuDataset;
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::svm::{
    platt_fit, train_svm, DecisionFunction, Label, PlattModel, SolverOptions, SvmModel,
    TrainingProblem,
};

const G_CEILING: f64 = 1.0 - 1e-6;
const E_FLOOR: f64 = 1e-6;
/// Duplicated examples lighter than this are dropped from the resampled problem.
pub const MIN_WEIGHT: f64 = 1e-4;

/// A model that outputs `p(s = 1 | x)`.
pub trait ProbabilisticClassifier: Sync {
    fn probability(&self, x: &[f64]) -> Result<f64>;
}

impl<F> ProbabilisticClassifier for F
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn probability(&self, x: &[f64]) -> Result<f64> {
        Ok(self(x))
    }
}

/// An SVM followed by a Platt sigmoid.
#[derive(Debug, Clone)]
pub struct CalibratedSvm {
    pub svm: SvmModel,
    pub platt: PlattModel,
}

impl ProbabilisticClassifier for CalibratedSvm {
    fn probability(&self, x: &[f64]) -> Result<f64> {
        Ok(self.platt.prob(self.svm.decision_value(x)?))
    }
}

/// Mean of `g` over held-out labeled positives, clipped to `[1e-6, 1]`.
pub fn estimate_label_frequency<G: ProbabilisticClassifier + ?Sized>(
    g: &G,
    validation_positives: &[Vec<f64>],
) -> Result<f64> {
    if validation_positives.is_empty() {
        return Err(Error::EmptyInput("no validation positives to estimate p(s=1|y=1)"));
    }
    let mut sum = 0.0;
    for x in validation_positives {
        sum += g.probability(x)?;
    }
    Ok((sum / validation_positives.len() as f64).clamp(E_FLOOR, 1.0))
}

/// `p(y = 1 | x, s = -1) = (1 - e)/e * g/(1 - g)`, clipped to `[0, 1]`.
///
/// `g_x` is capped at `1 - 1e-6` first.
pub fn unlabeled_posterior_weight(g_x: f64, e: f64) -> f64 {
    let g = g_x.clamp(0.0, G_CEILING);
    let e = e.clamp(E_FLOOR, 1.0);
    let w = (1.0 - e) / e * (g / (1.0 - g));
    w.clamp(0.0, 1.0)
}

/// Builds the resampled problem: positives keep weight 1, each unlabeled
/// example becomes a positive copy of weight `w` and a negative copy of
/// weight `1 - w`. Costs are `base_c * weight`; copies lighter than
/// [`MIN_WEIGHT`] are dropped.
///
/// `unlabeled_probs[i]` is `g(x)` for the `i`-th unlabeled example of `data`
/// in order of appearance.
pub fn weighted_problem(
    data: &PuDataset,
    unlabeled_probs: &[f64],
    e: f64,
    base_c: f64,
    kernel: KernelSpec,
) -> Result<TrainingProblem> {
    let n_unl = data.len() - data.n_positive();
    if unlabeled_probs.len() != n_unl {
        return Err(Error::DimensionMismatch {
            expected: n_unl,
            actual: unlabeled_probs.len(),
        });
    }
    let mut x = Vec::with_capacity(data.len() + n_unl);
    let mut labels = Vec::with_capacity(data.len() + n_unl);
    let mut cost = Vec::with_capacity(data.len() + n_unl);
    let mut probs = unlabeled_probs.iter();
    for (xi, s) in data.x().iter().zip(data.s()) {
        if s.is_positive() {
            x.push(xi.clone());
            labels.push(Label::Positive);
            cost.push(base_c);
            continue;
        }
        let w = unlabeled_posterior_weight(*probs.next().expect("length checked"), e);
        for (label, weight) in [(Label::Positive, w), (Label::Negative, 1.0 - w)] {
            if weight >= MIN_WEIGHT {
                x.push(xi.clone());
                labels.push(label);
                cost.push(base_c * weight);
            }
        }
    }
    TrainingProblem::new(x, labels, cost, kernel)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedSvmConfig {
    /// Fraction of the training data used to fit `g`; the rest calibrates it.
    pub split_fraction: f64,
    pub base_c: f64,
    pub kernel: KernelSpec,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl Default for WeightedSvmConfig {
    fn default() -> Self {
        Self {
            split_fraction: 2.0 / 3.0,
            base_c: 1.0,
            kernel: KernelSpec::Linear,
            seed: 0,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WeightedSvmFit {
    pub model: SvmModel,
    /// The calibrated first-stage classifier `g`.
    pub g: CalibratedSvm,
    /// Estimated `p(s = 1 | y = 1)`.
    pub label_frequency: f64,
    pub resampled_size: usize,
}

impl DecisionFunction for WeightedSvmFit {
    fn decision_value(&self, x: &[f64]) -> Result<f64> {
        self.model.decision_value(x)
    }
}

/// Stratified split into `(fit, validation)` index sets.
fn stratified_split(data: &PuDataset, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fit = Vec::new();
    let mut val = Vec::new();
    for class in [Label::Positive, Label::Negative] {
        let mut idx: Vec<usize> = (0..data.len()).filter(|&i| data.s()[i] == class).collect();
        idx.shuffle(&mut rng);
        let n_fit = ((idx.len() as f64) * fraction).round() as usize;
        let n_fit = n_fit.min(idx.len());
        fit.extend_from_slice(&idx[..n_fit]);
        val.extend_from_slice(&idx[n_fit..]);
    }
    fit.sort_unstable();
    val.sort_unstable();
    (fit, val)
}

/// Elkan–Noto weighted SVM.
pub fn train_weighted_svm(train: &PuDataset, cfg: &WeightedSvmConfig) -> Result<WeightedSvmFit> {
    if !(cfg.split_fraction > 0.0 && cfg.split_fraction < 1.0) {
        return Err(Error::param("split_fraction", "must lie strictly between 0 and 1"));
    }
    if !(cfg.base_c > 0.0) {
        return Err(Error::param("base_c", "must be positive"));
    }
    let (fit_idx, val_idx) = stratified_split(train, cfg.split_fraction, cfg.seed);
    let (fx, fs, _) = train.subset(&fit_idx);
    let (vx, vs, _) = train.subset(&val_idx);
    if !vs.iter().any(|l| l.is_positive()) {
        return Err(Error::DegenerateLabels(format!(
            "validation part has no positives; use a smaller split_fraction than {}",
            cfg.split_fraction
        )));
    }
    if !vs.iter().any(|l| !l.is_positive()) {
        return Err(Error::DegenerateLabels(
            "validation part has no unlabeled examples to calibrate against".into(),
        ));
    }

    // class-balanced costs: with label frequency below 1/2 the unweighted
    // hinge minimizer on s is nearly constant and its margins rank nothing
    let n_fit_pos = fs.iter().filter(|l| l.is_positive()).count();
    if n_fit_pos == 0 || n_fit_pos == fs.len() {
        return Err(Error::DegenerateLabels("fit part needs labeled and unlabeled examples".into()));
    }
    let half = fs.len() as f64 / 2.0;
    let (c_pos, c_unl) = (
        cfg.base_c * half / n_fit_pos as f64,
        cfg.base_c * half / (fs.len() - n_fit_pos) as f64,
    );
    let g_cost = fs.iter().map(|l| if l.is_positive() { c_pos } else { c_unl }).collect();
    let g_problem = TrainingProblem::new(fx, fs, g_cost, cfg.kernel)?;
    let g_svm = train_svm(&g_problem, &cfg.solver)?;
    let val_margins = g_svm.decision_values(&vx)?;
    let platt = platt_fit(&val_margins, &vs)?;
    let g = CalibratedSvm { svm: g_svm, platt };

    let val_pos: Vec<Vec<f64>> = vx
        .iter()
        .zip(&vs)
        .filter(|(_, l)| l.is_positive())
        .map(|(x, _)| x.clone())
        .collect();
    let e = estimate_label_frequency(&g, &val_pos)?;

    let unlabeled: Vec<Vec<f64>> = train
        .x()
        .iter()
        .zip(train.s())
        .filter(|(_, l)| !l.is_positive())
        .map(|(x, _)| x.clone())
        .collect();
    let probs: Vec<f64> = g
        .svm
        .decision_values(&unlabeled)?
        .into_iter()
        .map(|m| g.platt.prob(m))
        .collect();
    let problem = weighted_problem(train, &probs, e, cfg.base_c, cfg.kernel)?;
    log::debug!(
        "weighted SVM: e = {e:.4}, resampled {} -> {} examples",
        train.len(),
        problem.len()
    );
    let model = train_svm(&problem, &cfg.solver)?;
    Ok(WeightedSvmFit {
        resampled_size: problem.len(),
        model,
        g,
        label_frequency: e,
    })
}

/// Chooses `base_c` (and the kernel) by the Lee–Liu score on `dev`, then
/// retrains on `train ∪ dev`.
pub fn tune_weighted_svm(
    train: &PuDataset,
    dev: &PuDataset,
    c_values: &[f64],
    kernels: &[KernelSpec],
    cfg: &WeightedSvmConfig,
) -> Result<(WeightedSvmFit, GridSearchReport)> {
    if c_values.is_empty() || kernels.is_empty() {
        return Err(Error::param("grid", "needs at least one c and one kernel"));
    }
    let mut entries = Vec::new();
    for &kernel in kernels {
        for &c in c_values {
            let cell = GridCell { c, j: 1.0, kernel };
            let run = WeightedSvmConfig {
                base_c: c,
                kernel,
                ..*cfg
            };
            let (score, converged) = match train_weighted_svm(train, &run) {
                Ok(fit) => (lee_liu_score(&fit, dev)?, fit.model.converged()),
                Err(e @ Error::DegenerateLabels(_)) => return Err(e),
                Err(e) => {
                    log::warn!("weighted SVM cell c={c} kernel={kernel} failed: {e}");
                    (f64::NAN, false)
                }
            };
            entries.push(GridEntry {
                cell,
                score,
                converged,
            });
        }
    }
    let chosen = GridSearchReport::select(&entries)
        .ok_or_else(|| Error::NotConverged("no weighted SVM grid cell converged".into()))?;
    let report = GridSearchReport { entries, chosen };
    let cell = report.chosen_entry().cell;
    let full = train.union(dev)?;
    let fit = train_weighted_svm(
        &full,
        &WeightedSvmConfig {
            base_c: cell.c,
            kernel: cell.kernel,
            ..*cfg
        },
    )?;
    Ok((fit, report))
}
