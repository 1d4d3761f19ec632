use rayon::prelude::*;

use super::PuDataset;
use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, KernelKind, KernelSpec};
use crate::svm::{train_svm, train_svm_with_gram, DecisionFunction, SolverOptions, SvmModel, TrainingProblem};

/// Lee–Liu criterion `r^2 / Pr(f = 1)` on PU development data.
///
/// `r` is the fraction of labeled positives predicted positive and `Pr(f = 1)`
/// the fraction of all examples predicted positive. Zero when nothing is
/// predicted positive.
pub fn lee_liu_score<M: DecisionFunction + ?Sized>(model: &M, dev: &PuDataset) -> Result<f64> {
    if dev.is_empty() {
        return Err(Error::EmptyInput("development set is empty"));
    }
    let n_pos = dev.n_positive();
    if n_pos == 0 {
        return Err(Error::DegenerateLabels("development set has no positive".into()));
    }
    let values = model.decision_values(dev.x())?;
    let mut predicted = 0usize;
    let mut recalled = 0usize;
    for (v, s) in values.iter().zip(dev.s()) {
        if *v > 0.0 {
            predicted += 1;
            if s.is_positive() {
                recalled += 1;
            }
        }
    }
    if predicted == 0 {
        return Ok(0.0);
    }
    let r = recalled as f64 / n_pos as f64;
    let p_f1 = predicted as f64 / dev.len() as f64;
    Ok(r * r / p_f1)
}

/// Hyperparameter grid for the Biased SVM.
///
/// `gamma` entries are multipliers of `1 / dim`; they are ignored for the
/// linear kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasedGrid {
    pub c: Vec<f64>,
    pub j: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl Default for BiasedGrid {
    fn default() -> Self {
        Self {
            c: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            j: vec![0.5, 1.0, 2.0, 5.0, 10.0, 20.0],
            gamma: vec![0.01, 0.1, 0.5, 1.0, 2.0],
        }
    }
}

impl BiasedGrid {
    pub fn single(c: f64, j: f64, gamma: f64) -> Self {
        Self {
            c: vec![c],
            j: vec![j],
            gamma: vec![gamma],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.c.is_empty() || self.j.is_empty() || self.gamma.is_empty() {
            return Err(Error::param("grid", "every grid axis needs at least one value"));
        }
        for (name, axis) in [("c", &self.c), ("j", &self.j), ("gamma", &self.gamma)] {
            if let Some(v) = axis.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                return Err(Error::param("grid", format!("{name} value {v} must be positive")));
            }
        }
        Ok(())
    }

    /// Concrete kernels for `kind` on data of dimension `dim`.
    pub fn kernels(&self, kind: KernelKind, dim: usize) -> Vec<KernelSpec> {
        match kind {
            KernelKind::Linear => vec![KernelSpec::Linear],
            KernelKind::Gaussian => self
                .gamma
                .iter()
                .map(|g| KernelSpec::Gaussian {
                    gamma: g / dim.max(1) as f64,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub c: f64,
    pub j: f64,
    pub kernel: KernelSpec,
}

impl GridCell {
    fn gamma(&self) -> f64 {
        match self.kernel {
            KernelSpec::Linear => 0.0,
            KernelSpec::Gaussian { gamma } => gamma,
        }
    }

    /// Per-example costs: `j * c` for positives, `c` for unlabeled.
    pub fn costs(&self, data: &PuDataset) -> Vec<f64> {
        data.s()
            .iter()
            .map(|l| if l.is_positive() { self.j * self.c } else { self.c })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub cell: GridCell,
    pub score: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchReport {
    pub entries: Vec<GridEntry>,
    pub chosen: usize,
}

impl GridSearchReport {
    pub fn chosen_entry(&self) -> &GridEntry {
        &self.entries[self.chosen]
    }

    /// Index of the best converged entry: highest score, then smaller `c`,
    /// `j` and `gamma`.
    pub(crate) fn select(entries: &[GridEntry]) -> Option<usize> {
        entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.converged && e.score.is_finite())
            .min_by(|(_, a), (_, b)| {
                b.score
                    .total_cmp(&a.score)
                    .then(a.cell.c.total_cmp(&b.cell.c))
                    .then(a.cell.j.total_cmp(&b.cell.j))
                    .then(a.cell.gamma().total_cmp(&b.cell.gamma()))
            })
            .map(|(i, _)| i)
    }
}

pub(crate) fn biased_problem(data: &PuDataset, cell: &GridCell) -> Result<TrainingProblem> {
    TrainingProblem::new(
        data.x().to_vec(),
        data.s().to_vec(),
        cell.costs(data),
        cell.kernel,
    )
}

/// Exhaustive grid search over `(c, j[, gamma])`, scored by
/// [`lee_liu_score`] on `dev`; the winner is retrained on `train ∪ dev`.
pub fn train_biased_svm(
    train: &PuDataset,
    dev: &PuDataset,
    grid: &BiasedGrid,
    kind: KernelKind,
    opts: &SolverOptions,
) -> Result<(SvmModel, GridSearchReport)> {
    grid.validate()?;
    if train.dim() != dev.dim() {
        return Err(Error::DimensionMismatch {
            expected: train.dim(),
            actual: dev.dim(),
        });
    }
    let mut cells = Vec::new();
    for kernel in grid.kernels(kind, train.dim()) {
        for &c in &grid.c {
            for &j in &grid.j {
                cells.push(GridCell { c, j, kernel });
            }
        }
    }

    let mut entries = Vec::with_capacity(cells.len());
    for kernel in grid.kernels(kind, train.dim()) {
        let gram = kernel_matrix(train.x(), kernel)?;
        let block: Vec<GridEntry> = cells
            .par_iter()
            .filter(|cell| cell.kernel == kernel)
            .map(|cell| -> Result<GridEntry> {
                let problem = biased_problem(train, cell)?;
                let model = train_svm_with_gram(&problem, &gram, opts)?;
                let score = lee_liu_score(&model, dev)?;
                Ok(GridEntry {
                    cell: *cell,
                    score,
                    converged: model.converged(),
                })
            })
            .collect::<Result<_>>()?;
        entries.extend(block);
    }

    let chosen = GridSearchReport::select(&entries).ok_or_else(|| {
        Error::NotConverged(format!("all {} Biased SVM grid cells failed to converge", entries.len()))
    })?;
    let report = GridSearchReport { entries, chosen };
    let cell = report.chosen_entry().cell;
    log::info!(
        "biased SVM: chose c={} j={} kernel={} (score {:.4})",
        cell.c,
        cell.j,
        cell.kernel,
        report.chosen_entry().score
    );
    let full = train.union(dev)?;
    let model = train_svm(&biased_problem(&full, &cell)?, opts)?;
    Ok((model, report))
}
