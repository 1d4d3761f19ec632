use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, KernelSpec};
use crate::lpu::{GridCell, GridEntry, GridSearchReport, PuDataset};
use crate::svm::{train_svm, train_svm_with_gram, DecisionFunction, SolverOptions, SvmModel, TrainingProblem};

/// Fraction of `dev` whose observed label matches the sign of the margin.
fn observed_accuracy(model: &SvmModel, dev: &PuDataset) -> Result<f64> {
    let values = model.decision_values(dev.x())?;
    let hits = values
        .iter()
        .zip(dev.s())
        .filter(|(v, s)| (**v > 0.0) == s.is_positive())
        .count();
    Ok(hits as f64 / dev.len() as f64)
}

/// Plain SVM that treats unlabeled examples as negatives.
///
/// `C` and the kernel are chosen by accuracy on the observed labels of `dev`,
/// ties going to the smaller `C`; the winner is retrained on `train ∪ dev`.
pub fn train_naive_svm(
    train: &PuDataset,
    dev: &PuDataset,
    c_values: &[f64],
    kernels: &[KernelSpec],
    opts: &SolverOptions,
) -> Result<(SvmModel, GridSearchReport)> {
    if c_values.is_empty() || kernels.is_empty() {
        return Err(Error::param("grid", "needs at least one c and one kernel"));
    }
    if dev.is_empty() {
        return Err(Error::EmptyInput("development set is empty"));
    }
    let mut entries = Vec::new();
    for &kernel in kernels {
        let gram = kernel_matrix(train.x(), kernel)?;
        for &c in c_values {
            let problem =
                TrainingProblem::with_uniform_cost(train.x().to_vec(), train.s().to_vec(), c, kernel)?;
            let model = train_svm_with_gram(&problem, &gram, opts)?;
            entries.push(GridEntry {
                cell: GridCell { c, j: 1.0, kernel },
                score: observed_accuracy(&model, dev)?,
                converged: model.converged(),
            });
        }
    }
    let chosen = GridSearchReport::select(&entries)
        .ok_or_else(|| Error::NotConverged("no naive SVM grid cell converged".into()))?;
    let report = GridSearchReport { entries, chosen };
    let cell = report.chosen_entry().cell;
    let full = train.union(dev)?;
    let problem =
        TrainingProblem::with_uniform_cost(full.x().to_vec(), full.s().to_vec(), cell.c, cell.kernel)?;
    Ok((train_svm(&problem, opts)?, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svm::Label;

    #[test]
    fn picks_a_cell_and_separates_clean_data() {
        let mk = |offset: f64| {
            let mut x = Vec::new();
            let mut s = Vec::new();
            for i in 0..12 {
                let pos = i % 3 == 0;
                let base = if pos { 2.0 } else { -2.0 };
                x.push(vec![base + offset + 0.1 * i as f64, 0.5]);
                s.push(if pos { Label::Positive } else { Label::Negative });
            }
            PuDataset::from_xs(x, s).unwrap()
        };
        let (model, report) = train_naive_svm(
            &mk(0.0),
            &mk(0.05),
            &[0.1, 1.0, 10.0],
            &[KernelSpec::Linear],
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(report.entries.len(), 3);
        assert_eq!(report.chosen_entry().score, 1.0);
        assert!(model.decision_value(&[3.0, 0.5]).unwrap() > 0.0);
        assert!(model.decision_value(&[-3.0, 0.5]).unwrap() < 0.0);
    }
}
