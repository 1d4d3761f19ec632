//! Learning with positive and unlabeled examples.
//!
//! Two trainers are provided:
//!
//! - [`train_biased_svm`]: treats every unlabeled example as a negative and
//!   fits a two-cost soft-margin SVM, `C_U = c` and `C_P = j * c`, choosing
//!   `(c, j[, gamma])` to maximise the Lee–Liu criterion `r^2 / Pr(f = 1)` on
//!   development data.
//! - [`train_weighted_svm`]: the Elkan–Noto scheme. A first classifier `g` is
//!   fit on the observed labeling and Platt-calibrated; the labeling frequency
//!   `e = p(s=1|y=1)` is the mean of `g` over held-out positives; every
//!   unlabeled example is then duplicated into a positive copy of weight
//!   `p(y=1|x,s=-1)` and a negative copy of the complementary weight before a
//!   second SVM is trained.

mod biased;
mod weighted;

pub use biased::{
    lee_liu_score, train_biased_svm, BiasedGrid, GridCell, GridEntry, GridSearchReport,
};
pub use weighted::{
    estimate_label_frequency, train_weighted_svm, tune_weighted_svm, unlabeled_posterior_weight,
    weighted_problem, CalibratedSvm, ProbabilisticClassifier, WeightedSvmConfig, WeightedSvmFit,
};

use crate::error::{Error, Result};
use crate::svm::Label;

/// Positive/unlabeled training data. `s[i] == Label::Negative` marks an
/// unlabeled example.
#[derive(Debug, Clone, PartialEq)]
pub struct PuDataset {
    x: Vec<Vec<f64>>,
    s: Vec<Label>,
    ids: Vec<String>,
}

impl PuDataset {
    pub fn new(x: Vec<Vec<f64>>, s: Vec<Label>, ids: Vec<String>) -> Result<Self> {
        if x.len() != s.len() || x.len() != ids.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                actual: if x.len() != s.len() { s.len() } else { ids.len() },
            });
        }
        let n_pos = s.iter().filter(|l| l.is_positive()).count();
        if n_pos == 0 {
            return Err(Error::DegenerateLabels("PU dataset has no positive example".into()));
        }
        if n_pos == s.len() {
            return Err(Error::DegenerateLabels("PU dataset has no unlabeled example".into()));
        }
        let dim = x[0].len();
        if let Some(bad) = x.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        Ok(Self { x, s, ids })
    }

    /// Same as [`PuDataset::new`] with generated ids `0..n`.
    pub fn from_xs(x: Vec<Vec<f64>>, s: Vec<Label>) -> Result<Self> {
        let ids = (0..x.len()).map(|i| i.to_string()).collect();
        Self::new(x, s, ids)
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

    pub fn s(&self) -> &[Label] {
        &self.s
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn positives(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.x
            .iter()
            .zip(&self.s)
            .filter(|(_, l)| l.is_positive())
            .map(|(x, _)| x)
    }

    pub fn n_positive(&self) -> usize {
        self.s.iter().filter(|l| l.is_positive()).count()
    }

    /// Concatenation of `self` and `other`.
    pub fn union(&self, other: &PuDataset) -> Result<PuDataset> {
        let mut x = self.x.clone();
        x.extend(other.x.iter().cloned());
        let mut s = self.s.clone();
        s.extend(other.s.iter().cloned());
        let mut ids = self.ids.clone();
        ids.extend(other.ids.iter().cloned());
        PuDataset::new(x, s, ids)
    }

    pub(crate) fn subset(&self, idx: &[usize]) -> (Vec<Vec<f64>>, Vec<Label>, Vec<String>) {
        (
            idx.iter().map(|&i| self.x[i].clone()).collect(),
            idx.iter().map(|&i| self.s[i]).collect(),
            idx.iter().map(|&i| self.ids[i].clone()).collect(),
        )
    }
}
