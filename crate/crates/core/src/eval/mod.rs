//! Ranking metrics: PR curves over a ranking prefix, the area under them,
//! micro-averaged Precision@N across repeated trials, and a paired one-tailed
//! t-test for comparing methods over the same trials.
//!
//! Every metric consumes a [`RankedList`], whose order is total: score
//! descending, then id ascending.

mod report;
mod stats;

pub use report::{write_metrics_tsv, write_pr_curve_csv};
pub use stats::{ln_gamma, one_tailed_paired_t, regularized_incomplete_beta, student_t_sf, TTest};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// Hidden truth: `true` for a positive.
pub type Truth = HashMap<String, bool>;

/// Items ordered by score descending, ties by id ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    items: Vec<(String, f64)>,
}

impl RankedList {
    pub fn new(mut items: Vec<(String, f64)>) -> Result<Self> {
        if let Some((id, s)) = items.iter().find(|(_, s)| s.is_nan()) {
            return Err(Error::InvalidData(format!("score of `{id}` is NaN ({s})")));
        }
        for item in &mut items {
            // -0.0 and 0.0 must tie
            item.1 += 0.0;
        }
        items.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut seen = BTreeSet::new();
        for (id, _) in &items {
            if !seen.insert(id.as_str()) {
                return Err(Error::InvalidData(format!("duplicate id `{id}` in ranking")));
            }
        }
        Ok(Self { items })
    }

    pub fn from_scores(ids: &[String], scores: &[f64]) -> Result<Self> {
        if ids.len() != scores.len() {
            return Err(Error::DimensionMismatch {
                expected: ids.len(),
                actual: scores.len(),
            });
        }
        Self::new(ids.iter().cloned().zip(scores.iter().copied()).collect())
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(String, f64)] {
        &self.items
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.items.iter().map(|(id, _)| id.as_str())
    }

    /// Ids of the first `n` items.
    pub fn top(&self, n: usize) -> Result<&[(String, f64)]> {
        if n > self.len() {
            return Err(Error::param(
                "n",
                format!("asked for the top {n} of a ranking of length {}", self.len()),
            ));
        }
        Ok(&self.items[..n])
    }

    fn flags(&self, truth: &Truth) -> Result<Vec<bool>> {
        self.items
            .iter()
            .map(|(id, _)| truth.get(id).copied().ok_or_else(|| Error::UnknownId(id.clone())))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrPoint {
    pub depth: usize,
    pub recall: f64,
    pub precision: f64,
}

/// Precision/recall at successive prefix depths.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve {
    points: Vec<PrPoint>,
}

impl PrCurve {
    /// Checks that recall is nondecreasing and every value lies in `[0, 1]`.
    pub fn from_points(points: Vec<PrPoint>) -> Result<Self> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if let Some(p) = points.iter().find(|p| !in_unit(p.recall) || !in_unit(p.precision)) {
            return Err(Error::InvalidData(format!("PR point {p:?} is outside [0, 1]")));
        }
        if points.windows(2).any(|w| w[1].recall < w[0].recall) {
            return Err(Error::InvalidData("recall decreases along the curve".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[PrPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Number of items in the top `fraction` of `n`, rounded up.
pub fn prefix_depth(n: usize, fraction: f64) -> usize {
    // guard against 0.2 * 720 = 144.00000000000003 rounding up to 145
    let raw = fraction * n as f64;
    let nearest = raw.round();
    let depth = if (raw - nearest).abs() < 1e-9 { nearest } else { raw.ceil() };
    (depth as usize).min(n)
}

/// PR curve over the top `ceil(top_fraction * n)` items of `ranking`, with
/// recall measured against every positive in the ranking.
pub fn pr_curve(ranking: &RankedList, truth: &Truth, top_fraction: f64) -> Result<PrCurve> {
    if !(top_fraction > 0.0 && top_fraction <= 1.0) {
        return Err(Error::param("top_fraction", "must lie in (0, 1]"));
    }
    if ranking.is_empty() {
        return Err(Error::EmptyInput("ranking is empty"));
    }
    let flags = ranking.flags(truth)?;
    let total = flags.iter().filter(|f| **f).count();
    if total == 0 {
        return Err(Error::DegenerateLabels("ranking contains no positives".into()));
    }
    let depth = prefix_depth(flags.len(), top_fraction);
    let mut hits = 0usize;
    let points = flags[..depth]
        .iter()
        .enumerate()
        .map(|(k, f)| {
            hits += usize::from(*f);
            PrPoint {
                depth: k + 1,
                recall: hits as f64 / total as f64,
                precision: hits as f64 / (k + 1) as f64,
            }
        })
        .collect();
    Ok(PrCurve { points })
}

/// Trapezoidal area under precision-vs-recall divided by the recall span.
///
/// A single point yields its precision; a curve whose recall never moves
/// yields its mean precision.
pub fn auc_at_fraction(curve: &PrCurve) -> Result<f64> {
    let p = curve.points();
    match p {
        [] => Err(Error::EmptyInput("PR curve has no points")),
        [only] => Ok(only.precision),
        [first, .., last] => {
            let span = last.recall - first.recall;
            if span <= 0.0 {
                return Ok(p.iter().map(|q| q.precision).sum::<f64>() / p.len() as f64);
            }
            let area: f64 = p
                .windows(2)
                .map(|w| (w[1].recall - w[0].recall) * (w[0].precision + w[1].precision) / 2.0)
                .sum();
            Ok(area / span)
        }
    }
}

/// Fraction of positives in the ranking: the precision of a random ranking.
pub fn prevalence(ranking: &RankedList, truth: &Truth) -> Result<f64> {
    if ranking.is_empty() {
        return Err(Error::EmptyInput("ranking is empty"));
    }
    let flags = ranking.flags(truth)?;
    Ok(flags.iter().filter(|f| **f).count() as f64 / flags.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecisionMode {
    /// True positives summed over trials, over the sum of `N`.
    Redundant,
    /// Distinct true-positive ids over distinct extracted ids.
    Unique,
}

/// A count-backed precision, displayed as `69.6% (480/690)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionAtN {
    pub true_positives: usize,
    pub extracted: usize,
}

impl PrecisionAtN {
    pub fn value(&self) -> f64 {
        if self.extracted == 0 {
            0.0
        } else {
            self.true_positives as f64 / self.extracted as f64
        }
    }
}

impl fmt::Display for PrecisionAtN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.1}% ({}/{})",
            100.0 * self.value(),
            self.true_positives,
            self.extracted
        )
    }
}

/// Micro-averaged Precision@N over repeated trials. `truths[t]` is the truth
/// of trial `t` and `n_per_trial[t]` its cutoff.
pub fn precision_at_n(
    trials: &[RankedList],
    truths: &[Truth],
    n_per_trial: &[usize],
    mode: PrecisionMode,
) -> Result<PrecisionAtN> {
    if trials.len() != n_per_trial.len() || trials.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: trials.len(),
            actual: if trials.len() != n_per_trial.len() {
                n_per_trial.len()
            } else {
                truths.len()
            },
        });
    }
    let mut tp = 0usize;
    let mut total = 0usize;
    let mut tp_ids = BTreeSet::new();
    let mut all_ids = BTreeSet::new();
    for ((ranking, truth), &n) in trials.iter().zip(truths).zip(n_per_trial) {
        for (id, _) in ranking.top(n)? {
            let positive = *truth.get(id).ok_or_else(|| Error::UnknownId(id.clone()))?;
            total += 1;
            all_ids.insert(id.as_str());
            if positive {
                tp += 1;
                tp_ids.insert(id.as_str());
            }
        }
    }
    Ok(match mode {
        PrecisionMode::Redundant => PrecisionAtN {
            true_positives: tp,
            extracted: total,
        },
        PrecisionMode::Unique => PrecisionAtN {
            true_positives: tp_ids.len(),
            extracted: all_ids.len(),
        },
    })
}
