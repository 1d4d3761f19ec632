use crate::error::{Error, Result};

use super::Label;

const PROB_FLOOR: f64 = 1e-7;

/// Sigmoid `p = 1 / (1 + exp(a * margin + b))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlattModel {
    pub a: f64,
    pub b: f64,
}

impl PlattModel {
    pub fn prob(&self, margin: f64) -> f64 {
        platt_prob(self, margin)
    }
}

/// Calibrated probability, clipped to `[1e-7, 1 - 1e-7]`.
pub fn platt_prob(model: &PlattModel, margin: f64) -> f64 {
    let z = model.a * margin + model.b;
    // numerically stable logistic of -z
    let p = if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    };
    p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

/// Fits Platt's sigmoid to held-out margins.
///
/// Newton's method with backtracking line search on the negative
/// log-likelihood with smoothed targets `(N+ + 1)/(N+ + 2)` and `1/(N- + 2)`.
pub fn platt_fit(margins: &[f64], labels: &[Label]) -> Result<PlattModel> {
    if margins.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: margins.len(),
            actual: labels.len(),
        });
    }
    let n_pos = labels.iter().filter(|l| l.is_positive()).count() as f64;
    let n_neg = labels.len() as f64 - n_pos;
    if n_pos == 0.0 || n_neg == 0.0 {
        return Err(Error::DegenerateLabels(
            "Platt scaling needs margins from both classes".into(),
        ));
    }
    if let Some(m) = margins.iter().find(|m| !m.is_finite()) {
        return Err(Error::InvalidData(format!("non-finite margin {m}")));
    }

    const MAX_ITER: usize = 100;
    const MIN_STEP: f64 = 1e-10;
    const SIGMA: f64 = 1e-12;
    const EPS: f64 = 1e-5;

    let hi = (n_pos + 1.0) / (n_pos + 2.0);
    let lo = 1.0 / (n_neg + 2.0);
    let targets: Vec<f64> = labels
        .iter()
        .map(|l| if l.is_positive() { hi } else { lo })
        .collect();

    let mut a = 0.0;
    let mut b = ((n_neg + 1.0) / (n_pos + 1.0)).ln();
    let mut fval = nll(margins, &targets, a, b);

    for _ in 0..MAX_ITER {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (SIGMA, SIGMA, 0.0, 0.0, 0.0);
        for (&f, &t) in margins.iter().zip(&targets) {
            let z = f * a + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = t - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < EPS && g2.abs() < EPS {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;
        let mut step = 1.0;
        let mut accepted = false;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = nll(margins, &targets, na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            log::debug!("Platt line search failed; keeping current parameters");
            break;
        }
    }
    Ok(PlattModel { a, b })
}

fn nll(margins: &[f64], targets: &[f64], a: f64, b: f64) -> f64 {
    margins
        .iter()
        .zip(targets)
        .map(|(&f, &t)| {
            let z = f * a + b;
            if z >= 0.0 {
                t * z + (1.0 + (-z).exp()).ln()
            } else {
                (t - 1.0) * z + (1.0 + z.exp()).ln()
            }
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: brute-force the smoothed-target likelihood over a grid.
    fn grid_oracle(margins: &[f64], labels: &[Label]) -> (f64, f64) {
        let np = labels.iter().filter(|l| l.is_positive()).count() as f64;
        let nn = labels.len() as f64 - np;
        let loss = |a: f64, b: f64| -> f64 {
            margins
                .iter()
                .zip(labels)
                .map(|(&m, l)| {
                    let t = if l.is_positive() {
                        (np + 1.0) / (np + 2.0)
                    } else {
                        1.0 / (nn + 2.0)
                    };
                    let p = 1.0 / (1.0 + (a * m + b).exp());
                    -(t * p.ln() + (1.0 - t) * (1.0 - p).ln())
                })
                .sum()
        };
        let mut best = (0.0, 0.0, f64::INFINITY);
        let mut span = 8.0;
        let (mut ca, mut cb) = (0.0, 0.0);
        for _ in 0..6 {
            for ia in -40..=40 {
                for ib in -40..=40 {
                    let a = ca + span * ia as f64 / 40.0;
                    let b = cb + span * ib as f64 / 40.0;
                    let l = loss(a, b);
                    if l < best.2 {
                        best = (a, b, l);
                    }
                }
            }
            ca = best.0;
            cb = best.1;
            span /= 8.0;
        }
        (best.0, best.1)
    }

    fn labels(pos: usize, neg: usize) -> Vec<Label> {
        let mut v = vec![Label::Negative; neg];
        v.extend(vec![Label::Positive; pos]);
        v
    }

    #[test]
    fn prob_examples() {
        assert_eq!(platt_prob(&PlattModel { a: -1.0, b: 0.0 }, 0.0), 0.5);
        assert_eq!(
            platt_prob(&PlattModel { a: -1.0, b: 0.0 }, 1e6),
            1.0 - 1e-7
        );
        assert_eq!(platt_prob(&PlattModel { a: -1.0, b: 0.0 }, -1e6), 1e-7);
        assert_eq!(platt_prob(&PlattModel { a: -2.0, b: 1.0 }, 0.5), 0.5);
    }

    #[test]
    fn separated_margins() {
        let m = [-2.0, -1.0, 1.0, 2.0];
        let l = labels(2, 2);
        let model = platt_fit(&m, &l).unwrap();
        assert!(model.a < 0.0);
        let p0 = model.prob(0.0);
        assert!(p0 > 0.25 && p0 < 0.75, "p(0) = {p0}");
        let (oa, ob) = grid_oracle(&m, &l);
        assert!((model.a - oa).abs() < 1e-3, "{} vs {oa}", model.a);
        assert!((model.b - ob).abs() < 1e-3, "{} vs {ob}", model.b);
    }

    #[test]
    fn symmetric_balanced_margins_give_half_at_zero() {
        let m = [-3.0, -1.5, -0.2, 0.2, 1.5, 3.0, -0.7, 0.7];
        let l = vec![
            Label::Negative,
            Label::Negative,
            Label::Positive,
            Label::Negative,
            Label::Positive,
            Label::Positive,
            Label::Negative,
            Label::Positive,
        ];
        let model = platt_fit(&m, &l).unwrap();
        assert!((model.prob(0.0) - 0.5).abs() < 0.01);
    }

    #[test]
    fn uninformative_margins_stay_near_base_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let m: Vec<f64> = (0..400).map(|_| rng.random_range(-2.0..2.0)).collect();
        let l: Vec<Label> = (0..400)
            .map(|_| {
                if rng.random_bool(0.3) {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        let base = l.iter().filter(|x| x.is_positive()).count() as f64 / 400.0;
        let model = platt_fit(&m, &l).unwrap();
        let (oa, ob) = grid_oracle(&m, &l);
        assert!((model.a - oa).abs() < 1e-3 && (model.b - ob).abs() < 1e-3);
        for &x in &m {
            assert!((model.prob(x) - base).abs() <= 0.15);
        }
    }

    #[test]
    fn single_class_is_an_error() {
        assert!(platt_fit(&[0.1, 0.2], &labels(2, 0)).is_err());
        assert!(platt_fit(&[0.1, 0.2], &labels(0, 2)).is_err());
    }

    #[test]
    fn prob_is_strictly_monotone_in_margin() {
        let model = PlattModel { a: -1.3, b: 0.2 };
        let mut prev = 0.0;
        for i in -50..=50 {
            let p = model.prob(i as f64 * 0.2);
            assert!(p > prev);
            prev = p;
        }
    }
}
