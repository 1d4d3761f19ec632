use super::AffinityGraph;
use crate::error::{Error, Result};
use crate::kernel::sq_dist;
use crate::svm::DecisionFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabelPropagationConfig {
    pub alpha: f64,
    /// Bound on the distance of the returned scores from the fixed point.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LabelPropagationConfig {
    fn default() -> Self {
        Self {
            alpha: 0.99,
            tol: 1e-8,
            max_iter: 1_000_000,
        }
    }
}

/// Iterates `F <- alpha S F + (1 - alpha) Y` with `S = D^{-1/2} W D^{-1/2}`.
///
/// Isolated nodes get a zero row in `S`. Iteration stops once
/// `alpha / (1 - alpha) * ||dF||_2 < tol`, which bounds the distance to the
/// fixed point `(I - alpha S)^{-1} (1 - alpha) Y` by `tol` in every coordinate.
pub fn label_propagation(
    graph: &AffinityGraph,
    seed_labels: &[f64],
    cfg: &LabelPropagationConfig,
) -> Result<Vec<f64>> {
    let n = graph.n();
    if seed_labels.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: seed_labels.len(),
        });
    }
    if let Some(v) = seed_labels.iter().find(|v| ![-1.0, 0.0, 1.0].contains(*v)) {
        return Err(Error::InvalidData(format!("seed label {v} is not one of -1, 0, +1")));
    }
    if seed_labels.iter().all(|v| *v == 0.0) {
        return Err(Error::DegenerateLabels("label propagation needs a nonzero seed".into()));
    }
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0) {
        return Err(Error::param("alpha", "must lie in (0, 1)"));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }

    let inv_sqrt: Vec<f64> = graph
        .degrees()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let base: Vec<f64> = seed_labels.iter().map(|y| (1.0 - cfg.alpha) * y).collect();
    let ratio = cfg.alpha / (1.0 - cfg.alpha);
    let mut f = seed_labels.to_vec();
    let mut next = vec![0.0; n];
    for iter in 0..cfg.max_iter {
        for i in 0..n {
            let mut acc = 0.0;
            for &(j, w) in graph.neighbors(i) {
                acc += w * inv_sqrt[j] * f[j];
            }
            next[i] = cfg.alpha * inv_sqrt[i] * acc + base[i];
        }
        let delta: f64 = f
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        std::mem::swap(&mut f, &mut next);
        if ratio * delta < cfg.tol {
            log::trace!("label propagation converged after {} sweeps", iter + 1);
            return Ok(f);
        }
    }
    log::warn!(
        "label propagation stopped at max_iter = {} before reaching tol {}",
        cfg.max_iter,
        cfg.tol
    );
    Ok(f)
}

/// Propagated scores plus a k-NN extension to points outside the graph:
/// a new point gets the affinity-weighted mean score of its `k` nearest
/// graph nodes.
#[derive(Debug, Clone)]
pub struct LabelPropagationModel {
    points: Vec<Vec<f64>>,
    scores: Vec<f64>,
    k: usize,
    width: f64,
}

impl LabelPropagationModel {
    /// Builds a k-NN graph over `points`, propagates `seed_labels` and keeps
    /// the result for out-of-sample scoring.
    pub fn fit(
        points: Vec<Vec<f64>>,
        seed_labels: &[f64],
        k: usize,
        cfg: &LabelPropagationConfig,
    ) -> Result<Self> {
        let graph = AffinityGraph::knn(&points, k)?;
        let scores = label_propagation(&graph, seed_labels, cfg)?;
        Ok(Self {
            width: graph.width().unwrap_or(1.0),
            points,
            scores,
            k,
        })
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }
}

impl DecisionFunction for LabelPropagationModel {
    fn decision_value(&self, x: &[f64]) -> Result<f64> {
        let dim = self.points[0].len();
        if x.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: x.len(),
            });
        }
        let mut d: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (sq_dist(p, x), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let denom = 2.0 * self.width * self.width;
        let (mut num, mut den) = (0.0, 0.0);
        for &(d2, i) in d.iter().take(self.k) {
            let w = (-d2 / denom).exp();
            num += w * self.scores[i];
            den += w;
        }
        Ok(if den > 0.0 { num / den } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpu_testkit::reference::label_propagation_closed_form;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random_bool(0.4) {
                    let v = rng.random_range(0.05..1.0);
                    w[i][j] = v;
                    w[j][i] = v;
                }
            }
        }
        w
    }

    #[test]
    fn disconnected_node_gets_zero() {
        let g = AffinityGraph::edgeless(2);
        let f = label_propagation(&g, &[1.0, 0.0], &LabelPropagationConfig::default()).unwrap();
        assert_eq!(f[1], 0.0);
        // isolated seeded node keeps (1 - alpha) of its label
        assert!((f[0] - 0.01).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_gives_opposite_scores() {
        let g = AffinityGraph::from_dense(&[vec![0.0, 0.7], vec![0.7, 0.0]]).unwrap();
        let f = label_propagation(&g, &[1.0, -1.0], &LabelPropagationConfig::default()).unwrap();
        assert_eq!(f[0], -f[1]);
    }

    #[test]
    fn matches_closed_form_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let w = random_graph(&mut rng, 10);
            let mut y: Vec<f64> = (0..10).map(|_| [-1.0, 0.0, 1.0][rng.random_range(0..3)]).collect();
            y[0] = 1.0;
            let g = AffinityGraph::from_dense(&w).unwrap();
            let f = label_propagation(&g, &y, &LabelPropagationConfig::default()).unwrap();
            let oracle = label_propagation_closed_form(&w, &y, 0.99);
            for (a, b) in f.iter().zip(&oracle) {
                assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
                assert!(a.abs() <= 1.0);
            }
        }
    }

    #[test]
    fn permutation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = random_graph(&mut rng, 8);
        let y = [1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let perm = [3usize, 7, 0, 5, 1, 6, 2, 4];
        let wp: Vec<Vec<f64>> = (0..8).map(|i| (0..8).map(|j| w[perm[i]][perm[j]]).collect()).collect();
        let yp: Vec<f64> = perm.iter().map(|&p| y[p]).collect();
        let cfg = LabelPropagationConfig::default();
        let f = label_propagation(&AffinityGraph::from_dense(&w).unwrap(), &y, &cfg).unwrap();
        let fp = label_propagation(&AffinityGraph::from_dense(&wp).unwrap(), &yp, &cfg).unwrap();
        for i in 0..8 {
            assert!((fp[i] - f[perm[i]]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_seeds() {
        let g = AffinityGraph::edgeless(2);
        let cfg = LabelPropagationConfig::default();
        assert!(label_propagation(&g, &[0.0, 0.0], &cfg).is_err());
        assert!(label_propagation(&g, &[0.5, 0.0], &cfg).is_err());
        assert!(label_propagation(&g, &[1.0], &cfg).is_err());
    }

    #[test]
    fn out_of_sample_scores_follow_neighbours() {
        let points = vec![vec![0.0], vec![0.1], vec![0.2], vec![5.0], vec![5.1], vec![5.2]];
        let y = [1.0, 0.0, 0.0, -1.0, 0.0, 0.0];
        let m = LabelPropagationModel::fit(points, &y, 2, &LabelPropagationConfig::default()).unwrap();
        assert!(m.decision_value(&[0.05]).unwrap() > 0.0);
        assert!(m.decision_value(&[5.05]).unwrap() < 0.0);
    }
}
