//! Slow reference computations for graph, statistics and ranking code.

use nalgebra::{DMatrix, DVector};

/// Closed-form label propagation `(I - alpha S)^{-1} (1 - alpha) Y` with
/// `S = D^{-1/2} W D^{-1/2}` (zero rows for isolated nodes), by dense LU.
pub fn label_propagation_closed_form(w: &[Vec<f64>], y: &[f64], alpha: f64) -> Vec<f64> {
    let n = y.len();
    let deg: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
    let s = DMatrix::from_fn(n, n, |i, j| {
        if deg[i] > 0.0 && deg[j] > 0.0 {
            w[i][j] / (deg[i] * deg[j]).sqrt()
        } else {
            0.0
        }
    });
    let lhs = DMatrix::<f64>::identity(n, n) - s * alpha;
    let rhs = DVector::from_iterator(n, y.iter().map(|v| (1.0 - alpha) * v));
    let sol = lhs.lu().solve(&rhs).expect("I - alpha S is nonsingular for alpha < 1");
    sol.iter().cloned().collect()
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut da = 0.0;
    let mut db = 0.0;
    for (x, y) in a.iter().zip(b) {
        num += (x - ma) * (y - mb);
        da += (x - ma) * (x - ma);
        db += (y - mb) * (y - mb);
    }
    num / (da * db).sqrt()
}

/// Competition rank of `partner` among all other genes by descending
/// correlation with `gene`: one plus the number of genes correlating strictly
/// better. Genes are `(name, profile)` pairs.
pub fn correlation_rank(genes: &[(String, Vec<f64>)], gene: &str, partner: &str) -> usize {
    let me = &genes.iter().find(|(g, _)| g == gene).expect("gene present").1;
    let target = &genes.iter().find(|(g, _)| g == partner).expect("partner present").1;
    let r = pearson(me, target);
    1 + genes
        .iter()
        .filter(|(g, _)| g != gene && g != partner)
        .filter(|(_, p)| pearson(me, p) > r)
        .count()
}

/// Unweighted shortest path by repeated relaxation (Bellman–Ford style).
pub fn hop_distance(n: usize, edges: &[(usize, usize)], from: usize, to: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; n];
    dist[from] = 0;
    for _ in 0..n {
        for &(a, b) in edges {
            if dist[a] != usize::MAX && dist[a] + 1 < dist[b] {
                dist[b] = dist[a] + 1;
            }
            if dist[b] != usize::MAX && dist[b] + 1 < dist[a] {
                dist[a] = dist[b] + 1;
            }
        }
    }
    (dist[to] != usize::MAX).then_some(dist[to])
}

/// Area under a piecewise-linear precision/recall curve, divided by its recall span.
pub fn trapezoid_auc(points: &[(f64, f64)]) -> f64 {
    if points.len() == 1 {
        return points[0].1;
    }
    let mut area = 0.0;
    for w in points.windows(2) {
        area += (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0;
    }
    area / (points.last().unwrap().0 - points[0].0)
}
