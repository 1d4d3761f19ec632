use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernel::sq_dist;

/// Symmetric nonnegative affinity graph with zero diagonal, stored as sorted
/// adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    neighbors: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
    /// Gaussian width used to build a k-NN graph, if that is how it was built.
    width: Option<f64>,
}

impl AffinityGraph {
    /// Graph with `n` nodes and no edges.
    pub fn edgeless(n: usize) -> Self {
        Self {
            neighbors: vec![Vec::new(); n],
            degree: vec![0.0; n],
            width: None,
        }
    }

    pub fn from_dense(w: &[Vec<f64>]) -> Result<Self> {
        let n = w.len();
        let mut neighbors = vec![Vec::new(); n];
        for (i, row) in w.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidData(format!("affinity diagonal entry {i} is nonzero")));
            }
            for (j, &v) in row.iter().enumerate() {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidData(format!("affinity ({i}, {j}) = {v} is not a nonnegative number")));
                }
                if v != w[j][i] {
                    return Err(Error::InvalidData(format!("affinity matrix is not symmetric at ({i}, {j})")));
                }
                if v > 0.0 {
                    neighbors[i].push((j, v));
                }
            }
        }
        Ok(Self::from_neighbors(neighbors, None))
    }

    fn from_neighbors(neighbors: Vec<Vec<(usize, f64)>>, width: Option<f64>) -> Self {
        let degree = neighbors
            .iter()
            .map(|row| row.iter().map(|(_, v)| v).sum())
            .collect();
        Self {
            neighbors,
            degree,
            width,
        }
    }

    /// Symmetrized `k`-nearest-neighbour graph with Gaussian weights
    /// `exp(-d^2 / (2 sigma^2))`, `sigma` being the median pairwise distance.
    pub fn knn(rows: &[Vec<f64>], k: usize) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyInput("affinity graph needs at least one point"));
        }
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        let dim = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        let mut dist2 = vec![0.0; n * n];
        let mut all = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                let d = sq_dist(&rows[i], &rows[j]);
                dist2[i * n + j] = d;
                dist2[j * n + i] = d;
                all.push(d.sqrt());
            }
        }
        let width = median(&mut all).filter(|s| *s > 0.0).unwrap_or(1.0);
        let denom = 2.0 * width * width;

        let mut adjacency = vec![std::collections::BTreeMap::new(); n];
        for i in 0..n {
            let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            order.sort_by(|&a, &b| dist2[i * n + a].total_cmp(&dist2[i * n + b]).then(a.cmp(&b)));
            for &j in order.iter().take(k) {
                let w = (-dist2[i * n + j] / denom).exp();
                adjacency[i].insert(j, w);
                adjacency[j].insert(i, w);
            }
        }
        let neighbors = adjacency
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, w)| *w > 0.0).collect())
            .collect();
        Ok(Self::from_neighbors(neighbors, Some(width)))
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.neighbors[i]
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.degree[i]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degree
    }

    pub fn width(&self) -> Option<f64> {
        self.width
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.neighbors[i]
            .binary_search_by_key(&j, |(k, _)| *k)
            .map(|pos| self.neighbors[i][pos].1)
            .unwrap_or(0.0)
    }

    /// Dense graph Laplacian `L = D - W`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut l = DMatrix::zeros(n, n);
        for i in 0..n {
            l[(i, i)] = self.degree[i];
            for &(j, w) in &self.neighbors[i] {
                l[(i, j)] -= w;
            }
        }
        l
    }

    /// `f' L f = 1/2 sum_ij W_ij (f_i - f_j)^2`.
    pub fn smoothness(&self, f: &[f64]) -> f64 {
        let mut total = 0.0;
        for (i, row) in self.neighbors.iter().enumerate() {
            for &(j, w) in row {
                let d = f[i] - f[j];
                total += w * d * d;
            }
        }
        0.5 * total
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 0 {
        (values[m - 1] + values[m]) / 2.0
    } else {
        values[m]
    })
}
