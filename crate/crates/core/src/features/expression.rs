use std::collections::HashMap;

use crate::error::{Error, Result};

/// Genes x experiments expression matrix. A gene whose profile has zero
/// variance is invalid and takes no part in correlation ranking.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionMatrix {
    genes: Vec<String>,
    index: HashMap<String, usize>,
    rows: Vec<Vec<f64>>,
    /// Mean-centred rows.
    centred: Vec<Vec<f64>>,
    /// Sum of squares of each centred row.
    sum_sq: Vec<f64>,
}

impl ExpressionMatrix {
    pub fn new(rows: Vec<(String, Vec<f64>)>) -> Result<Self> {
        let width = rows.first().map_or(0, |(_, r)| r.len());
        let mut index = HashMap::with_capacity(rows.len());
        let mut genes = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        for (gene, row) in rows {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    actual: row.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidData(format!("expression of `{gene}` has value {v}")));
            }
            if index.insert(gene.clone(), genes.len()).is_some() {
                return Err(Error::InvalidData(format!("gene `{gene}` has two expression rows")));
            }
            genes.push(gene);
            values.push(row);
        }
        let mut centred = Vec::with_capacity(values.len());
        let mut sum_sq = Vec::with_capacity(values.len());
        for row in &values {
            let mean = row.iter().sum::<f64>() / row.len().max(1) as f64;
            let c: Vec<f64> = row.iter().map(|x| x - mean).collect();
            let mut ss = 0.0;
            for v in &c {
                ss += v * v;
            }
            centred.push(c);
            sum_sq.push(ss);
        }
        Ok(Self {
            genes,
            index,
            rows: values,
            centred,
            sum_sq,
        })
    }

    pub fn genes(&self) -> &[String] {
        &self.genes
    }

    pub fn n_experiments(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn row(&self, gene: &str) -> Option<&[f64]> {
        self.index.get(gene).map(|&i| self.rows[i].as_slice())
    }

    fn valid_index(&self, gene: &str) -> Option<usize> {
        self.index.get(gene).copied().filter(|&i| self.sum_sq[i] > 0.0)
    }

    /// `true` for a known gene with nonzero variance.
    pub fn is_valid(&self, gene: &str) -> bool {
        self.valid_index(gene).is_some()
    }

    fn pcc(&self, i: usize, j: usize) -> f64 {
        let mut num = 0.0;
        for (a, b) in self.centred[i].iter().zip(&self.centred[j]) {
            num += a * b;
        }
        num / (self.sum_sq[i] * self.sum_sq[j]).sqrt()
    }

    /// Pearson correlation of two valid genes.
    pub fn pearson(&self, a: &str, b: &str) -> Option<f64> {
        Some(self.pcc(self.valid_index(a)?, self.valid_index(b)?))
    }

    /// Correlations of `gene` with every valid gene, by gene index; NaN for
    /// invalid genes and for `gene` itself.
    fn correlation_row(&self, i: usize) -> Vec<f64> {
        (0..self.genes.len())
            .map(|j| {
                if j == i || self.sum_sq[j] <= 0.0 {
                    f64::NAN
                } else {
                    self.pcc(i, j)
                }
            })
            .collect()
    }

    /// Competition rank of `partner` among the valid genes other than
    /// `gene`, by descending correlation with `gene` (1 = highest).
    pub fn correlation_rank(&self, gene: &str, partner: &str) -> Option<usize> {
        let (i, j) = (self.valid_index(gene)?, self.valid_index(partner)?);
        if i == j {
            return None;
        }
        Some(rank_in_row(&self.correlation_row(i), j))
    }

    /// Precomputes correlation rows for `genes` so that many mutual ranks
    /// against them can be read off cheaply.
    pub fn rank_table(&self, genes: &[String]) -> RankTable<'_> {
        let rows = genes
            .iter()
            .filter_map(|g| self.valid_index(g).map(|i| (i, self.correlation_row(i))))
            .collect();
        RankTable { expr: self, rows }
    }
}

fn rank_in_row(row: &[f64], j: usize) -> usize {
    let r = row[j];
    1 + row.iter().filter(|&&v| v > r).count()
}

/// Correlation rows cached per gene index.
#[derive(Debug)]
pub struct RankTable<'a> {
    expr: &'a ExpressionMatrix,
    rows: HashMap<usize, Vec<f64>>,
}

impl RankTable<'_> {
    fn rank(&self, i: usize, j: usize) -> usize {
        match self.rows.get(&i) {
            Some(row) => rank_in_row(row, j),
            None => rank_in_row(&self.expr.correlation_row(i), j),
        }
    }

    /// Mutual ranks of `p` against every gene of `partners`, computing the
    /// correlation row of `p` once.
    pub fn mutual_ranks(&self, p: &str, partners: &[String]) -> Vec<Option<f64>> {
        let Some(i) = self.expr.valid_index(p) else {
            return vec![None; partners.len()];
        };
        let computed;
        let own: &[f64] = match self.rows.get(&i) {
            Some(row) => row,
            None => {
                computed = self.expr.correlation_row(i);
                &computed
            }
        };
        partners
            .iter()
            .map(|s| {
                let j = self.expr.valid_index(s)?;
                if i == j {
                    return Some(1.0);
                }
                Some(((rank_in_row(own, j) * self.rank(j, i)) as f64).sqrt())
            })
            .collect()
    }

    /// Same as [`mutual_rank_feature`].
    pub fn mutual_rank(&self, p: &str, s: &str) -> Option<f64> {
        let (i, j) = (self.expr.valid_index(p)?, self.expr.valid_index(s)?);
        if i == j {
            return Some(1.0);
        }
        Some(((self.rank(i, j) * self.rank(j, i)) as f64).sqrt())
    }
}

/// `sqrt(rank(p, s) * rank(s, p))`; `None` when either gene is unknown or
/// has zero variance. A gene paired with itself scores 1.
pub fn mutual_rank_feature(expr: &ExpressionMatrix, p: &str, s: &str) -> Option<f64> {
    let (i, j) = (expr.valid_index(p)?, expr.valid_index(s)?);
    if i == j {
        return Some(1.0);
    }
    let a = rank_in_row(&expr.correlation_row(i), j);
    let b = rank_in_row(&expr.correlation_row(j), i);
    Some(((a * b) as f64).sqrt())
}
