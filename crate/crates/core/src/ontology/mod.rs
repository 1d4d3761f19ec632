//! Annotation-term DAG with gene annotations, term distances and
//! similarities, and the strategies that pick unlabeled training examples
//! by their distance from the seed set in term space.
//!
//! Distances are hop counts on the undirected view of the DAG.

mod select;

pub use select::{
    select_unlabeled_by_distance, select_unlabeled_by_similarity, select_unlabeled_random,
    DEFAULT_MAX_DISTANCE, DEFAULT_MIN_DISTANCE,
};

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};

/// Term DAG (edges child -> parent) plus the gene -> terms map `T(g)`.
#[derive(Debug, Clone, Default)]
pub struct OntologyDag {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    /// Undirected adjacency, sorted.
    adjacent: Vec<Vec<usize>>,
    annotations: BTreeMap<String, BTreeSet<usize>>,
}

impl OntologyDag {
    /// Builds the DAG from `(term, parents)` records. Every parent must be a
    /// listed term and the parent relation must be acyclic.
    pub fn new(records: &[(String, Vec<String>)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(records.len());
        let mut terms = Vec::with_capacity(records.len());
        for (term, _) in records {
            if index.insert(term.clone(), terms.len()).is_some() {
                return Err(Error::InvalidData(format!("term `{term}` is defined twice")));
            }
            terms.push(term.clone());
        }
        let n = terms.len();
        let mut parents = vec![Vec::new(); n];
        let mut adjacent = vec![Vec::new(); n];
        for (child, (_, ps)) in records.iter().enumerate() {
            for p in ps {
                let &parent = index
                    .get(p)
                    .ok_or_else(|| Error::UnknownId(format!("parent term {p}")))?;
                if parent == child {
                    return Err(Error::InvalidData(format!("term `{p}` is its own parent")));
                }
                parents[child].push(parent);
                adjacent[child].push(parent);
                adjacent[parent].push(child);
            }
        }
        for a in &mut adjacent {
            a.sort_unstable();
            a.dedup();
        }
        let dag = Self {
            terms,
            index,
            parents,
            adjacent,
            annotations: BTreeMap::new(),
        };
        dag.check_acyclic()?;
        Ok(dag)
    }

    fn check_acyclic(&self) -> Result<()> {
        // Kahn's algorithm over child -> parent edges
        let n = self.terms.len();
        let mut indegree = vec![0usize; n];
        for ps in &self.parents {
            for &p in ps {
                indegree[p] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&t| indegree[t] == 0).collect();
        let mut seen = 0;
        while let Some(t) = queue.pop_front() {
            seen += 1;
            for &p in &self.parents[t] {
                indegree[p] -= 1;
                if indegree[p] == 0 {
                    queue.push_back(p);
                }
            }
        }
        if seen == n {
            Ok(())
        } else {
            let stuck = (0..n).find(|&t| indegree[t] > 0).expect("some term is on a cycle");
            Err(Error::InvalidData(format!(
                "ontology has a cycle through term `{}`",
                self.terms[stuck]
            )))
        }
    }

    /// Records that `gene` is annotated with `term`.
    pub fn annotate(&mut self, gene: &str, term: &str) -> Result<()> {
        let t = self.term_index(term)?;
        self.annotations.entry(gene.to_string()).or_default().insert(t);
        Ok(())
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term_index(&self, term: &str) -> Result<usize> {
        self.index
            .get(term)
            .copied()
            .ok_or_else(|| Error::UnknownId(format!("term {term}")))
    }

    pub fn parents(&self, term: usize) -> &[usize] {
        &self.parents[term]
    }

    /// Annotated genes in ascending id order.
    pub fn genes(&self) -> impl Iterator<Item = &str> {
        self.annotations.keys().map(String::as_str)
    }

    /// `T(g)` as term indices; empty for an unannotated gene.
    pub fn terms_of(&self, gene: &str) -> impl Iterator<Item = usize> + '_ {
        self.annotations.get(gene).into_iter().flatten().copied()
    }

    /// `T(P)`: the union of the seeds' terms.
    pub fn terms_of_set<'a, I>(&self, genes: I) -> BTreeSet<usize>
    where
        I: IntoIterator<Item = &'a str>,
    {
        genes.into_iter().flat_map(|g| self.terms_of(g)).collect()
    }

    /// Hop distance from `source` to every term, `None` where unreachable,
    /// exploring at most `max_depth` hops.
    pub fn distances_from(&self, source: usize, max_depth: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.terms.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(t) = queue.pop_front() {
            let d = dist[t].expect("queued terms have a distance");
            if max_depth.is_some_and(|m| d >= m) {
                continue;
            }
            for &u in &self.adjacent[t] {
                if dist[u].is_none() {
                    dist[u] = Some(d + 1);
                    queue.push_back(u);
                }
            }
        }
        dist
    }
}

/// Shortest path length between two terms on the undirected DAG, `None`
/// when they lie in different components.
pub fn term_shortest_path(dag: &OntologyDag, a: &str, b: &str) -> Result<Option<usize>> {
    let (a, b) = (dag.term_index(a)?, dag.term_index(b)?);
    Ok(dag.distances_from(a, None)[b])
}

/// `1 / (1 + d)`, or 0 when the terms are disconnected.
pub fn default_term_similarity(dag: &OntologyDag, a: &str, b: &str) -> Result<f64> {
    Ok(inverse_distance(term_shortest_path(dag, a, b)?))
}

fn inverse_distance(d: Option<usize>) -> f64 {
    d.map_or(0.0, |d| 1.0 / (1.0 + d as f64))
}

/// Symmetric term similarity with values in `[0, 1]`.
pub trait TermSimilarity: Sync {
    fn similarity(&self, dag: &OntologyDag, a: usize, b: usize) -> f64;

    /// Similarity of `source` to every term of `dag`.
    fn similarities_from(&self, dag: &OntologyDag, source: usize) -> Vec<f64> {
        (0..dag.n_terms()).map(|t| self.similarity(dag, source, t)).collect()
    }
}

/// The default scorer `1 / (1 + d)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct InverseDistance;

impl TermSimilarity for InverseDistance {
    fn similarity(&self, dag: &OntologyDag, a: usize, b: usize) -> f64 {
        inverse_distance(dag.distances_from(a, None)[b])
    }

    fn similarities_from(&self, dag: &OntologyDag, source: usize) -> Vec<f64> {
        dag.distances_from(source, None).into_iter().map(inverse_distance).collect()
    }
}

/// Precomputed similarities keyed by term id pairs. Missing pairs score 0,
/// a term against itself scores 1.
#[derive(Debug, Clone, Default)]
pub struct SimilarityTable {
    /// Stored in both orientations.
    values: HashMap<String, HashMap<String, f64>>,
    pairs: usize,
}

impl SimilarityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: &str, b: &str, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidData(format!(
                "similarity of ({a}, {b}) is {value}, outside [0, 1]"
            )));
        }
        let fresh = self
            .values
            .entry(a.to_string())
            .or_default()
            .insert(b.to_string(), value)
            .is_none();
        self.values.entry(b.to_string()).or_default().insert(a.to_string(), value);
        if fresh {
            self.pairs += 1;
        }
        Ok(())
    }

    /// Number of distinct unordered pairs.
    pub fn len(&self) -> usize {
        self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs == 0
    }

    fn lookup(&self, a: &str, b: &str) -> f64 {
        if a == b {
            return 1.0;
        }
        self.values
            .get(a)
            .and_then(|row| row.get(b))
            .copied()
            .unwrap_or(0.0)
    }
}

impl TermSimilarity for SimilarityTable {
    fn similarity(&self, dag: &OntologyDag, a: usize, b: usize) -> f64 {
        self.lookup(&dag.terms()[a], &dag.terms()[b])
    }
}

/// Per-term similarity to a term set: `score[t] = sum_{t_j in set} sim(t, t_j)`.
pub(crate) fn term_scores<S: TermSimilarity + ?Sized>(
    dag: &OntologyDag,
    sim: &S,
    set: &BTreeSet<usize>,
) -> Vec<f64> {
    let mut score = vec![0.0; dag.n_terms()];
    for &tj in set {
        for (s, v) in score.iter_mut().zip(sim.similarities_from(dag, tj)) {
            *s += v;
        }
    }
    score
}

/// `sim(g, P) = sum_{t_i in T(g)} sum_{t_j in T(P)} sim(t_i, t_j)`, with
/// `T(P)` the union of the seeds' terms.
pub fn gene_set_similarity<S: TermSimilarity + ?Sized>(
    dag: &OntologyDag,
    sim: &S,
    gene: &str,
    seeds: &[String],
) -> f64 {
    let tp = dag.terms_of_set(seeds.iter().map(String::as_str));
    dag.terms_of(gene)
        .map(|ti| tp.iter().map(|&tj| sim.similarity(dag, ti, tj)).sum::<f64>())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use lpu_testkit::reference::hop_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn dag(edges: &[(&str, &[&str])]) -> OntologyDag {
        let records: Vec<(String, Vec<String>)> = edges
            .iter()
            .map(|(t, ps)| (t.to_string(), ps.iter().map(|p| p.to_string()).collect()))
            .collect();
        OntologyDag::new(&records).unwrap()
    }

    #[test]
    fn path_examples() {
        let d = dag(&[("a", &["b"]), ("b", &["c"]), ("c", &[]), ("z", &[])]);
        assert_eq!(term_shortest_path(&d, "a", "a").unwrap(), Some(0));
        assert_eq!(term_shortest_path(&d, "a", "b").unwrap(), Some(1));
        assert_eq!(term_shortest_path(&d, "a", "c").unwrap(), Some(2));
        assert_eq!(term_shortest_path(&d, "c", "a").unwrap(), Some(2));
        assert_eq!(term_shortest_path(&d, "a", "z").unwrap(), None);
        assert!(term_shortest_path(&d, "a", "nope").is_err());
    }

    #[test]
    fn similarity_examples() {
        let d = dag(&[("a", &["b"]), ("b", &["c"]), ("c", &["e"]), ("e", &[]), ("z", &[])]);
        assert_eq!(default_term_similarity(&d, "a", "a").unwrap(), 1.0);
        assert_eq!(default_term_similarity(&d, "a", "z").unwrap(), 0.0);
        assert_eq!(default_term_similarity(&d, "a", "e").unwrap(), 0.25);
    }

    #[test]
    fn rejects_cycles_and_unknown_parents() {
        let recs = |e: &[(&str, &[&str])]| -> Vec<(String, Vec<String>)> {
            e.iter()
                .map(|(t, ps)| (t.to_string(), ps.iter().map(|p| p.to_string()).collect()))
                .collect()
        };
        assert!(OntologyDag::new(&recs(&[("a", &["b"]), ("b", &["a"])])).is_err());
        assert!(OntologyDag::new(&recs(&[("a", &["a"])])).is_err());
        assert!(OntologyDag::new(&recs(&[("a", &["x"])])).is_err());
        let mut d = dag(&[("a", &[])]);
        assert!(d.annotate("g", "missing").is_err());
    }

    #[test]
    fn gene_set_similarity_examples() {
        // a and b are both children of c: d(a,c) = 1, d(b,c) = 1, d(a,b) = 2
        let mut d = dag(&[("a", &["c"]), ("b", &["c"]), ("c", &[])]);
        d.annotate("g", "a").unwrap();
        d.annotate("g", "b").unwrap();
        d.annotate("p1", "a").unwrap();
        d.annotate("p2", "c").unwrap();
        d.annotate("p2", "a").unwrap();
        d.annotate("h", "a").unwrap();
        let seeds = vec!["p1".to_string(), "p2".to_string()];
        let s = gene_set_similarity(&d, &InverseDistance, "g", &seeds);
        assert!((s - 7.0 / 3.0).abs() < 1e-12);
        assert_eq!(gene_set_similarity(&d, &InverseDistance, "unannotated", &seeds), 0.0);
        assert_eq!(gene_set_similarity(&d, &InverseDistance, "h", &["p1".to_string()]), 1.0);
        let tp = d.terms_of_set(seeds.iter().map(String::as_str));
        let scores = term_scores(&d, &InverseDistance, &tp);
        let via_scores: f64 = d.terms_of("g").map(|t| scores[t]).sum();
        assert!((via_scores - s).abs() < 1e-12);
    }

    #[test]
    fn table_similarity_overrides_default() {
        let d = dag(&[("a", &["c"]), ("b", &["c"]), ("c", &[])]);
        let mut table = SimilarityTable::new();
        table.insert("b", "a", 0.9).unwrap();
        assert!(table.insert("a", "c", 1.5).is_err());
        let (a, b, c) = (0, 1, 2);
        assert_eq!(table.similarity(&d, a, b), 0.9);
        assert_eq!(table.similarity(&d, b, a), 0.9);
        assert_eq!(table.similarity(&d, a, c), 0.0);
        assert_eq!(table.similarity(&d, c, c), 1.0);
    }

    #[test]
    fn distance_is_a_metric_on_random_dags() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let n = rng.random_range(3..15);
            let mut records = Vec::new();
            let mut edges = Vec::new();
            for t in 0..n {
                let mut ps = Vec::new();
                for p in (t + 1)..n {
                    if rng.random_bool(0.2) {
                        ps.push(format!("t{p}"));
                        edges.push((t, p));
                    }
                }
                records.push((format!("t{t}"), ps));
            }
            let d = OntologyDag::new(&records).unwrap();
            let all: Vec<Vec<Option<usize>>> = (0..n).map(|t| d.distances_from(t, None)).collect();
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(all[a][b], hop_distance(n, &edges, a, b));
                    assert_eq!(all[a][b], all[b][a]);
                    for c in 0..n {
                        if let (Some(ab), Some(bc)) = (all[a][b], all[b][c]) {
                            assert!(all[a][c].unwrap() <= ab + bc);
                        }
                    }
                }
            }
        }
    }
}
