use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};

/// Undirected interaction graph over string ids. Each edge keeps every
/// `(source, year)` record that asserted it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InteractionGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    adjacent: Vec<BTreeSet<usize>>,
    /// Keyed by `(min, max)` node index.
    records: BTreeMap<(usize, usize), BTreeSet<(String, i32)>>,
}

impl InteractionGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn node(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_string());
        self.index.insert(id.to_string(), i);
        self.adjacent.push(BTreeSet::new());
        i
    }

    /// Adds an edge record. Returns `false` if the pair already carried a
    /// record from `source` (the edge is unique per pair and source).
    pub fn add_edge(&mut self, a: &str, b: &str, source: &str, year: i32) -> Result<bool> {
        if a == b {
            return Err(Error::InvalidData(format!("self-loop on `{a}`")));
        }
        let (i, j) = (self.node(a), self.node(b));
        let key = (i.min(j), i.max(j));
        let records = self.records.entry(key).or_default();
        if records.iter().any(|(s, _)| s == source) {
            return Ok(false);
        }
        records.insert((source.to_string(), year));
        self.adjacent[i].insert(j);
        self.adjacent[j].insert(i);
        Ok(true)
    }

    pub fn n_nodes(&self) -> usize {
        self.ids.len()
    }

    /// Number of distinct interacting pairs.
    pub fn n_edges(&self) -> usize {
        self.records.len()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Edge records as `(a, b, source, year)` with `a < b` by id, sorted.
    pub fn edges(&self) -> Vec<(&str, &str, &str, i32)> {
        let mut out: Vec<(&str, &str, &str, i32)> = self
            .records
            .iter()
            .flat_map(|(&(i, j), recs)| {
                let (a, b) = (self.ids[i].as_str(), self.ids[j].as_str());
                let (a, b) = if a <= b { (a, b) } else { (b, a) };
                recs.iter().map(move |(s, y)| (a, b, s.as_str(), *y))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Hop distances from `id` to every node id reachable from it.
    pub fn distances_from(&self, id: &str) -> HashMap<&str, usize> {
        let mut out = HashMap::new();
        let Some(&start) = self.index.get(id) else {
            return out;
        };
        let mut dist = vec![usize::MAX; self.ids.len()];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            out.insert(self.ids[u].as_str(), dist[u]);
            for &v in &self.adjacent[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        out
    }

    /// Shortest path length, `None` if either id is absent or no path exists.
    pub fn path_length(&self, a: &str, b: &str) -> Option<usize> {
        if !self.contains(b) {
            return None;
        }
        self.distances_from(a).get(b).copied()
    }
}

/// `max(0, 1.1 - 0.1 * len)` capped at 1; `None` (no path) gives 0.
pub fn ppi_from_length(len: Option<usize>) -> f64 {
    match len {
        None => 0.0,
        Some(l) => (1.1 - 0.1 * l as f64).clamp(0.0, 1.0),
    }
}

/// Path-length feature between `p` and `s`; 1.0 for a direct interaction
/// and for `p == s`.
pub fn ppi_feature(graph: &InteractionGraph, p: &str, s: &str) -> f64 {
    if p == s {
        return 1.0;
    }
    ppi_from_length(graph.path_length(p, s))
}

/// Many-to-many foreign-id <-> target-id maps, one per foreign organism.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OrthologMap {
    /// organism -> target id -> foreign ids
    by_target: BTreeMap<String, BTreeMap<String, BTreeSet<String>>>,
}

impl OrthologMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, organism: &str, foreign_id: &str, target_id: &str) {
        self.by_target
            .entry(organism.to_string())
            .or_default()
            .entry(target_id.to_string())
            .or_default()
            .insert(foreign_id.to_string());
    }

    /// Organisms in ascending name order.
    pub fn organisms(&self) -> impl Iterator<Item = &str> {
        self.by_target.keys().map(String::as_str)
    }

    /// Foreign counterparts of `target` in `organism`.
    pub fn counterparts<'a>(&'a self, organism: &str, target: &str) -> impl Iterator<Item = &'a str> {
        self.by_target
            .get(organism)
            .and_then(|m| m.get(target))
            .into_iter()
            .flatten()
            .map(String::as_str)
    }

    /// `(organism, foreign, target)` triples, sorted.
    pub fn records(&self) -> Vec<(&str, &str, &str)> {
        let mut out = Vec::new();
        for (org, m) in &self.by_target {
            for (target, foreign) in m {
                for f in foreign {
                    out.push((org.as_str(), f.as_str(), target.as_str()));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Per-organism (in [`OrthologMap::organisms`] order) maximum of the
/// path-length feature over all counterpart pairs of `p` and `s`.
pub fn ortholog_projected_features(
    foreign_graphs: &BTreeMap<String, InteractionGraph>,
    map: &OrthologMap,
    p: &str,
    s: &str,
) -> Vec<f64> {
    map.organisms()
        .map(|org| {
            let Some(graph) = foreign_graphs.get(org) else {
                return 0.0;
            };
            let mut best: f64 = 0.0;
            for fp in map.counterparts(org, p) {
                for fs in map.counterparts(org, s) {
                    best = best.max(ppi_feature(graph, fp, fs));
                }
            }
            best
        })
        .collect()
}
