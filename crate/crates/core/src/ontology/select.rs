use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{term_scores, OntologyDag, TermSimilarity};
use crate::error::{Error, Result};

pub const DEFAULT_MIN_DISTANCE: usize = 3;
pub const DEFAULT_MAX_DISTANCE: usize = 8;

fn as_set(ids: &[String]) -> BTreeSet<&str> {
    ids.iter().map(String::as_str).collect()
}

fn sample_sorted(pool: &[&str], k: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<String> = sample(&mut rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i].to_string())
        .collect();
    picked.sort_unstable();
    picked
}

/// Uniform sample of `k` distinct ids from `universe`, returned sorted.
/// Known positives in the universe are eligible.
pub fn select_unlabeled_random(universe: &[String], k: usize, seed: u64) -> Result<Vec<String>> {
    let pool: Vec<&str> = as_set(universe).into_iter().collect();
    if k > pool.len() {
        return Err(Error::param(
            "k",
            format!("cannot draw {k} genes from a universe of {}", pool.len()),
        ));
    }
    Ok(sample_sorted(&pool, k, seed))
}

/// The `k` genes of `universe \ seeds` least similar to the seed set, in
/// ascending similarity with ties by id.
pub fn select_unlabeled_by_similarity<S: TermSimilarity + ?Sized>(
    dag: &OntologyDag,
    sim: &S,
    universe: &[String],
    seeds: &[String],
    k: usize,
) -> Result<Vec<String>> {
    if seeds.is_empty() {
        return Err(Error::EmptyInput("similarity selection needs at least one seed"));
    }
    let exclude = as_set(seeds);
    let candidates: Vec<&str> = as_set(universe)
        .into_iter()
        .filter(|g| !exclude.contains(g))
        .collect();
    if k > candidates.len() {
        return Err(Error::param(
            "k",
            format!("only {} non-seed genes are available, asked for {k}", candidates.len()),
        ));
    }
    let tp = dag.terms_of_set(exclude.iter().copied());
    let scores = term_scores(dag, sim, &tp);
    let mut ranked: Vec<(f64, &str)> = candidates
        .into_iter()
        .map(|g| (dag.terms_of(g).fold(0.0, |acc, t| acc + scores[t]), g))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(b.1)));
    Ok(ranked.into_iter().take(k).map(|(_, g)| g.to_string()).collect())
}

/// Genes of `universe` having a term outside `T(P)` whose distance to some
/// term of `T(P)` lies in `[min_distance, max_distance]`; `k` of them are
/// sampled uniformly, or all of them (with a warning) if fewer qualify.
pub fn select_unlabeled_by_distance(
    dag: &OntologyDag,
    universe: &[String],
    seeds: &[String],
    k: usize,
    min_distance: usize,
    max_distance: usize,
    seed: u64,
) -> Result<Vec<String>> {
    if min_distance > max_distance {
        return Err(Error::param(
            "min_distance",
            format!("{min_distance} exceeds max_distance {max_distance}"),
        ));
    }
    let tp = dag.terms_of_set(seeds.iter().map(String::as_str));
    let mut in_band = vec![false; dag.n_terms()];
    for &tj in &tp {
        for (t, d) in dag.distances_from(tj, Some(max_distance)).into_iter().enumerate() {
            if d.is_some_and(|d| d >= min_distance && d <= max_distance) {
                in_band[t] = true;
            }
        }
    }
    let qualifying: Vec<&str> = as_set(universe)
        .into_iter()
        .filter(|g| dag.terms_of(g).any(|t| in_band[t] && !tp.contains(&t)))
        .collect();
    if qualifying.len() < k {
        log::warn!(
            "distance selection: only {} genes satisfy {min_distance} <= d <= {max_distance}, asked for {k}",
            qualifying.len()
        );
        return Ok(qualifying.into_iter().map(str::to_string).collect());
    }
    Ok(sample_sorted(&qualifying, k, seed))
}

#[cfg(test)]
mod tests {
    use super::super::tests::dag;
    use super::super::{gene_set_similarity, term_shortest_path, InverseDistance};
    use super::*;

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn random_selection_examples() {
        let universe = ids(&["a", "b", "c", "d"]);
        assert_eq!(select_unlabeled_random(&universe, 4, 1).unwrap(), universe);
        assert_eq!(
            select_unlabeled_random(&universe, 2, 9).unwrap(),
            select_unlabeled_random(&universe, 2, 9).unwrap()
        );
        assert!(select_unlabeled_random(&universe, 5, 1).is_err());
    }

    #[test]
    fn random_selection_is_uniform() {
        let universe: Vec<String> = (0..10).map(|i| format!("g{i}")).collect();
        let mut counts = std::collections::HashMap::new();
        for seed in 0..10_000u64 {
            let pick = select_unlabeled_random(&universe, 1, seed).unwrap();
            *counts.entry(pick[0].clone()).or_insert(0usize) += 1;
        }
        // binomial(10000, 0.1): sd = 30
        for g in &universe {
            let c = counts.get(g).copied().unwrap_or(0) as f64;
            assert!((c - 1000.0).abs() <= 90.0, "{g}: {c}");
        }
    }

    /// Six genes over a small two-branch ontology.
    fn toy() -> OntologyDag {
        let mut d = dag(&[
            ("root", &[]),
            ("x", &["root"]),
            ("x1", &["x"]),
            ("x2", &["x"]),
            ("y", &["root"]),
            ("y1", &["y"]),
            ("y11", &["y1"]),
            ("y111", &["y11"]),
            ("y1111", &["y111"]),
            ("island", &[]),
        ]);
        for (g, t) in [
            ("p1", "x1"),
            ("p2", "x2"),
            ("g1", "x1"),
            ("g2", "y1"),
            ("g2", "x"),
            ("g3", "y1111"),
            ("g4", "island"),
            ("g5", "y11"),
            ("g6", "x2"),
        ] {
            d.annotate(g, t).unwrap();
        }
        d
    }

    #[test]
    fn similarity_selection_matches_exhaustive_sort() {
        let d = toy();
        let universe = ids(&["g6", "g5", "g4", "g3", "g2", "g1", "p1", "unannotated"]);
        let seeds = ids(&["p1", "p2"]);
        let mut oracle: Vec<(f64, String)> = universe
            .iter()
            .filter(|g| !seeds.contains(g))
            .map(|g| (gene_set_similarity(&d, &InverseDistance, g, &seeds), g.clone()))
            .collect();
        oracle.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        for k in 0..=7 {
            let got = select_unlabeled_by_similarity(&d, &InverseDistance, &universe, &seeds, k).unwrap();
            let want: Vec<String> = oracle.iter().take(k).map(|(_, g)| g.clone()).collect();
            assert_eq!(got, want);
        }
        // zero-similarity genes come first, by id
        let first = select_unlabeled_by_similarity(&d, &InverseDistance, &universe, &seeds, 2).unwrap();
        assert_eq!(first, ids(&["g4", "unannotated"]));
        assert!(select_unlabeled_by_similarity(&d, &InverseDistance, &universe, &seeds, 8).is_err());
        assert!(select_unlabeled_by_similarity(&d, &InverseDistance, &universe, &[], 1).is_err());

        let mut shuffled = universe.clone();
        shuffled.reverse();
        assert_eq!(
            select_unlabeled_by_similarity(&d, &InverseDistance, &shuffled, &seeds, 5).unwrap(),
            select_unlabeled_by_similarity(&d, &InverseDistance, &universe, &seeds, 5).unwrap()
        );
    }

    #[test]
    fn distance_selection_matches_exhaustive_check() {
        let d = toy();
        let universe = ids(&["g1", "g2", "g3", "g4", "g5", "g6", "p1", "p2"]);
        let seeds = ids(&["p1", "p2"]);
        let tp = d.terms_of_set(seeds.iter().map(String::as_str));
        for (lo, hi) in [(1, 8), (3, 8), (3, 4), (4, 5), (6, 6), (2, 2)] {
            let oracle: Vec<String> = universe
                .iter()
                .filter(|g| {
                    d.terms_of(g).filter(|t| !tp.contains(t)).any(|ti| {
                        tp.iter().any(|&tj| {
                            let dist = term_shortest_path(&d, &d.terms()[ti], &d.terms()[tj]).unwrap();
                            dist.is_some_and(|x| x >= lo && x <= hi)
                        })
                    })
                })
                .cloned()
                .collect();
            let got = select_unlabeled_by_distance(&d, &universe, &seeds, 100, lo, hi, 0).unwrap();
            assert_eq!(got, oracle, "band [{lo}, {hi}]");
        }
    }

    #[test]
    fn distance_selection_boundaries() {
        let d = toy();
        let seeds = ids(&["p1"]);
        // g1 only carries x1, which is in T(P)
        let got = select_unlabeled_by_distance(&d, &ids(&["g1"]), &seeds, 1, 0, 8, 0).unwrap();
        assert!(got.is_empty());
        // g5: y11 is exactly 5 hops from x1
        assert_eq!(term_shortest_path(&d, "y11", "x1").unwrap(), Some(5));
        let got = select_unlabeled_by_distance(&d, &ids(&["g5"]), &seeds, 1, 5, 5, 0).unwrap();
        assert_eq!(got, ids(&["g5"]));
        assert!(select_unlabeled_by_distance(&d, &ids(&["g5"]), &seeds, 1, 6, 5, 0).is_err());
        let all = ids(&["g2", "g3", "g5", "g6"]);
        let two = select_unlabeled_by_distance(&d, &all, &seeds, 2, 1, 8, 4).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two, select_unlabeled_by_distance(&d, &all, &seeds, 2, 1, 8, 4).unwrap());
    }
}
