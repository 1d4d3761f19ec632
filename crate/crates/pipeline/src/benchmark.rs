//! Benchmark construction: seed sampling, unlabeled-example selection, the
//! stratified train/dev split and the held-out test set.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use lpu_core::eval::Truth;
use lpu_core::ontology::{
    select_unlabeled_by_distance, select_unlabeled_by_similarity, select_unlabeled_random,
    InverseDistance,
};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{RunConfig, UnlabeledSelection};
use crate::error::{PipelineError, Result, Stage, StageExt};
use crate::ingest::Sources;
use crate::io::{read_text, write_atomic};

/// Independent stream seeds of one run, all drawn from the config seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSeeds {
    pub split: u64,
    pub unlabeled: u64,
    pub background: u64,
    pub method: u64,
}

impl RunSeeds {
    pub fn derive(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            split: rng.random(),
            unlabeled: rng.random(),
            background: rng.random(),
            method: rng.random(),
        }
    }

    pub fn to_pairs(&self) -> Vec<(String, String)> {
        vec![
            ("derived.seed.split".into(), self.split.to_string()),
            ("derived.seed.unlabeled".into(), self.unlabeled.to_string()),
            ("derived.seed.background".into(), self.background.to_string()),
            ("derived.seed.method".into(), self.method.to_string()),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Train,
    Dev,
    Test,
}

impl Part {
    fn name(self) -> &'static str {
        match self {
            Part::Train => "train",
            Part::Dev => "dev",
            Part::Test => "test",
        }
    }
}

/// `P`, `U`, their train/dev split and the held-out test set, with the
/// hidden truth of every item. All lists are sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSplit {
    pub positives: Vec<String>,
    pub unlabeled: Vec<String>,
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
    pub truth: BTreeMap<String, bool>,
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort_unstable();
    v
}

fn draw(pool: &[String], k: usize, rng: &mut ChaCha8Rng, what: &str) -> lpu_core::Result<Vec<String>> {
    if k > pool.len() {
        return Err(lpu_core::Error::InvalidData(format!(
            "need {k} {what} but only {} are available",
            pool.len()
        )));
    }
    Ok(sorted(sample(rng, pool.len(), k).into_iter().map(|i| pool[i].clone()).collect()))
}

/// Splits `P ∪ U` into train and dev. The dev set has `round(|P ∪ U| / 3)`
/// items, `round(|P| / 3)` of them positive.
pub fn stratified_split(
    positives: &[String],
    unlabeled: &[String],
    rng: &mut ChaCha8Rng,
) -> (Vec<String>, Vec<String>) {
    let total = positives.len() + unlabeled.len();
    let dev_total = (total as f64 / 3.0).round() as usize;
    let dev_pos = ((positives.len() as f64 / 3.0).round() as usize).min(dev_total);
    let dev_unl = (dev_total - dev_pos).min(unlabeled.len());
    let mut train = Vec::with_capacity(total - dev_total);
    let mut dev = Vec::with_capacity(dev_total);
    for (class, k) in [(positives, dev_pos), (unlabeled, dev_unl)] {
        let chosen: BTreeSet<usize> = sample(rng, class.len(), k).into_iter().collect();
        for (i, id) in class.iter().enumerate() {
            if chosen.contains(&i) {
                dev.push(id.clone());
            } else {
                train.push(id.clone());
            }
        }
    }
    (sorted(train), sorted(dev))
}

impl BenchmarkSplit {
    pub fn is_labeled(&self, id: &str) -> bool {
        self.positives.binary_search_by(|p| p.as_str().cmp(id)).is_ok()
    }

    /// Truth of the test items, as the evaluation module expects it.
    pub fn test_truth(&self) -> Truth {
        self.test
            .iter()
            .map(|id| (id.clone(), self.truth.get(id).copied().unwrap_or(false)))
            .collect()
    }

    /// Every item in train, dev, test order.
    pub fn items(&self) -> Vec<String> {
        self.train
            .iter()
            .chain(&self.dev)
            .chain(&self.test)
            .cloned()
            .collect()
    }

    /// Checks the partition invariants.
    pub fn validate(&self) -> lpu_core::Result<()> {
        fn set(v: &[String]) -> BTreeSet<&str> {
            v.iter().map(String::as_str).collect()
        }
        let (train, dev, test) = (set(&self.train), set(&self.dev), set(&self.test));
        let pu: BTreeSet<&str> = set(&self.positives).union(&set(&self.unlabeled)).copied().collect();
        let bad = |m: &str| Err(lpu_core::Error::InvalidData(format!("benchmark split: {m}")));
        if !train.is_disjoint(&dev) {
            return bad("train and dev overlap");
        }
        if train.union(&dev).copied().collect::<BTreeSet<_>>() != pu {
            return bad("train and dev do not cover P and U");
        }
        if !test.is_disjoint(&pu) {
            return bad("test overlaps P or U");
        }
        if self.positives.iter().any(|p| self.unlabeled.contains(p)) {
            return bad("P and U overlap");
        }
        Ok(())
    }

    /// `id  part  s  truth` rows, one per item.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("id\tpart\ts\ttruth\n");
        for (part, ids) in [(Part::Train, &self.train), (Part::Dev, &self.dev), (Part::Test, &self.test)] {
            for id in ids {
                let label = if part == Part::Test {
                    "."
                } else if self.is_labeled(id) {
                    "+1"
                } else {
                    "-1"
                };
                let truth = u8::from(self.truth.get(id).copied().unwrap_or(false));
                writeln!(s, "{id}\t{}\t{label}\t{truth}", part.name()).expect("string write");
            }
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_tsv().as_bytes())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "id\tpart\ts\ttruth")) => {}
            _ => return Err(PipelineError::parse(path, 1, "expected header `id\tpart\ts\ttruth`")),
        }
        let mut split = BenchmarkSplit {
            positives: Vec::new(),
            unlabeled: Vec::new(),
            train: Vec::new(),
            dev: Vec::new(),
            test: Vec::new(),
            truth: BTreeMap::new(),
        };
        for (i, line) in lines {
            let n = i as u64 + 1;
            let f: Vec<&str> = line.split('\t').collect();
            let [id, part, s, truth] = f[..] else {
                return Err(PipelineError::parse(path, n, "expected 4 fields"));
            };
            let list = match part {
                "train" => &mut split.train,
                "dev" => &mut split.dev,
                "test" => &mut split.test,
                _ => return Err(PipelineError::parse(path, n, format!("unknown part `{part}`"))),
            };
            list.push(id.to_string());
            match (part, s) {
                ("test", ".") => {}
                (_, "+1") if part != "test" => split.positives.push(id.to_string()),
                (_, "-1") if part != "test" => split.unlabeled.push(id.to_string()),
                _ => return Err(PipelineError::parse(path, n, format!("bad label `{s}` for part `{part}`"))),
            }
            let t = match truth {
                "1" => true,
                "0" => false,
                _ => return Err(PipelineError::parse(path, n, format!("bad truth `{truth}`"))),
            };
            split.truth.insert(id.to_string(), t);
        }
        for v in [
            &mut split.positives,
            &mut split.unlabeled,
            &mut split.train,
            &mut split.dev,
            &mut split.test,
        ] {
            v.sort_unstable();
        }
        split.validate().stage(Stage::Benchmark)?;
        Ok(split)
    }
}

/// Samples `P` from the seed file, draws the test set, selects `U` with the
/// configured strategy and splits `P ∪ U` into train and dev.
///
/// Test positives are seed-file genes outside `P`; test negatives are
/// genes absent from the seed file. Seed-file genes left in the pool are
/// hidden positives when they end up in `U`.
pub fn build_benchmark(cfg: &RunConfig, sources: &Sources) -> Result<BenchmarkSplit> {
    let seeds = RunSeeds::derive(cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seeds.split);
    let candidates = &sources.records.seeds;
    let cand_set: BTreeSet<&str> = candidates.iter().map(String::as_str).collect();

    let positives = draw(candidates, cfg.n_pos, &mut rng, "seed-file genes for P").stage(Stage::Benchmark)?;
    let p_set: BTreeSet<&str> = positives.iter().map(String::as_str).collect();
    let rest: Vec<String> = candidates.iter().filter(|c| !p_set.contains(c.as_str())).cloned().collect();
    let test_pos = draw(&rest, cfg.n_test_pos, &mut rng, "seed-file genes for test positives")
        .stage(Stage::Benchmark)?;
    let negatives: Vec<String> = sources
        .universe
        .iter()
        .filter(|g| !cand_set.contains(g.as_str()))
        .cloned()
        .collect();
    let test_neg = draw(&negatives, cfg.n_test_neg, &mut rng, "non-seed genes for test negatives")
        .stage(Stage::Benchmark)?;
    let test: BTreeSet<&str> = test_pos.iter().chain(&test_neg).map(String::as_str).collect();
    let pool: Vec<String> = sources
        .universe
        .iter()
        .filter(|g| !p_set.contains(g.as_str()) && !test.contains(g.as_str()))
        .cloned()
        .collect();

    let unlabeled = match cfg.unlabeled_selection {
        UnlabeledSelection::Random => select_unlabeled_random(&pool, cfg.n_unl, seeds.unlabeled),
        UnlabeledSelection::GoSimilarity => {
            let dag = sources.ontology.as_ref().ok_or_else(|| {
                PipelineError::Config("go-sim selection needs an ontology".into())
            })?;
            select_unlabeled_by_similarity(dag, &InverseDistance, &pool, &positives, cfg.n_unl)
        }
        UnlabeledSelection::GoDistance => {
            let dag = sources.ontology.as_ref().ok_or_else(|| {
                PipelineError::Config("go-dist selection needs an ontology".into())
            })?;
            select_unlabeled_by_distance(
                dag,
                &pool,
                &positives,
                cfg.n_unl,
                cfg.min_distance,
                cfg.max_distance,
                seeds.unlabeled,
            )
        }
    }
    .stage(Stage::Benchmark)?;
    if unlabeled.is_empty() {
        return Err(lpu_core::Error::EmptyInput("unlabeled selection returned no genes")).stage(Stage::Benchmark);
    }

    let (train, dev) = stratified_split(&positives, &unlabeled, &mut rng);
    let mut truth = BTreeMap::new();
    for id in positives.iter().chain(&test_pos) {
        truth.insert(id.clone(), true);
    }
    for id in unlabeled.iter().chain(&test_neg) {
        truth.insert(id.clone(), cand_set.contains(id.as_str()));
    }
    let split = BenchmarkSplit {
        positives,
        unlabeled,
        train,
        dev,
        test: test.into_iter().map(str::to_string).collect(),
        truth,
    };
    split.validate().stage(Stage::Benchmark)?;
    Ok(split)
}

/// Hidden-positive share of `U`.
pub fn hidden_positive_fraction(split: &BenchmarkSplit) -> f64 {
    let hidden = split.unlabeled.iter().filter(|u| split.truth[u.as_str()]).count();
    hidden as f64 / split.unlabeled.len().max(1) as f64
}

/// Lookup of the split's item parts.
pub fn part_index(split: &BenchmarkSplit) -> HashMap<&str, Part> {
    let mut out = HashMap::new();
    for (part, ids) in [(Part::Train, &split.train), (Part::Dev, &split.dev), (Part::Test, &split.test)] {
        for id in ids {
            out.insert(id.as_str(), part);
        }
    }
    out
}
