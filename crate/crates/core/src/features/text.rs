use std::collections::{BTreeMap, BTreeSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::svm::{train_svm, Label, SolverOptions, TrainingProblem};

/// Lowercased alphanumeric runs of length at least 2.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
}

/// Per-item text evidence: token counts `T(p)`, document ids `PID(p)`, and
/// per-pair relation-extraction scores.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocumentCorpus {
    tokens: BTreeMap<String, BTreeMap<String, usize>>,
    documents: BTreeMap<String, BTreeSet<String>>,
    /// Keyed by the id pair in ascending order.
    relations: BTreeMap<(String, String), Vec<f64>>,
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

impl DocumentCorpus {
    pub fn new() -> Self {
        Self::default()
    }

    /// Attaches document `doc_id` to `item`. A document already attached to
    /// the item is ignored.
    pub fn add_document(&mut self, item: &str, doc_id: &str, text: &str) {
        if !self
            .documents
            .entry(item.to_string())
            .or_default()
            .insert(doc_id.to_string())
        {
            return;
        }
        let counts = self.tokens.entry(item.to_string()).or_default();
        for t in tokenize(text) {
            *counts.entry(t).or_insert(0) += 1;
        }
    }

    /// Records one sentence-level relation score for the pair `(a, b)`.
    pub fn add_relation(&mut self, a: &str, b: &str, score: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::InvalidData(format!(
                "relation score {score} for ({a}, {b}) is outside [0, 1]"
            )));
        }
        self.relations.entry(pair_key(a, b)).or_default().push(score);
        Ok(())
    }

    /// Token counts of `item`; empty when it has no text.
    pub fn tokens(&self, item: &str) -> Option<&BTreeMap<String, usize>> {
        self.tokens.get(item)
    }

    pub fn documents(&self, item: &str) -> Option<&BTreeSet<String>> {
        self.documents.get(item)
    }

    pub fn relation_scores(&self, a: &str, b: &str) -> &[f64] {
        self.relations
            .get(&pair_key(a, b))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn has_item(&self, item: &str) -> bool {
        self.documents.contains_key(item)
    }
}

/// Document frequencies over a fixed item universe `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdf {
    n_items: usize,
    items: BTreeSet<String>,
    df: BTreeMap<String, usize>,
}

impl TfIdf {
    pub fn fit(corpus: &DocumentCorpus, dataset_items: &[String]) -> Result<Self> {
        let items: BTreeSet<String> = dataset_items.iter().cloned().collect();
        if items.is_empty() {
            return Err(Error::EmptyInput("tf-idf needs a nonempty item universe"));
        }
        let mut df = BTreeMap::new();
        for item in &items {
            for word in corpus.tokens(item).into_iter().flat_map(|t| t.keys()) {
                *df.entry(word.clone()).or_insert(0) += 1;
            }
        }
        Ok(Self {
            n_items: items.len(),
            items,
            df,
        })
    }

    /// `ln(|D| / df(w))`; `None` for a word no item of `D` contains.
    pub fn idf(&self, word: &str) -> Option<f64> {
        self.df
            .get(word)
            .map(|&df| (self.n_items as f64 / df as f64).ln())
    }

    /// Sparse `tf * idf` weights of the words of `item`.
    pub fn weights(&self, corpus: &DocumentCorpus, item: &str) -> Result<BTreeMap<String, f64>> {
        if !self.items.contains(item) {
            return Err(Error::UnknownId(format!("{item} is not in the tf-idf universe")));
        }
        Ok(corpus
            .tokens(item)
            .into_iter()
            .flatten()
            .map(|(w, &tf)| {
                let idf = self.idf(w).expect("every word of a universe item has df >= 1");
                (w.clone(), tf as f64 * idf)
            })
            .collect())
    }
}

/// tf-idf weights of `p` with document frequencies over `dataset_items`.
pub fn tfidf_features(
    corpus: &DocumentCorpus,
    dataset_items: &[String],
    p: &str,
) -> Result<BTreeMap<String, f64>> {
    TfIdf::fit(corpus, dataset_items)?.weights(corpus, p)
}

/// Uniform sample of `min(factor * |seeds|, available)` items of
/// `candidates` that are not seeds, returned sorted.
pub fn sample_background(candidates: &[String], seeds: &[String], factor: usize, seed: u64) -> Vec<String> {
    let exclude: BTreeSet<&str> = seeds.iter().map(String::as_str).collect();
    let pool: Vec<&str> = candidates
        .iter()
        .map(String::as_str)
        .filter(|c| !exclude.contains(c))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let k = (factor * seeds.len()).min(pool.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<String> = sample(&mut rng, pool.len(), k)
        .into_iter()
        .map(|i| pool[i].to_string())
        .collect();
    out.sort_unstable();
    out
}

/// Output of [`stacked_ir_feature`].
#[derive(Debug, Clone, PartialEq)]
pub struct StackedIr {
    /// Margin per dataset item.
    pub margins: BTreeMap<String, f64>,
    /// Margin of an item without text.
    pub bias: f64,
}

/// Margin of a linear SVM trained on tf-idf vectors (seeds `+1`, background
/// `-1`), for every item of `dataset_items`.
pub fn stacked_ir_feature(
    seeds: &[String],
    background: &[String],
    corpus: &DocumentCorpus,
    dataset_items: &[String],
    c: f64,
) -> Result<StackedIr> {
    if seeds.len() < 2 {
        return Err(Error::param("seeds", "stacking needs at least two seed items"));
    }
    if background.is_empty() {
        return Err(Error::EmptyInput("stacking needs background items"));
    }
    let seed_set: BTreeSet<&str> = seeds.iter().map(String::as_str).collect();
    if let Some(b) = background.iter().find(|b| seed_set.contains(b.as_str())) {
        return Err(Error::InvalidData(format!("`{b}` is both a seed and a background item")));
    }
    let tfidf = TfIdf::fit(corpus, dataset_items)?;
    let training: Vec<(&String, Label)> = seeds
        .iter()
        .map(|s| (s, Label::Positive))
        .chain(background.iter().map(|b| (b, Label::Negative)))
        .collect();
    let sparse: Vec<BTreeMap<String, f64>> = training
        .iter()
        .map(|(id, _)| tfidf.weights(corpus, id))
        .collect::<Result<_>>()?;
    // words outside the training vocabulary get zero weight in w
    let vocabulary: BTreeMap<&str, usize> = sparse
        .iter()
        .flat_map(|m| m.keys().map(String::as_str))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, w)| (w, i))
        .collect();
    let dense = |m: &BTreeMap<String, f64>| {
        let mut v = vec![0.0; vocabulary.len().max(1)];
        for (w, x) in m {
            if let Some(&i) = vocabulary.get(w.as_str()) {
                v[i] = *x;
            }
        }
        v
    };
    let x: Vec<Vec<f64>> = sparse.iter().map(dense).collect();
    let labels = training.iter().map(|(_, l)| *l).collect();
    let problem = TrainingProblem::with_uniform_cost(x, labels, c, KernelSpec::Linear)?;
    let model = train_svm(&problem, &SolverOptions::default())?;
    let w = model.linear_weights().expect("linear kernel");
    let mut out = BTreeMap::new();
    for item in dataset_items {
        let margin: f64 = tfidf
            .weights(corpus, item)?
            .iter()
            .filter_map(|(word, x)| vocabulary.get(word.as_str()).map(|&i| w[i] * x))
            .sum::<f64>()
            + model.bias();
        out.insert(item.clone(), margin);
    }
    Ok(StackedIr {
        margins: out,
        bias: model.bias(),
    })
}

/// `|PID(p) ∩ PID(s)|`.
pub fn shared_document_feature(corpus: &DocumentCorpus, p: &str, s: &str) -> usize {
    match (corpus.documents(p), corpus.documents(s)) {
        (Some(a), Some(b)) => a.intersection(b).count(),
        _ => 0,
    }
}

/// Mean relation score over the sentences mentioning both `p` and `s`; 0
/// without any.
pub fn relation_score_feature(corpus: &DocumentCorpus, p: &str, s: &str) -> f64 {
    let scores = corpus.relation_scores(p, s);
    if scores.is_empty() {
        0.0
    } else {
        scores.iter().sum::<f64>() / scores.len() as f64
    }
}
