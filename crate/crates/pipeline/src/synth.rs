//! Synthetic data: a Gaussian PU benchmark with hidden truth, and a small
//! synthetic genome whose source files exercise the whole pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use lpu_core::Error as CoreError;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::benchmark::{stratified_split, BenchmarkSplit};
use crate::error::{Result, Stage, StageExt};
use crate::io::write_atomic;

/// Parameters of [`generate_synthetic_benchmark`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    /// True positives in the training pool.
    pub n_pos: usize,
    /// Size of `U`: unrevealed positives topped up with negatives.
    pub n_unl: usize,
    pub n_test: usize,
    pub test_positive_fraction: f64,
    pub dim: usize,
    /// Probability that a true positive is revealed as a seed.
    pub label_frequency: f64,
    /// Distance between the class means in units of the noise deviation.
    pub separation: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n_pos: 500,
            n_unl: 720,
            n_test: 720,
            test_positive_fraction: 300.0 / 720.0,
            dim: 20,
            label_frequency: 0.5,
            separation: 2.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBenchmark {
    pub split: BenchmarkSplit,
    pub features: BTreeMap<String, Vec<f64>>,
}

impl SyntheticBenchmark {
    /// Feature rows of `ids`, in order.
    pub fn rows(&self, ids: &[String]) -> Vec<Vec<f64>> {
        ids.iter().map(|id| self.features[id].clone()).collect()
    }
}

/// Draws positives from `N(+m, I)` and negatives from `N(-m, I)` with
/// `|2m| = separation`, reveals each pool positive with probability
/// `label_frequency` and fills `U` with negatives. Test negatives are fresh
/// draws from the negative class.
pub fn generate_synthetic_benchmark(spec: &SyntheticSpec) -> lpu_core::Result<SyntheticBenchmark> {
    let c = spec.label_frequency;
    if !(c > 0.0 && c <= 1.0) {
        return Err(CoreError::InvalidData(format!("label frequency {c} outside (0, 1]")));
    }
    if spec.dim == 0 || spec.n_pos == 0 || spec.n_test == 0 {
        return Err(CoreError::InvalidData("dim, n_pos and n_test must be positive".into()));
    }
    if !(spec.separation >= 0.0 && spec.separation.is_finite()) {
        return Err(CoreError::InvalidData(format!("separation {} must be >= 0", spec.separation)));
    }
    if !(0.0..=1.0).contains(&spec.test_positive_fraction) {
        return Err(CoreError::InvalidData("test positive fraction outside [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let shift = spec.separation / 2.0 / (spec.dim as f64).sqrt();
    let draw = |positive: bool, rng: &mut ChaCha8Rng| -> Vec<f64> {
        let m = if positive { shift } else { -shift };
        (0..spec.dim).map(|_| m + noise.sample(rng)).collect()
    };

    let mut features = BTreeMap::new();
    let mut truth = BTreeMap::new();
    let mut next_id = 0usize;
    let mut fresh = |features: &mut BTreeMap<String, Vec<f64>>, truth: &mut BTreeMap<String, bool>, x: Vec<f64>, y: bool| {
        let id = format!("syn{next_id:05}");
        next_id += 1;
        features.insert(id.clone(), x);
        truth.insert(id.clone(), y);
        id
    };

    let mut positives = Vec::new();
    let mut unlabeled = Vec::new();
    for _ in 0..spec.n_pos {
        let x = draw(true, &mut rng);
        let revealed = rng.random::<f64>() < c;
        let id = fresh(&mut features, &mut truth, x, true);
        if revealed {
            positives.push(id);
        } else {
            unlabeled.push(id);
        }
    }
    if positives.is_empty() {
        return Err(CoreError::DegenerateLabels("no positive was revealed".into()));
    }
    if unlabeled.len() > spec.n_unl {
        return Err(CoreError::InvalidData(format!(
            "{} unrevealed positives do not fit in n_unl = {}",
            unlabeled.len(),
            spec.n_unl
        )));
    }
    while unlabeled.len() < spec.n_unl {
        let x = draw(false, &mut rng);
        unlabeled.push(fresh(&mut features, &mut truth, x, false));
    }
    let n_test_pos = (spec.n_test as f64 * spec.test_positive_fraction).round() as usize;
    let mut test = Vec::with_capacity(spec.n_test);
    for i in 0..spec.n_test {
        let y = i < n_test_pos;
        let x = draw(y, &mut rng);
        test.push(fresh(&mut features, &mut truth, x, y));
    }
    let (train, dev) = stratified_split(&positives, &unlabeled, &mut rng);
    let split = BenchmarkSplit {
        positives,
        unlabeled,
        train,
        dev,
        test,
        truth,
    };
    split.validate()?;
    Ok(SyntheticBenchmark { split, features })
}

/// Parameters of [`generate_synthetic_sources`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthWorldSpec {
    pub n_genes: usize,
    /// Genes of the planted functional module; they form the seed file.
    pub module_size: usize,
    pub n_experiments: usize,
    /// Probability that a module gene's annotations come from the module's
    /// ontology branch (and that another gene's do not).
    pub term_coherence: f64,
    pub seed: u64,
}

impl Default for SynthWorldSpec {
    fn default() -> Self {
        Self {
            n_genes: 600,
            module_size: 150,
            n_experiments: 12,
            term_coherence: 0.9,
            seed: 0,
        }
    }
}

const BRANCHES: usize = 6;
const CHILDREN: usize = 5;
const LEAVES: usize = 4;
const EVIDENCE: [&str; 4] = ["EXP", "IDA", "IPI", "IEA"];
const SOURCES: [&str; 3] = ["Y2H", "AP", "LIT"];
const TOPIC: [&str; 6] = ["chloroplast", "thylakoid", "photosystem", "plastid", "rubisco", "carotenoid"];

fn gene(i: usize) -> String {
    format!("AT{i:05}")
}

fn leaf_term(branch: usize, child: usize, leaf: usize) -> String {
    // 1-based digits keep every level distinct from the root GO:0000000
    format!("GO:{}{}{:05}", branch + 1, child + 1, leaf + 1)
}

/// Writes a synthetic genome into `dir`: every source file plus
/// `config.txt` ready for `lpu benchmark`.
///
/// Module genes interact densely, share an expression factor, carry topic
/// words in their documents, and draw their ontology terms mostly from one
/// branch of the term tree.
pub fn generate_synthetic_sources(dir: &Path, spec: &SynthWorldSpec) -> Result<()> {
    if spec.module_size == 0 || spec.module_size >= spec.n_genes {
        return Err(CoreError::InvalidData("module_size must lie in 1..n_genes".into())).stage(Stage::Ingest);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let noise = Normal::new(0.0, 1.0).expect("unit normal");
    let genes: Vec<String> = (0..spec.n_genes).map(gene).collect();
    let module: Vec<usize> = {
        let mut m: Vec<usize> = sample(&mut rng, spec.n_genes, spec.module_size).into_vec();
        m.sort_unstable();
        m
    };
    let in_module: BTreeSet<usize> = module.iter().copied().collect();
    let year = |rng: &mut ChaCha8Rng| rng.random_range(1998..=2012);
    let mut files: Vec<(&str, String, String)> = Vec::new();

    let mut s = String::from("gene_id\n");
    for &m in &module {
        writeln!(s, "{}", genes[m]).expect("string write");
    }
    files.push(("seeds", "seeds.tsv".into(), s));

    // interactions
    let mut edges = BTreeSet::new();
    let add = |a: usize, b: usize, edges: &mut BTreeSet<(usize, usize)>| {
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    };
    for &m in &module {
        for _ in 0..2 {
            let other = module[rng.random_range(0..module.len())];
            add(m, other, &mut edges);
        }
    }
    for g in 0..spec.n_genes {
        let other = rng.random_range(0..spec.n_genes);
        add(g, other, &mut edges);
    }
    let mut s = String::from("id_a\tid_b\tsource\tyear\n");
    for &(a, b) in &edges {
        let src = SOURCES[rng.random_range(0..SOURCES.len())];
        writeln!(s, "{}\t{}\t{src}\t{}", genes[a], genes[b], year(&mut rng)).expect("string write");
    }
    files.push(("interactions", "interactions.tsv".into(), s));

    // orthologs and the foreign interaction graph: mapped genes keep their
    // edges with probability 0.7
    let foreign: BTreeMap<usize, String> = (0..spec.n_genes)
        .filter(|_| rng.random::<f64>() < 0.6)
        .map(|g| (g, format!("YOR{g:04}")))
        .collect();
    let mut s = String::from("organism\tforeign_id\ttarget_id\n");
    for (g, f) in &foreign {
        writeln!(s, "yeast\t{f}\t{}", genes[*g]).expect("string write");
    }
    files.push(("orthologs", "orthologs.tsv".into(), s));
    let mut s = String::from("id_a\tid_b\tsource\tyear\n");
    for &(a, b) in &edges {
        if let (Some(fa), Some(fb)) = (foreign.get(&a), foreign.get(&b)) {
            if rng.random::<f64>() < 0.7 {
                writeln!(s, "{fa}\t{fb}\tY2H\t{}", year(&mut rng)).expect("string write");
            }
        }
    }
    files.push(("interactions.yeast", "interactions.yeast.tsv".into(), s));

    // expression: module genes load on a shared factor
    let factor: Vec<f64> = (0..spec.n_experiments).map(|_| noise.sample(&mut rng)).collect();
    let mut s = String::from("gene_id");
    for k in 1..=spec.n_experiments {
        write!(s, "\tv{k}").expect("string write");
    }
    s.push('\n');
    for (g, name) in genes.iter().enumerate() {
        let load = if in_module.contains(&g) { 1.5 } else { 0.0 };
        s.push_str(name);
        for f in &factor {
            let v: f64 = load * f + noise.sample(&mut rng);
            write!(s, "\t{}", (v * 1000.0).round() / 1000.0).expect("string write");
        }
        s.push('\n');
    }
    files.push(("expression", "expression.tsv".into(), s));

    // documents and relation scores
    let vocab: Vec<String> = (0..80).map(|i| format!("word{i:02}")).collect();
    let mut s = String::from("gene_id\tdoc_id\tyear\ttext\n");
    let mut doc_of: Vec<Vec<String>> = vec![Vec::new(); spec.n_genes];
    let mut next_doc = 0usize;
    for g in 0..spec.n_genes {
        for _ in 0..rng.random_range(1..=3) {
            let doc = format!("PMID{next_doc:07}");
            next_doc += 1;
            let mut words: Vec<&str> = (0..12).map(|_| vocab[rng.random_range(0..vocab.len())].as_str()).collect();
            if in_module.contains(&g) && rng.random::<f64>() < 0.7 {
                words.extend((0..3).map(|_| TOPIC[rng.random_range(0..TOPIC.len())]));
            }
            writeln!(s, "{}\t{doc}\t{}\t{}", genes[g], year(&mut rng), words.join(" ")).expect("string write");
            doc_of[g].push(doc);
        }
    }
    files.push(("documents", "documents.tsv".into(), s));
    let mut s = String::from("id_a\tid_b\tdoc_id\tscore\n");
    for _ in 0..spec.n_genes {
        let a = rng.random_range(0..spec.n_genes);
        let module_pair = rng.random::<f64>() < 0.5;
        let b = if module_pair {
            module[rng.random_range(0..module.len())]
        } else {
            rng.random_range(0..spec.n_genes)
        };
        if a == b {
            continue;
        }
        let both = in_module.contains(&a) && in_module.contains(&b);
        let score: f64 = if both { rng.random_range(0.5..1.0) } else { rng.random_range(0.0..0.5) };
        let doc = &doc_of[a][0];
        writeln!(s, "{}\t{}\t{doc}\t{}", genes[a], genes[b], (score * 1000.0).round() / 1000.0).expect("string write");
    }
    files.push(("relations", "relations.tsv".into(), s));

    // ontology: root -> branch -> child -> leaf
    let mut s = String::from("term_id\tparent_ids\nGO:0000000\t\n");
    for b in 0..BRANCHES {
        writeln!(s, "GO:{}000000\tGO:0000000", b + 1).expect("string write");
        for c in 0..CHILDREN {
            writeln!(s, "GO:{}{}00000\tGO:{}000000", b + 1, c + 1, b + 1).expect("string write");
            for l in 1..=LEAVES {
                writeln!(s, "{}\tGO:{}{}00000", leaf_term(b, c, l), b + 1, c + 1).expect("string write");
            }
        }
    }
    files.push(("ontology", "ontology.tsv".into(), s));

    let mut s = String::from("gene_id\tterm_id\tevidence\tyear\n");
    for g in 0..spec.n_genes {
        let member = in_module.contains(&g);
        if !member && rng.random::<f64>() < 0.15 {
            continue;
        }
        for _ in 0..2 {
            let coherent = rng.random::<f64>() < spec.term_coherence;
            let branch = match (member, coherent) {
                (true, true) | (false, false) => 0,
                _ => rng.random_range(1..BRANCHES),
            };
            let term = leaf_term(branch, rng.random_range(0..CHILDREN), rng.random_range(1..=LEAVES));
            let ev = EVIDENCE[rng.random_range(0..EVIDENCE.len())];
            writeln!(s, "{}\t{term}\t{ev}\t{}", genes[g], year(&mut rng)).expect("string write");
        }
    }
    files.push(("go", "go.tsv".into(), s));

    // pathway and regulatory tables: one planted term each
    for (key, planted, n_terms, prefix) in [
        ("kegg", "ath00195", 20, "ath"),
        ("aracyc", "PWY-101", 20, "PWY-"),
        ("tf", "TF01", 10, "TF"),
        ("tfbs", "SITE01", 15, "SITE"),
    ] {
        let mut s = String::from("gene_id\tterm_id\tevidence\tyear\n");
        for g in 0..spec.n_genes {
            if in_module.contains(&g) && rng.random::<f64>() < 0.6 {
                writeln!(s, "{}\t{planted}\t.\t{}", genes[g], year(&mut rng)).expect("string write");
            }
            if rng.random::<f64>() < 0.3 {
                let t = rng.random_range(2..=n_terms);
                writeln!(s, "{}\t{prefix}{t:02}\t.\t{}", genes[g], year(&mut rng)).expect("string write");
            }
        }
        files.push((key, format!("{key}.tsv"), s));
    }

    let mut config = String::from("# synthetic genome\n");
    for (key, file, body) in &files {
        write_atomic(&dir.join(file), body.as_bytes())?;
        writeln!(config, "{key} = {file}").expect("string write");
    }
    config.push_str(
        "method = wsvm\nkernel = linear\nunlabeled_selection = random\n\
         n_pos = 30\nn_unl = 200\nn_test_pos = 40\nn_test_neg = 60\n\
         grid_c = 0.1,1,10\ngrid_j = 1,5,20\ntrials = 5\nmethods = naive-svm,bsvm,wsvm\nprecision_n = 20\n",
    );
    writeln!(config, "seed = {}", spec.seed).expect("string write");
    write_atomic(&dir.join("config.txt"), config.as_bytes())
}
