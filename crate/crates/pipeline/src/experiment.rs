//! Experiment orchestration: featurize, optionally reweight features, train
//! one learner, rank the test set and score the ranking.
//!
//! Every stochastic choice draws from a stream seeded by [`RunSeeds`], so a
//! manifest alone reproduces a run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use lpu_core::eval::{
    auc_at_fraction, one_tailed_paired_t, pr_curve, precision_at_n, prefix_depth, prevalence,
    write_metrics_tsv, write_pr_curve_csv, PrCurve, PrecisionMode, RankedList, Truth,
};
use lpu_core::features::{
    assemble_and_normalize, sample_background, FeatureMatrix, FeatureSources, TextSources,
};
use lpu_core::lpu::{
    train_biased_svm, tune_weighted_svm, BiasedGrid, GridSearchReport, PuDataset, WeightedSvmConfig,
};
use lpu_core::selection::{weston_select, WestonConfig};
use lpu_core::ssl::{
    label_propagation, train_lapsvm, train_naive_svm, train_tsvm, AffinityGraph,
    LabelPropagationConfig, LapSvmConfig, TsvmConfig,
};
use lpu_core::svm::{DecisionFunction, SolverOptions};
use lpu_core::{KernelSpec, Label};

use crate::benchmark::{build_benchmark, hidden_positive_fraction, BenchmarkSplit, RunSeeds};
use crate::config::{DataSource, Method, RunConfig};
use crate::error::{PipelineError, Result, Stage, StageExt};
use crate::ingest::{ingest_sources, Sources};
use crate::io::{read_text, write_atomic, write_with};
use crate::synth::{generate_synthetic_benchmark, SyntheticSpec};

/// Named feature rows, one per item.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub items: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureTable {
    pub fn from_matrix(m: &FeatureMatrix) -> Self {
        Self {
            items: m.items().to_vec(),
            columns: m.columns().to_vec(),
            rows: m.rows().to_vec(),
        }
    }

    pub fn rows_of(&self, ids: &[String]) -> Result<Vec<Vec<f64>>> {
        let index: BTreeMap<&str, usize> =
            self.items.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
        ids.iter()
            .map(|id| {
                index
                    .get(id.as_str())
                    .map(|&i| self.rows[i].clone())
                    .ok_or_else(|| PipelineError::Config(format!("feature table has no row for `{id}`")))
            })
            .collect()
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("item");
        for c in &self.columns {
            write!(s, "\t{c}").expect("string write");
        }
        s.push('\n');
        for (id, row) in self.items.iter().zip(&self.rows) {
            s.push_str(id);
            for v in row {
                write!(s, "\t{v}").expect("string write");
            }
            s.push('\n');
        }
        s
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| PipelineError::parse(path, 1, "empty feature file"))?;
        let mut cols = header.split('\t');
        if cols.next() != Some("item") {
            return Err(PipelineError::parse(path, 1, "expected header starting with `item`"));
        }
        let columns: Vec<String> = cols.map(str::to_string).collect();
        let mut items = Vec::new();
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let n = i as u64 + 2;
            let mut f = line.split('\t');
            let id = f.next().unwrap_or("").to_string();
            let row = f
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|e| PipelineError::parse(path, n, format!("value `{v}`: {e}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if row.len() != columns.len() {
                return Err(PipelineError::parse(
                    path,
                    n,
                    format!("expected {} values, found {}", columns.len(), row.len()),
                ));
            }
            items.push(id);
            rows.push(row);
        }
        Ok(Self { items, columns, rows })
    }
}

/// Split plus features of one trial, shared by every learner.
#[derive(Debug, Clone)]
pub struct PreparedTrial {
    pub seeds: RunSeeds,
    pub split: BenchmarkSplit,
    pub features: FeatureTable,
    /// Block map of file-based features.
    pub blocks: Option<String>,
    /// Feature weights when feature selection ran.
    pub weights: Option<Vec<f64>>,
}

/// Builds the split of one trial: from the sources, or from the synthetic
/// generator (which also yields the features).
pub fn make_split(cfg: &RunConfig, sources: Option<&Sources>) -> Result<(BenchmarkSplit, Option<FeatureTable>)> {
    match cfg.source {
        DataSource::Files => {
            let sources = sources.ok_or_else(|| PipelineError::Config("file sources were not ingested".into()))?;
            Ok((build_benchmark(cfg, sources)?, None))
        }
        DataSource::Synthetic => {
            let seeds = RunSeeds::derive(cfg.seed);
            let n_test = cfg.n_test_pos + cfg.n_test_neg;
            let spec = SyntheticSpec {
                n_pos: cfg.synth_positives,
                n_unl: cfg.n_unl,
                n_test,
                test_positive_fraction: cfg.n_test_pos as f64 / n_test as f64,
                dim: cfg.dim,
                label_frequency: cfg.label_frequency,
                separation: cfg.separation,
                seed: seeds.split,
            };
            let bench = generate_synthetic_benchmark(&spec).stage(Stage::Benchmark)?;
            let items = bench.split.items();
            let table = FeatureTable {
                rows: bench.rows(&items),
                columns: (1..=cfg.dim).map(|k| format!("x{k}")).collect(),
                items,
            };
            Ok((bench.split, Some(table)))
        }
    }
}

/// Assembles the normalized features of every split item against `P`.
pub fn featurize(cfg: &RunConfig, sources: &Sources, split: &BenchmarkSplit) -> Result<(FeatureTable, String)> {
    let seeds = RunSeeds::derive(cfg.seed);
    let items = split.items();
    let background = sample_background(&split.unlabeled, &split.positives, cfg.background_factor, seeds.background);
    let text = sources.corpus.as_ref().map(|corpus| TextSources {
        corpus,
        dataset_items: &items,
        background: &background,
        stacking_c: cfg.stacking_c,
    });
    let fs = FeatureSources {
        interactions: sources.interactions.as_ref(),
        orthologs: sources
            .orthologs
            .as_ref()
            .map(|m| (&sources.foreign_interactions, m)),
        text,
        expression: sources.expression.as_ref(),
        go: sources.go.as_ref(),
        kegg: sources.kegg.as_ref(),
        aracyc: sources.aracyc.as_ref(),
        tf: sources.tf.as_ref(),
        tfbs: sources.tfbs.as_ref(),
    };
    let matrix = assemble_and_normalize(&fs, &split.positives, &items).stage(Stage::Featurize)?;
    let mut blocks = Vec::new();
    matrix.write_block_map(&mut blocks).stage(Stage::Featurize)?;
    Ok((
        FeatureTable::from_matrix(&matrix),
        String::from_utf8(blocks).expect("block map is ASCII"),
    ))
}

/// Runs the weighting loop on train and dev rows (`P` as `+1`, `U` as `-1`)
/// and rescales every row by the resulting weights.
pub fn select_features(table: &FeatureTable, split: &BenchmarkSplit) -> Result<(FeatureTable, Vec<f64>)> {
    let ids: Vec<String> = split.train.iter().chain(&split.dev).cloned().collect();
    let x = table.rows_of(&ids)?;
    let labels: Vec<Label> = ids
        .iter()
        .map(|id| if split.is_labeled(id) { Label::Positive } else { Label::Negative })
        .collect();
    let sel = weston_select(&x, &labels, &WestonConfig::default()).stage(Stage::Select)?;
    if !sel.state.converged {
        log::warn!("feature selection stopped after {} iterations without converging", sel.state.iterations);
    }
    let z = sel.state.z;
    let rows = lpu_core::selection::apply_weights(&table.rows, &z);
    Ok((
        FeatureTable {
            items: table.items.clone(),
            columns: table.columns.clone(),
            rows,
        },
        z,
    ))
}

/// Split and features of one trial.
pub fn prepare_trial(cfg: &RunConfig, sources: Option<&Sources>) -> Result<PreparedTrial> {
    let seeds = RunSeeds::derive(cfg.seed);
    let (split, synthetic) = make_split(cfg, sources)?;
    let (features, blocks) = match synthetic {
        Some(t) => (t, None),
        None => {
            let sources = sources.expect("file splits come with sources");
            let (t, b) = featurize(cfg, sources, &split)?;
            (t, Some(b))
        }
    };
    let (features, weights) = if cfg.feature_selection {
        let (t, z) = select_features(&features, &split)?;
        (t, Some(z))
    } else {
        (features, None)
    };
    Ok(PreparedTrial {
        seeds,
        split,
        features,
        blocks,
        weights,
    })
}

fn pu_dataset(table: &FeatureTable, split: &BenchmarkSplit, ids: &[String]) -> Result<PuDataset> {
    let x = table.rows_of(ids)?;
    let s = ids
        .iter()
        .map(|id| if split.is_labeled(id) { Label::Positive } else { Label::Negative })
        .collect();
    PuDataset::new(x, s, ids.to_vec()).stage(Stage::Train)
}

fn kernels(cfg: &RunConfig, dim: usize) -> Vec<KernelSpec> {
    BiasedGrid {
        c: cfg.grid_c.clone(),
        j: cfg.grid_j.clone(),
        gamma: cfg.grid_gamma.clone(),
    }
    .kernels(cfg.kernel, dim)
}

fn kernel_label(k: &KernelSpec) -> String {
    match k {
        KernelSpec::Linear => "linear".into(),
        KernelSpec::Gaussian { gamma } => format!("gaussian:{gamma}"),
    }
}

/// Test-set scores of one learner plus what it chose along the way.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub scores: Vec<(String, f64)>,
    pub grid: Option<GridSearchReport>,
    /// `result.*` manifest entries.
    pub results: Vec<(String, String)>,
}

fn grid_results(report: &GridSearchReport) -> Vec<(String, String)> {
    let e = report.chosen_entry();
    vec![
        ("result.grid.c".into(), e.cell.c.to_string()),
        ("result.grid.j".into(), e.cell.j.to_string()),
        ("result.grid.kernel".into(), kernel_label(&e.cell.kernel)),
        ("result.grid.score".into(), e.score.to_string()),
    ]
}

/// Trains `method` on train/dev and scores the test items.
pub fn train_and_score(cfg: &RunConfig, method: Method, trial: &PreparedTrial) -> Result<TrainOutcome> {
    let split = &trial.split;
    let table = &trial.features;
    let train = pu_dataset(table, split, &split.train)?;
    let dev = pu_dataset(table, split, &split.dev)?;
    let test_x = table.rows_of(&split.test)?;
    let dim = train.dim();
    let ks = kernels(cfg, dim);
    let opts = SolverOptions::default();
    let mut results = Vec::new();
    let mut grid = None;
    let values = match method {
        Method::NaiveSvm => {
            let (model, report) = train_naive_svm(&train, &dev, &cfg.grid_c, &ks, &opts).stage(Stage::Train)?;
            results.extend(grid_results(&report));
            grid = Some(report);
            model.decision_values(&test_x)
        }
        Method::Bsvm => {
            let g = BiasedGrid {
                c: cfg.grid_c.clone(),
                j: cfg.grid_j.clone(),
                gamma: cfg.grid_gamma.clone(),
            };
            let (model, report) = train_biased_svm(&train, &dev, &g, cfg.kernel, &opts).stage(Stage::Train)?;
            results.extend(grid_results(&report));
            grid = Some(report);
            model.decision_values(&test_x)
        }
        Method::Wsvm => {
            let wcfg = WeightedSvmConfig {
                seed: trial.seeds.method,
                solver: opts,
                ..Default::default()
            };
            let (fit, report) = tune_weighted_svm(&train, &dev, &cfg.grid_c, &ks, &wcfg).stage(Stage::Train)?;
            results.extend(grid_results(&report));
            results.push(("result.label_frequency".into(), fit.label_frequency.to_string()));
            grid = Some(report);
            fit.decision_values(&test_x)
        }
        Method::Tsvm => {
            let full = train.union(&dev).stage(Stage::Train)?;
            let tcfg = TsvmConfig {
                c: cfg.tsvm_c,
                c_star: cfg.tsvm_c_star,
                kernel: ks[0],
                solver: opts,
                ..Default::default()
            };
            let fit = train_tsvm(&full, &test_x, &tcfg).stage(Stage::Train)?;
            results.push(("result.tsvm.switches".into(), fit.switches.len().to_string()));
            fit.decision_values(&test_x)
        }
        Method::LapSvm => {
            let full = train.union(&dev).stage(Stage::Train)?;
            let all: Vec<Vec<f64>> = full.x().iter().chain(&test_x).cloned().collect();
            let graph = AffinityGraph::knn(&all, cfg.knn).stage(Stage::Train)?;
            let lcfg = LapSvmConfig {
                gamma_a: cfg.lapsvm_gamma_a,
                gamma_i: cfg.lapsvm_gamma_i,
                kernel: ks[0],
                solver: opts,
            };
            let model = train_lapsvm(full.x(), full.s(), &test_x, &graph, &lcfg).stage(Stage::Train)?;
            model.decision_values(&test_x)
        }
        Method::Lp => {
            let full = train.union(&dev).stage(Stage::Train)?;
            let all: Vec<Vec<f64>> = full.x().iter().chain(&test_x).cloned().collect();
            let seeds: Vec<f64> = full
                .s()
                .iter()
                .map(|l| if l.is_positive() { 1.0 } else { 0.0 })
                .chain(std::iter::repeat_n(0.0, test_x.len()))
                .collect();
            let graph = AffinityGraph::knn(&all, cfg.knn).stage(Stage::Train)?;
            let lcfg = LabelPropagationConfig {
                alpha: cfg.lp_alpha,
                ..Default::default()
            };
            label_propagation(&graph, &seeds, &lcfg).map(|f| f[full.len()..].to_vec())
        }
    }
    .stage(Stage::Train)?;
    Ok(TrainOutcome {
        scores: split.test.iter().cloned().zip(values).collect(),
        grid,
        results,
    })
}

/// Ranking metrics of one run.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub curve: PrCurve,
    pub auc: f64,
    pub metrics: Vec<(String, String)>,
}

pub fn evaluate(ranked: &RankedList, truth: &Truth, top_fraction: f64) -> Result<Evaluation> {
    let curve = pr_curve(ranked, truth, top_fraction).stage(Stage::Evaluate)?;
    let auc = auc_at_fraction(&curve).stage(Stage::Evaluate)?;
    let prev = prevalence(ranked, truth).stage(Stage::Evaluate)?;
    let depth = prefix_depth(ranked.len(), top_fraction);
    let last = curve.points().last().expect("curve is non-empty");
    let metrics = vec![
        ("auc_top".to_string(), auc.to_string()),
        ("top_fraction".to_string(), top_fraction.to_string()),
        ("top_depth".to_string(), depth.to_string()),
        ("precision_at_depth".to_string(), last.precision.to_string()),
        ("recall_at_depth".to_string(), last.recall.to_string()),
        ("prevalence".to_string(), prev.to_string()),
        ("n_test".to_string(), ranked.len().to_string()),
    ];
    Ok(Evaluation { curve, auc, metrics })
}

pub fn ranked_to_tsv(ranked: &RankedList) -> String {
    let mut s = String::from("id\tscore\n");
    for (id, score) in ranked.items() {
        writeln!(s, "{id}\t{score}").expect("string write");
    }
    s
}

pub fn read_scores(path: &Path) -> Result<Vec<(String, f64)>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let n = i as u64 + 1;
        let (id, v) = line
            .split_once('\t')
            .ok_or_else(|| PipelineError::parse(path, n, "expected `id<TAB>score`"))?;
        let v: f64 = v
            .parse()
            .map_err(|e| PipelineError::parse(path, n, format!("score `{v}`: {e}")))?;
        out.push((id.to_string(), v));
    }
    Ok(out)
}

pub fn write_manifest(path: &Path, pairs: &[(String, String)]) -> Result<()> {
    let mut s = String::new();
    for (k, v) in pairs {
        writeln!(s, "{k} = {v}").expect("string write");
    }
    write_atomic(path, s.as_bytes())
}

pub fn grid_to_tsv(report: &GridSearchReport) -> String {
    let mut s = String::from("c\tj\tkernel\tscore\tconverged\tchosen\n");
    for (i, e) in report.entries.iter().enumerate() {
        writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}",
            e.cell.c,
            e.cell.j,
            kernel_label(&e.cell.kernel),
            e.score,
            e.converged,
            u8::from(i == report.chosen)
        )
        .expect("string write");
    }
    s
}

/// Everything one run produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub ranked: RankedList,
    pub evaluation: Evaluation,
    pub manifest: Vec<(String, String)>,
}

/// Writes the artifacts of a prepared trial that do not depend on a learner.
pub fn write_trial(trial: &PreparedTrial, dir: &Path) -> Result<()> {
    trial.split.write(&dir.join("split.tsv"))?;
    write_atomic(&dir.join("features.tsv"), trial.features.to_tsv().as_bytes())?;
    if let Some(b) = &trial.blocks {
        write_atomic(&dir.join("blocks.tsv"), b.as_bytes())?;
    }
    if let Some(z) = &trial.weights {
        let mut s = String::from("column\tweight\n");
        for (c, w) in trial.features.columns.iter().zip(z) {
            writeln!(s, "{c}\t{w}").expect("string write");
        }
        write_atomic(&dir.join("weights.tsv"), s.as_bytes())?;
    }
    Ok(())
}

/// Trains, ranks and evaluates `method` on a prepared trial, writing
/// `ranked.tsv`, `metrics.tsv`, `pr_curve.csv`, `grid.tsv` and
/// `manifest.txt` into `dir`.
pub fn run_method(cfg: &RunConfig, method: Method, trial: &PreparedTrial, dir: &Path) -> Result<ExperimentOutput> {
    let outcome = train_and_score(cfg, method, trial)?;
    let ranked = RankedList::new(outcome.scores).stage(Stage::Rank)?;
    let evaluation = evaluate(&ranked, &trial.split.test_truth(), cfg.top_fraction)?;

    let run_cfg = RunConfig {
        method,
        ..cfg.clone()
    };
    let mut manifest = run_cfg.to_pairs();
    manifest.extend(trial.seeds.to_pairs());
    let split = &trial.split;
    manifest.extend([
        ("derived.split.positives".to_string(), split.positives.len().to_string()),
        ("derived.split.unlabeled".to_string(), split.unlabeled.len().to_string()),
        ("derived.split.train".to_string(), split.train.len().to_string()),
        ("derived.split.dev".to_string(), split.dev.len().to_string()),
        ("derived.split.test".to_string(), split.test.len().to_string()),
        (
            "derived.split.hidden_positive_fraction".to_string(),
            hidden_positive_fraction(split).to_string(),
        ),
        ("derived.features".to_string(), trial.features.columns.len().to_string()),
    ]);
    manifest.extend(outcome.results.iter().cloned());
    manifest.push(("result.auc_top".into(), evaluation.auc.to_string()));

    write_atomic(&dir.join("ranked.tsv"), ranked_to_tsv(&ranked).as_bytes())?;
    write_with(&dir.join("metrics.tsv"), |w| write_metrics_tsv(&evaluation.metrics, w))?;
    write_with(&dir.join("pr_curve.csv"), |w| write_pr_curve_csv(&evaluation.curve, w))?;
    if let Some(report) = &outcome.grid {
        write_atomic(&dir.join("grid.tsv"), grid_to_tsv(report).as_bytes())?;
    }
    write_manifest(&dir.join("manifest.txt"), &manifest)?;
    Ok(ExperimentOutput {
        ranked,
        evaluation,
        manifest,
    })
}

/// Ingest, featurize, (select features,) train, rank and evaluate one
/// configuration; every artifact goes to `out_dir`.
pub fn run_experiment(cfg: &RunConfig, out_dir: &Path) -> Result<ExperimentOutput> {
    let sources = match cfg.source {
        DataSource::Files => Some(ingest_sources(cfg)?),
        DataSource::Synthetic => None,
    };
    let trial = prepare_trial(cfg, sources.as_ref())?;
    write_trial(&trial, out_dir)?;
    run_method(cfg, cfg.method, &trial, out_dir)
}

/// Per-method results over repeated trials.
#[derive(Debug, Clone)]
pub struct BenchmarkOutput {
    pub methods: Vec<Method>,
    /// `auc[m][t]`: top-fraction AUC of method `m` in trial `t`.
    pub auc: Vec<Vec<f64>>,
    pub rankings: Vec<Vec<RankedList>>,
    pub truths: Vec<Truth>,
}

impl BenchmarkOutput {
    pub fn mean_auc(&self, method: Method) -> Option<f64> {
        let m = self.methods.iter().position(|x| *x == method)?;
        let v = &self.auc[m];
        Some(v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn auc_of(&self, method: Method) -> Option<&[f64]> {
        let m = self.methods.iter().position(|x| *x == method)?;
        Some(&self.auc[m])
    }
}

/// Runs `cfg.trials` trials (config seed `seed + t`) of every method in
/// `cfg.methods` on shared splits. Writes per-run directories, `auc.tsv`
/// (one row per trial), `ttest.tsv` (every ordered method pair) and
/// `precision.tsv`.
pub fn run_benchmark(cfg: &RunConfig, out_dir: &Path) -> Result<BenchmarkOutput> {
    let sources = match cfg.source {
        DataSource::Files => Some(ingest_sources(cfg)?),
        DataSource::Synthetic => None,
    };
    let methods = cfg.methods.clone();
    let mut auc = vec![Vec::with_capacity(cfg.trials); methods.len()];
    let mut rankings = vec![Vec::with_capacity(cfg.trials); methods.len()];
    let mut truths = Vec::with_capacity(cfg.trials);
    for t in 0..cfg.trials {
        let tcfg = RunConfig {
            seed: cfg.seed + t as u64,
            ..cfg.clone()
        };
        let trial = prepare_trial(&tcfg, sources.as_ref())?;
        let tdir = out_dir.join(format!("trial_{t:02}"));
        write_trial(&trial, &tdir)?;
        for (m, &method) in methods.iter().enumerate() {
            let out = run_method(&tcfg, method, &trial, &tdir.join(method.name()))?;
            log::info!("trial {t} {method}: auc = {:.4}", out.evaluation.auc);
            auc[m].push(out.evaluation.auc);
            rankings[m].push(out.ranked);
        }
        truths.push(trial.split.test_truth());
    }

    let mut s = String::from("trial");
    for m in &methods {
        write!(s, "\t{m}").expect("string write");
    }
    s.push('\n');
    for t in 0..cfg.trials {
        write!(s, "{t}").expect("string write");
        for a in &auc {
            write!(s, "\t{}", a[t]).expect("string write");
        }
        s.push('\n');
    }
    write_atomic(&out_dir.join("auc.tsv"), s.as_bytes())?;

    let mut s = String::from("method_a\tmethod_b\tmean_a\tmean_b\tt\tdf\tp\n");
    if cfg.trials >= 2 {
        for (i, a) in methods.iter().enumerate() {
            for (j, b) in methods.iter().enumerate() {
                if i == j {
                    continue;
                }
                let test = one_tailed_paired_t(&auc[i], &auc[j]).stage(Stage::Evaluate)?;
                let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
                writeln!(
                    s,
                    "{a}\t{b}\t{}\t{}\t{}\t{}\t{}",
                    mean(&auc[i]),
                    mean(&auc[j]),
                    test.t,
                    test.df,
                    test.p
                )
                .expect("string write");
            }
        }
    }
    write_atomic(&out_dir.join("ttest.tsv"), s.as_bytes())?;

    let mut s = String::from("method\tredundant\tunique\n");
    for (m, method) in methods.iter().enumerate() {
        let n: Vec<usize> = rankings[m].iter().map(|r| cfg.precision_n.min(r.len())).collect();
        let red = precision_at_n(&rankings[m], &truths, &n, PrecisionMode::Redundant).stage(Stage::Evaluate)?;
        let uni = precision_at_n(&rankings[m], &truths, &n, PrecisionMode::Unique).stage(Stage::Evaluate)?;
        writeln!(s, "{method}\t{red}\t{uni}").expect("string write");
    }
    write_atomic(&out_dir.join("precision.tsv"), s.as_bytes())?;

    Ok(BenchmarkOutput {
        methods,
        auc,
        rankings,
        truths,
    })
}
