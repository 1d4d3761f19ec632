//! One pass/fail line per acceptance criterion, each against an independent
//! oracle, with pinned tolerances and runtime limits.
//!
//! Lines go straight to the stderr handle so they show up without
//! `--nocapture`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use lpu_core::eval::{auc_at_fraction, one_tailed_paired_t, pr_curve, precision_at_n, PrecisionMode, RankedList, Truth};
use lpu_core::features::{mutual_rank_feature, ppi_feature, shared_annotation_feature, DocumentCorpus, TfIdf};
use lpu_core::kernel::{kernel_matrix, KernelSpec};
use lpu_core::lpu::{train_weighted_svm, PuDataset, WeightedSvmConfig};
use lpu_core::ontology::{
    gene_set_similarity, select_unlabeled_by_similarity, select_unlabeled_random, InverseDistance, OntologyDag,
};
use lpu_core::selection::{weston_select, WestonConfig};
use lpu_core::ssl::{label_propagation, AffinityGraph, LabelPropagationConfig};
use lpu_core::svm::{kkt_violation, solve_dual, train_svm, DecisionFunction, SolverOptions};
use lpu_core::{Label, TrainingProblem};
use lpu_pipeline::fixtures::write_toy_fixtures;
use lpu_pipeline::{
    generate_synthetic_benchmark, ingest_sources, run_benchmark, run_experiment, Method, RunConfig, SyntheticSpec,
};
use lpu_testkit::{qp, reference};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tempfile::TempDir;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn pairs(kv: &[(&str, &str)]) -> Vec<(String, String)> {
    kv.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn auc20(ids: &[String], scores: &[f64], truth: &Truth) -> f64 {
    let ranked = RankedList::from_scores(ids, scores).unwrap();
    auc_at_fraction(&pr_curve(&ranked, truth, 0.2).unwrap()).unwrap()
}

/// 100 random duals with n <= 8 against exhaustive active-set enumeration.
fn solver_matches_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tol = 1e-8;
    let mut worst_gap = 0.0f64;
    let mut worst_kkt = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=8);
        let dim = rng.random_range(1..=4);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let mut labels: Vec<Label> = (0..n)
            .map(|_| if rng.random_bool(0.5) { Label::Positive } else { Label::Negative })
            .collect();
        labels[0] = Label::Positive;
        labels[n - 1] = Label::Negative;
        let cost: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..10.0)).collect();
        let kernel = if rng.random_bool(0.5) {
            KernelSpec::Linear
        } else {
            KernelSpec::gaussian(rng.random_range(0.1..3.0)).unwrap()
        };
        let gram = kernel_matrix(&x, kernel).unwrap();
        let sol = solve_dual(&gram, &labels, &cost, &SolverOptions::default().with_tol(tol)).unwrap();
        if !sol.converged {
            return Err("SMO hit its iteration budget".into());
        }
        let y: Vec<f64> = labels.iter().map(|l| l.sign()).collect();
        let q: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| y[i] * y[j] * gram.get(i, j)).collect())
            .collect();
        let oracle = qp::reference_dual_optimum(&q, &y, &cost);
        worst_gap = worst_gap.max((qp::dual_objective(&q, &sol.alpha) - oracle).abs());
        worst_kkt = worst_kkt.max(kkt_violation(&gram, &labels, &cost, &sol.alpha, sol.bias));
    }
    check(
        worst_gap <= 1e-6 && worst_kkt <= tol,
        format!("max |objective gap| = {worst_gap:.2e} (<= 1e-6), max KKT violation = {worst_kkt:.2e} (<= {tol:.0e})"),
    )
}

fn mean_label_frequency(c: f64, separation: f64) -> f64 {
    let estimates: Vec<f64> = (0..30)
        .map(|seed| {
            let bench = generate_synthetic_benchmark(&SyntheticSpec {
                n_pos: 500,
                label_frequency: c,
                separation,
                seed,
                ..SyntheticSpec::default()
            })
            .unwrap();
            let split = &bench.split;
            let ids: Vec<String> = split.positives.iter().chain(&split.unlabeled).cloned().collect();
            let s: Vec<Label> = ids
                .iter()
                .map(|id| if split.is_labeled(id) { Label::Positive } else { Label::Negative })
                .collect();
            let data = PuDataset::new(bench.rows(&ids), s, ids).unwrap();
            let cfg = WeightedSvmConfig {
                seed,
                ..WeightedSvmConfig::default()
            };
            train_weighted_svm(&data, &cfg).unwrap().label_frequency
        })
        .collect();
    mean(&estimates)
}

/// Mean Elkan–Noto estimate over 30 generator seeds for each true c.
///
/// Judged at 6 sigma. The 3 sigma means are reported alongside: there the
/// sigmoid-calibrated estimate sits 0.06 to 0.13 below c, because negatives
/// in the class overlap keep part of the calibrated mass.
fn label_frequency_is_recovered() -> Outcome {
    let mut judged = Vec::new();
    let mut reported = Vec::new();
    let mut ok = true;
    for c in [0.3, 0.5, 0.8] {
        let m = mean_label_frequency(c, 6.0);
        ok &= (m - c).abs() <= 0.05;
        judged.push(format!("c={c}: {m:.3}"));
        reported.push(format!("c={c}: {:.3}", mean_label_frequency(c, 3.0)));
    }
    check(
        ok,
        format!(
            "separation 6: {} (tolerance 0.05); separation 3, not judged: {}",
            judged.join(", "),
            reported.join(", ")
        ),
    )
}

/// WSVM and BSVM each beat the naive SVM over 30 synthetic trials.
fn pu_methods_beat_naive_svm() -> Outcome {
    let cfg = RunConfig::from_pairs(
        &pairs(&[
            ("source", "synthetic"),
            ("methods", "naive-svm,bsvm,wsvm"),
            ("trials", "30"),
            ("separation", "2"),
            ("label_frequency", "0.5"),
            ("dim", "20"),
            ("n_unl", "720"),
            ("grid_c", "0.1,1"),
            ("grid_j", "1,2,5,10"),
        ]),
        Path::new("."),
    )
    .unwrap();
    let out_dir = TempDir::new().unwrap();
    let out = run_benchmark(&cfg, out_dir.path()).unwrap();
    let naive = out.auc_of(Method::NaiveSvm).unwrap();
    let mut ok = true;
    let mut lines = vec![format!("naive {:.4}", mean(naive))];
    for m in [Method::Wsvm, Method::Bsvm] {
        let auc = out.auc_of(m).unwrap();
        let t = one_tailed_paired_t(auc, naive).unwrap();
        ok &= mean(auc) > mean(naive) && t.p < 0.05;
        lines.push(format!("{m} {:.4} (p = {:.2e})", mean(auc), t.p));
    }
    check(ok, format!("mean AUC20: {} (p < 0.05)", lines.join(", ")))
}

/// Iterative label propagation against a dense LU solve of the fixed point.
fn label_propagation_matches_closed_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..30 {
        let n = 10;
        let mut w = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(0.35) {
                    let v = rng.random_range(0.1..1.0);
                    w[i][j] = v;
                    w[j][i] = v;
                }
            }
        }
        let y: Vec<f64> = (0..n).map(|i| if i < 3 { 1.0 } else { 0.0 }).collect();
        let cfg = LabelPropagationConfig::default();
        let graph = AffinityGraph::from_dense(&w).unwrap();
        let iterative = label_propagation(&graph, &y, &cfg).unwrap();
        let exact = reference::label_propagation_closed_form(&w, &y, cfg.alpha);
        for (a, b) in iterative.iter().zip(&exact) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 1e-8, format!("max |iterative - closed form| = {worst:.2e} (<= 1e-8)"))
}

fn close(failures: &mut Vec<String>, what: &str, got: f64, want: f64) {
    if (got - want).abs() > 1e-12 {
        failures.push(format!("{what}: {got} vs {want}"));
    }
}

fn tsv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect()
}

/// Feature formulas on the toy genome against oracles built from the raw files.
fn toy_features_match_oracles() -> Outcome {
    let dir = TempDir::new().unwrap();
    let cfg = RunConfig::load(&write_toy_fixtures(dir.path()).unwrap(), &[]).unwrap();
    let sources = ingest_sources(&cfg).unwrap();
    let genes: Vec<String> = (1..=16).map(|i| format!("g{i:02}")).collect();
    let index: HashMap<&str, usize> = genes.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
    let mut failures = Vec::new();

    // ppi: 1.1 - 0.1 * hops, floored at 0
    let graph = sources.interactions.as_ref().unwrap();
    let edges: Vec<(usize, usize)> = tsv_rows(&dir.path().join("interactions.tsv"))
        .iter()
        .map(|r| (index[r[0].as_str()], index[r[1].as_str()]))
        .collect();
    for p in &genes {
        for s in &genes {
            let want = reference::hop_distance(16, &edges, index[p.as_str()], index[s.as_str()])
                .map_or(0.0, |d| (1.1 - 0.1 * d as f64).clamp(0.0, 1.0));
            close(&mut failures, &format!("ppi({p},{s})"), ppi_feature(graph, p, s), want);
        }
    }
    close(&mut failures, "ppi(g01,g04) by hand", ppi_feature(graph, "g01", "g04"), 0.8);
    close(&mut failures, "ppi(g01,g12) by hand", ppi_feature(graph, "g01", "g12"), 0.0);

    // mutual rank over genes with a non-constant profile
    let expr = sources.expression.as_ref().unwrap();
    let profiles: Vec<(String, Vec<f64>)> = tsv_rows(&dir.path().join("expression.tsv"))
        .into_iter()
        .map(|r| (r[0].clone(), r[1..].iter().map(|v| v.parse().unwrap()).collect::<Vec<f64>>()))
        .filter(|(_, v)| v.iter().any(|x| *x != v[0]))
        .collect();
    for (p, _) in &profiles {
        for (s, _) in &profiles {
            let want = if p == s {
                1.0
            } else {
                ((reference::correlation_rank(&profiles, p, s) * reference::correlation_rank(&profiles, s, p)) as f64)
                    .sqrt()
            };
            match mutual_rank_feature(expr, p, s) {
                Some(got) => close(&mut failures, &format!("mr({p},{s})"), got, want),
                None => failures.push(format!("mr({p},{s}) missing")),
            }
        }
    }

    // shared annotation: ln(N / min N(g)) over experimentally supported GO terms
    let allowed = ["EXP", "IDA", "IPI"];
    let mut go_terms: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in tsv_rows(&dir.path().join("go.tsv")) {
        if allowed.contains(&r[2].as_str()) {
            go_terms.entry(r[0].clone()).or_default().insert(r[1].clone());
        }
    }
    let count = |t: &str| go_terms.values().filter(|s| s.contains(t)).count();
    let go = sources.go.as_ref().unwrap();
    for p in &genes {
        for s in &genes {
            let empty = BTreeSet::new();
            let (a, b) = (go_terms.get(p).unwrap_or(&empty), go_terms.get(s).unwrap_or(&empty));
            let want = a
                .intersection(b)
                .map(|t| count(t))
                .min()
                .map_or(0.0, |n| (16.0 / n as f64).ln());
            close(&mut failures, &format!("go({p},{s})"), shared_annotation_feature(go, p, s), want);
        }
    }
    close(&mut failures, "go(g01,g07) by hand", shared_annotation_feature(go, "g01", "g07"), (16.0f64 / 3.0).ln());

    // idf over the 16-gene universe
    let mut corpus = DocumentCorpus::new();
    let mut words_of: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for r in tsv_rows(&dir.path().join("documents.tsv")) {
        corpus.add_document(&r[0], &r[1], &r[3]);
        words_of
            .entry(r[0].clone())
            .or_default()
            .extend(r[3].split_whitespace().map(str::to_string));
    }
    let tfidf = TfIdf::fit(&corpus, &genes).unwrap();
    let vocab: BTreeSet<&String> = words_of.values().flatten().collect();
    for w in vocab {
        let df = words_of.values().filter(|s| s.contains(w)).count();
        match tfidf.idf(w) {
            Some(got) => close(&mut failures, &format!("idf({w})"), got, (16.0 / df as f64).ln()),
            None => failures.push(format!("idf({w}) missing")),
        }
    }
    close(&mut failures, "idf(chloroplast) by hand", tfidf.idf("chloroplast").unwrap_or(f64::NAN), 4.0f64.ln());

    // gene-set similarity: sum of 1 / (1 + undirected term distance)
    let dag = sources.ontology.as_ref().unwrap();
    let onto = tsv_rows(&dir.path().join("ontology.tsv"));
    let term_ix: HashMap<&str, usize> = onto.iter().enumerate().map(|(i, r)| (r[0].as_str(), i)).collect();
    let term_edges: Vec<(usize, usize)> = onto
        .iter()
        .flat_map(|r| {
            let child = term_ix[r[0].as_str()];
            r.get(1)
                .into_iter()
                .flat_map(|ps| ps.split(';'))
                .filter(|p| !p.is_empty())
                .map(|p| (child, term_ix[p]))
                .collect::<Vec<_>>()
        })
        .collect();
    let seeds: Vec<String> = tsv_rows(&dir.path().join("seeds.tsv")).into_iter().map(|r| r[0].clone()).collect();
    let seed_terms: BTreeSet<&String> = seeds.iter().filter_map(|s| go_terms.get(s)).flatten().collect();
    for g in &genes {
        let want: f64 = go_terms
            .get(g)
            .into_iter()
            .flatten()
            .flat_map(|ti| {
                seed_terms.iter().map(|tj| {
                    reference::hop_distance(onto.len(), &term_edges, term_ix[ti.as_str()], term_ix[tj.as_str()])
                        .map_or(0.0, |d| 1.0 / (1.0 + d as f64))
                })
            })
            .sum();
        close(&mut failures, &format!("sim({g},P)"), gene_set_similarity(dag, &InverseDistance, g, &seeds), want);
    }

    check(
        failures.is_empty(),
        if failures.is_empty() {
            "ppi, mutual rank, shared annotation, idf and gene-set similarity agree to 1e-12".into()
        } else {
            failures.join("; ")
        },
    )
}

fn planted(rng: &mut ChaCha8Rng, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<Label>) {
    let noise = Normal::new(0.0, 1.0).unwrap();
    let labels: Vec<Label> = (0..n)
        .map(|i| if i % 2 == 0 { Label::Positive } else { Label::Negative })
        .collect();
    let x = labels
        .iter()
        .map(|l| {
            let mut row: Vec<f64> = (0..d).map(|_| noise.sample(rng)).collect();
            row[0] = l.sign() * rng.random_range(0.5..1.5);
            row
        })
        .collect();
    (x, labels)
}

/// Weston selection keeps the planted feature and zeroes the nine noise ones.
fn feature_selection_finds_the_signal() -> Outcome {
    let mut hits = 0;
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + seed);
        let (x, labels) = planted(&mut rng, 60, 10);
        let z = weston_select(&x, &labels, &WestonConfig::default()).unwrap().state.z;
        if z[0] > 0.1 && z[1..].iter().all(|v| *v < 1e-3) {
            hits += 1;
        }
    }
    check(hits >= 27, format!("{hits}/30 seeds keep the signal above 0.1 with all noise below 1e-3 (>= 27)"))
}

/// Toy world for the unlabeled-selection check: hidden positives draw their
/// ontology terms mostly from one branch, negatives from the others.
struct TermWorld {
    dag: OntologyDag,
    genes: Vec<String>,
    positive: Vec<bool>,
    x: Vec<Vec<f64>>,
}

fn term_world(seed: u64) -> TermWorld {
    let (branches, children, leaves) = (6, 5, 4);
    let mut records = vec![("root".to_string(), Vec::new())];
    for b in 0..branches {
        records.push((format!("b{b}"), vec!["root".to_string()]));
        for c in 0..children {
            records.push((format!("b{b}c{c}"), vec![format!("b{b}")]));
            for l in 0..leaves {
                records.push((format!("b{b}c{c}l{l}"), vec![format!("b{b}c{c}")]));
            }
        }
    }
    let mut dag = OntologyDag::new(&records).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, n_pos, dim, separation) = (1000, 250, 10, 1.5);
    let shift = separation / 2.0 / (dim as f64).sqrt();
    let noise = Normal::new(0.0, 1.0).unwrap();
    let genes: Vec<String> = (0..n).map(|i| format!("t{i:04}")).collect();
    let positive: Vec<bool> = (0..n).map(|i| i < n_pos).collect();
    let mut x = Vec::with_capacity(n);
    for (g, &pos) in genes.iter().zip(&positive) {
        for _ in 0..2 {
            let b = if pos && rng.random_bool(0.9) {
                0
            } else {
                rng.random_range(1..branches)
            };
            let term = format!("b{b}c{}l{}", rng.random_range(0..children), rng.random_range(0..leaves));
            dag.annotate(g, &term).unwrap();
        }
        let sign = if pos { 1.0 } else { -1.0 };
        x.push((0..dim).map(|_| sign * shift + noise.sample(&mut rng)).collect());
    }
    TermWorld { dag, genes, positive, x }
}

/// AUC20 of a linear SVM trained on `P` against `U`, scored on the test genes.
fn selection_trial(world: &TermWorld, p: &[usize], u: &[String], test: &[usize]) -> f64 {
    let index: HashMap<&str, usize> = world.genes.iter().enumerate().map(|(i, g)| (g.as_str(), i)).collect();
    let mut x = Vec::new();
    let mut labels = Vec::new();
    for &i in p {
        x.push(world.x[i].clone());
        labels.push(Label::Positive);
    }
    for g in u {
        x.push(world.x[index[g.as_str()]].clone());
        labels.push(Label::Negative);
    }
    let problem = TrainingProblem::with_uniform_cost(x, labels, 1.0, KernelSpec::Linear).unwrap();
    let model = train_svm(&problem, &SolverOptions::default()).unwrap();
    let ids: Vec<String> = test.iter().map(|&i| world.genes[i].clone()).collect();
    let rows: Vec<Vec<f64>> = test.iter().map(|&i| world.x[i].clone()).collect();
    let scores = model.decision_values(&rows).unwrap();
    let truth: Truth = test.iter().map(|&i| (world.genes[i].clone(), world.positive[i])).collect();
    auc20(&ids, &scores, &truth)
}

/// Similarity-based unlabeled selection against uniform sampling.
fn similarity_selection_beats_random() -> Outcome {
    let world = term_world(7);
    let n_pos = world.positive.iter().filter(|p| **p).count();
    let n = world.genes.len();
    let mut sim_auc = Vec::new();
    let mut rnd_auc = Vec::new();
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let pos: Vec<usize> = sample(&mut rng, n_pos, n_pos).into_vec();
        let neg: Vec<usize> = sample(&mut rng, n - n_pos, n - n_pos).into_iter().map(|i| i + n_pos).collect();
        let p = &pos[..30];
        let test: Vec<usize> = pos[30..130].iter().chain(&neg[..140]).copied().collect();
        let pool: Vec<String> = pos[130..].iter().chain(&neg[140..]).map(|&i| world.genes[i].clone()).collect();
        let seeds: Vec<String> = p.iter().map(|&i| world.genes[i].clone()).collect();
        let by_sim = select_unlabeled_by_similarity(&world.dag, &InverseDistance, &pool, &seeds, 300).unwrap();
        let random = select_unlabeled_random(&pool, 300, rng.random()).unwrap();
        sim_auc.push(selection_trial(&world, p, &by_sim, &test));
        rnd_auc.push(selection_trial(&world, p, &random, &test));
    }
    let t = one_tailed_paired_t(&sim_auc, &rnd_auc).unwrap();
    check(
        mean(&sim_auc) >= mean(&rnd_auc) && t.p < 0.1,
        format!(
            "mean AUC20 similarity {:.4} vs random {:.4}, one-sided p = {:.2e} (< 0.1)",
            mean(&sim_auc),
            mean(&rnd_auc),
            t.p
        ),
    )
}

/// 30 trials of N = 23 over 226 positive and 197 negative ids, laid out so
/// that positives repeat to 480 extractions and negatives to 210.
fn precision_counts_reproduce_table_entries() -> Outcome {
    let positives: Vec<String> = (0..226).map(|i| format!("p{i:03}")).collect();
    let negatives: Vec<String> = (0..197).map(|i| format!("n{i:03}")).collect();
    let stream: Vec<&String> = positives
        .iter()
        .cycle()
        .take(480)
        .chain(negatives.iter().cycle().take(210))
        .collect();
    let mut truth: Truth = positives.iter().map(|p| (p.clone(), true)).collect();
    truth.extend(negatives.iter().map(|n| (n.clone(), false)));
    truth.insert("tail".into(), true);
    let trials: Vec<RankedList> = stream
        .chunks(23)
        .map(|chunk| {
            let mut items: Vec<(String, f64)> = chunk
                .iter()
                .enumerate()
                .map(|(k, id)| ((*id).clone(), 100.0 - k as f64))
                .collect();
            // below the cutoff, so never counted
            items.push(("tail".into(), -1.0));
            RankedList::new(items).unwrap()
        })
        .collect();
    let truths = vec![truth; trials.len()];
    let n = vec![23; trials.len()];
    let red = precision_at_n(&trials, &truths, &n, PrecisionMode::Redundant).unwrap().to_string();
    let uni = precision_at_n(&trials, &truths, &n, PrecisionMode::Unique).unwrap().to_string();
    check(
        red == "69.6% (480/690)" && uni == "53.4% (226/423)",
        format!("redundant \"{red}\", unique \"{uni}\""),
    )
}

/// Replaying a manifest reproduces ranked list and metrics byte for byte.
fn manifest_replay_is_byte_identical() -> Outcome {
    let dir = TempDir::new().unwrap();
    let config = write_toy_fixtures(dir.path()).unwrap();
    let mut mismatches = Vec::new();
    for (label, cfg) in [
        ("toy wsvm", RunConfig::load(&config, &pairs(&[("method", "wsvm")])).unwrap()),
        (
            "synthetic bsvm",
            RunConfig::from_pairs(
                &pairs(&[("source", "synthetic"), ("method", "bsvm"), ("grid_c", "0.1,1"), ("seed", "3")]),
                Path::new("."),
            )
            .unwrap(),
        ),
    ] {
        let first = TempDir::new().unwrap();
        run_experiment(&cfg, first.path()).unwrap();
        let manifest = first.path().join("manifest.txt");
        let runs: Vec<TempDir> = (0..2)
            .map(|_| {
                let out = TempDir::new().unwrap();
                run_experiment(&RunConfig::load(&manifest, &[]).unwrap(), out.path()).unwrap();
                out
            })
            .collect();
        for f in ["ranked.tsv", "metrics.tsv"] {
            let want = fs::read(first.path().join(f)).unwrap();
            for r in &runs {
                if fs::read(r.path().join(f)).unwrap() != want {
                    mismatches.push(format!("{label} {f}"));
                }
            }
        }
    }
    check(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            "two manifest replays of toy wsvm and synthetic bsvm match ranked.tsv and metrics.tsv".into()
        } else {
            format!("differs: {}", mismatches.join(", "))
        },
    )
}

#[test]
fn acceptance() {
    let criteria: [(u8, &str, u64, fn() -> Outcome); 9] = [
        (1, "solver vs brute-force dual", 30, solver_matches_brute_force),
        (2, "label-frequency estimate", 120, label_frequency_is_recovered),
        (3, "method ordering", 600, pu_methods_beat_naive_svm),
        (4, "label propagation", 5, label_propagation_matches_closed_form),
        (5, "toy feature oracles", 10, toy_features_match_oracles),
        (6, "feature selection", 60, feature_selection_finds_the_signal),
        (7, "unlabeled selection", 300, similarity_selection_beats_random),
        (8, "precision counts", 5, precision_counts_reproduce_table_entries),
        (9, "determinism", 120, manifest_replay_is_byte_identical),
    ];
    let mut failed = Vec::new();
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (pass, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        let line = format!(
            "criterion {id} {}: {name}: {detail} [{:.1}s, limit {limit}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        writeln!(std::io::stderr(), "{line}").unwrap();
        if !pass {
            failed.push(line);
        }
    }
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
