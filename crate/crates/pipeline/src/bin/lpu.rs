//! `lpu`: seed-set expansion from positive and unlabeled examples.
//!
//! Every verb reads a flat `key = value` config; any key may be overridden
//! by trailing `--key value` flags. Exit codes: 0 success, 1 invalid input
//! or configuration, 2 failure while running.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lpu_core::eval::{write_metrics_tsv, write_pr_curve_csv, RankedList};
use lpu_pipeline::benchmark::BenchmarkSplit;
use lpu_pipeline::config::{parse_overrides, DataSource, RunConfig};
use lpu_pipeline::error::{PipelineError, Result};
use lpu_pipeline::experiment::{
    evaluate, featurize, grid_to_tsv, make_split, prepare_trial, ranked_to_tsv, read_scores, run_benchmark,
    run_experiment, select_features, train_and_score, write_trial, FeatureTable, PreparedTrial,
};
use lpu_pipeline::fixtures::write_toy_fixtures;
use lpu_pipeline::ingest::{ingest_sources, SourceRecords};
use lpu_pipeline::io::{write_atomic, write_with};
use lpu_pipeline::synth::{generate_synthetic_sources, SynthWorldSpec};
use lpu_pipeline::RunSeeds;

#[derive(Parser)]
#[command(name = "lpu", version, about = "Rank candidate genes from a seed set with PU learners")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (flat key = value).
    #[arg(long)]
    config: PathBuf,
    /// Working directory for stage artifacts.
    #[arg(long, default_value = "lpu-out")]
    out: PathBuf,
    /// `--key value` overrides of config keys.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Verb {
    /// Parse the sources and write them back in canonical form.
    Ingest(Common),
    /// Build the benchmark split (P, U, train/dev, test).
    SelectUnlabeled(Common),
    /// Assemble features for the split in the working directory.
    Featurize(Common),
    /// Train the configured method and score the test items.
    Train(Common),
    /// Turn test scores into a ranked list.
    Rank(Common),
    /// Compute PR curve and metrics of the ranked list.
    Evaluate(Common),
    /// Run the full protocol over repeated trials and methods.
    Benchmark(Common),
    /// Run one configuration end to end.
    Run(Common),
    /// Write synthetic source files and a config.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 600)]
        genes: usize,
        #[arg(long, default_value_t = 150)]
        module: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the bundled toy genome instead.
        #[arg(long)]
        toy: bool,
    },
}

fn load(common: &Common) -> Result<RunConfig> {
    RunConfig::load(&common.config, &parse_overrides(&common.overrides)?)
}

fn need(path: &Path, verb: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(PipelineError::Config(format!(
            "{} not found; run `lpu {verb}` first",
            path.display()
        )))
    }
}

fn trial_from_dir(cfg: &RunConfig, dir: &Path) -> Result<PreparedTrial> {
    need(&dir.join("split.tsv"), "select-unlabeled")?;
    need(&dir.join("features.tsv"), "featurize")?;
    Ok(PreparedTrial {
        seeds: RunSeeds::derive(cfg.seed),
        split: BenchmarkSplit::read(&dir.join("split.tsv"))?,
        features: FeatureTable::read(&dir.join("features.tsv"))?,
        blocks: None,
        weights: None,
    })
}

fn run(verb: Verb) -> Result<()> {
    match verb {
        Verb::Ingest(c) => {
            let cfg = load(&c)?;
            let mut records = SourceRecords::read(&cfg)?;
            if let Some(y) = cfg.cutoff_year {
                records.apply_cutoff(y);
            }
            records.write_canonical(&c.out.join("canonical"))?;
            let mut s = String::from("source\trecords\n");
            for (k, n) in records.counts() {
                s.push_str(&format!("{k}\t{n}\n"));
            }
            write_atomic(&c.out.join("counts.tsv"), s.as_bytes())
        }
        Verb::SelectUnlabeled(c) => {
            let cfg = load(&c)?;
            let sources = match cfg.source {
                DataSource::Files => Some(ingest_sources(&cfg)?),
                DataSource::Synthetic => None,
            };
            let (split, _) = make_split(&cfg, sources.as_ref())?;
            split.write(&c.out.join("split.tsv"))
        }
        Verb::Featurize(c) => {
            let cfg = load(&c)?;
            let trial = match cfg.source {
                DataSource::Files => {
                    need(&c.out.join("split.tsv"), "select-unlabeled")?;
                    let split = BenchmarkSplit::read(&c.out.join("split.tsv"))?;
                    let sources = ingest_sources(&cfg)?;
                    let (features, blocks) = featurize(&cfg, &sources, &split)?;
                    let (features, weights) = if cfg.feature_selection {
                        let (t, z) = select_features(&features, &split)?;
                        (t, Some(z))
                    } else {
                        (features, None)
                    };
                    PreparedTrial {
                        seeds: RunSeeds::derive(cfg.seed),
                        split,
                        features,
                        blocks: Some(blocks),
                        weights,
                    }
                }
                DataSource::Synthetic => prepare_trial(&cfg, None)?,
            };
            write_trial(&trial, &c.out)
        }
        Verb::Train(c) => {
            let cfg = load(&c)?;
            let trial = trial_from_dir(&cfg, &c.out)?;
            let outcome = train_and_score(&cfg, cfg.method, &trial)?;
            let mut s = String::from("id\tscore\n");
            for (id, v) in &outcome.scores {
                s.push_str(&format!("{id}\t{v}\n"));
            }
            write_atomic(&c.out.join("scores.tsv"), s.as_bytes())?;
            if let Some(g) = &outcome.grid {
                write_atomic(&c.out.join("grid.tsv"), grid_to_tsv(g).as_bytes())?;
            }
            Ok(())
        }
        Verb::Rank(c) => {
            load(&c)?;
            need(&c.out.join("scores.tsv"), "train")?;
            let ranked = RankedList::new(read_scores(&c.out.join("scores.tsv"))?)
                .map_err(|e| PipelineError::Config(format!("scores.tsv: {e}")))?;
            write_atomic(&c.out.join("ranked.tsv"), ranked_to_tsv(&ranked).as_bytes())
        }
        Verb::Evaluate(c) => {
            let cfg = load(&c)?;
            need(&c.out.join("ranked.tsv"), "rank")?;
            need(&c.out.join("split.tsv"), "select-unlabeled")?;
            let split = BenchmarkSplit::read(&c.out.join("split.tsv"))?;
            let ranked = RankedList::new(read_scores(&c.out.join("ranked.tsv"))?)
                .map_err(|e| PipelineError::Config(format!("ranked.tsv: {e}")))?;
            let ev = evaluate(&ranked, &split.test_truth(), cfg.top_fraction)?;
            write_with(&c.out.join("metrics.tsv"), |w| write_metrics_tsv(&ev.metrics, w))?;
            write_with(&c.out.join("pr_curve.csv"), |w| write_pr_curve_csv(&ev.curve, w))?;
            println!("auc_top\t{}", ev.auc);
            Ok(())
        }
        Verb::Benchmark(c) => {
            let cfg = load(&c)?;
            let out = run_benchmark(&cfg, &c.out)?;
            for m in &out.methods {
                println!("{m}\t{:.4}", out.mean_auc(*m).expect("method was run"));
            }
            Ok(())
        }
        Verb::Run(c) => {
            let cfg = load(&c)?;
            let out = run_experiment(&cfg, &c.out)?;
            println!("auc_top\t{}", out.evaluation.auc);
            Ok(())
        }
        Verb::Synth {
            out,
            genes,
            module,
            seed,
            toy,
        } => {
            if toy {
                write_toy_fixtures(&out).map(|_| ())
            } else {
                let spec = SynthWorldSpec {
                    n_genes: genes,
                    module_size: module,
                    seed,
                    ..Default::default()
                };
                generate_synthetic_sources(&out, &spec)
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.verb) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
