//! Data ingestion, benchmark construction, synthetic data and experiment
//! orchestration around `lpu-core`, plus the `lpu` command line.
//!
//! A run goes ingest -> benchmark split -> featurize -> (feature selection)
//! -> train -> rank -> evaluate. Each stage writes its artifact atomically,
//! and the run manifest records every seed and chosen hyperparameter.

pub mod benchmark;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod ingest;
pub mod io;
pub mod synth;

pub use benchmark::{build_benchmark, BenchmarkSplit, RunSeeds};
pub use config::{DataSource, Method, RunConfig, UnlabeledSelection};
pub use error::{PipelineError, Result, Stage};
pub use experiment::{run_benchmark, run_experiment, BenchmarkOutput, ExperimentOutput};
pub use ingest::{ingest_sources, SourceRecords, Sources};
pub use synth::{generate_synthetic_benchmark, generate_synthetic_sources, SynthWorldSpec, SyntheticSpec};
