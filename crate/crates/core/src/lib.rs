//! Learning with positive and unlabeled examples for seed-set expansion.
//!
//! The crate is organised bottom-up:
//!
//! - [`kernel`]: linear and Gaussian kernels, Gram matrices.
//! - [`svm`]: a per-example-cost SMO solver and Platt calibration. Every
//!   SVM-flavoured learner in the crate compiles down to this solver.
//! - [`lpu`]: the Biased SVM (Lee–Liu tuned) and the Elkan–Noto Weighted SVM.
//! - [`ssl`]: comparison learners (transductive SVM, Laplacian SVM, label
//!   propagation).
//! - [`features`]: per-pair and per-item feature families and their
//!   normalized assembly.
//! - [`selection`]: iterative multiplicative feature weighting.
//! - [`ontology`]: annotation-term DAG and unlabeled-example selection.
//! - [`eval`]: PR curves, AUC over a ranking prefix, Precision@N and a paired
//!   one-tailed t-test.

pub mod error;
pub mod eval;
pub mod features;
pub mod kernel;
pub mod lpu;
pub mod ontology;
pub mod selection;
pub mod ssl;
pub mod svm;

pub use error::{Error, Result};
pub use kernel::{KernelKind, KernelMatrix, KernelSpec};
pub use svm::{Label, PlattModel, SvmModel, TrainingProblem};
