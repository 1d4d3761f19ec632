//! Comparison learners: naive SVM, transductive SVM, Laplacian SVM and label
//! propagation.

mod graph;
mod label_propagation;
mod lapsvm;
mod naive;
mod tsvm;

pub use graph::AffinityGraph;
pub use label_propagation::{
    label_propagation, LabelPropagationConfig, LabelPropagationModel,
};
pub use lapsvm::{train_lapsvm, LapSvmConfig, LapSvmModel};
pub use naive::train_naive_svm;
pub use tsvm::{train_tsvm, SwitchRecord, TsvmConfig, TsvmFit};
