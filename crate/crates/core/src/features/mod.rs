//! Feature families for item pairs `(p, s)` with `s` a seed, plus per-item
//! families, and their assembly into one normalized vector per item.
//!
//! Seed-indexed families contribute one column per seed (per organism for
//! orthologs). The assembled order is
//! `PPI | OL | IR | PID | RE | CO | GO | KEGG | AraCyc | TF | TFBS`.

mod annotation;
mod assemble;
mod expression;
mod graph;
mod text;

pub use annotation::{
    binary_indicator, regulatory_binary_features, shared_annotation_feature, AnnotationTable,
    GO_EXPERIMENTAL_EVIDENCE,
};
pub use assemble::{
    assemble_and_normalize, BlockRange, FeatureBlock, FeatureMatrix, FeatureSources, TextSources,
};
pub use expression::{mutual_rank_feature, ExpressionMatrix, RankTable};
pub use graph::{
    ortholog_projected_features, ppi_feature, ppi_from_length, InteractionGraph, OrthologMap,
};
pub use text::{
    relation_score_feature, sample_background, shared_document_feature, stacked_ir_feature,
    tfidf_features, tokenize, DocumentCorpus, StackedIr, TfIdf,
};
