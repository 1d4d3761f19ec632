//! The bundled toy genome: 16 genes with every source type, small enough to
//! check feature values by hand.

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::io::write_atomic;

macro_rules! toy {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../fixtures/toy/", $name)))),*]
    };
}

const TOY: &[(&str, &str)] = toy![
    "config.txt",
    "seeds.tsv",
    "interactions.tsv",
    "interactions.yeast.tsv",
    "orthologs.tsv",
    "documents.tsv",
    "relations.tsv",
    "expression.tsv",
    "go.tsv",
    "kegg.tsv",
    "aracyc.tsv",
    "tf.tsv",
    "tfbs.tsv",
    "ontology.tsv",
];

/// Writes the toy files into `dir` and returns the path of its config.
pub fn write_toy_fixtures(dir: &Path) -> Result<PathBuf> {
    for (name, body) in TOY {
        write_atomic(&dir.join(name), body.as_bytes())?;
    }
    Ok(dir.join("config.txt"))
}

/// Directory of the toy files in the source tree.
pub fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("toy")
}
