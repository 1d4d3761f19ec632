use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Evidence codes accepted for Gene Ontology annotations.
pub const GO_EXPERIMENTAL_EVIDENCE: [&str; 3] = ["EXP", "IDA", "IPI"];

/// Item -> term memberships with genome-wide term counts `N(g)` and genome
/// size `N`. Serves GO, pathway and regulatory tables alike.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnnotationTable {
    genome_size: usize,
    terms: BTreeMap<String, BTreeSet<String>>,
    counts: BTreeMap<String, usize>,
}

impl AnnotationTable {
    /// Builds the table from `(item, term, evidence)` records, keeping only
    /// records whose evidence is in `allowed` when given. `genome_size`
    /// defaults to the number of annotated items and must not be smaller.
    pub fn from_records<'a, I>(records: I, allowed: Option<&[&str]>, genome_size: Option<usize>) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    {
        let mut terms: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (item, term, evidence) in records {
            if allowed.is_some_and(|a| !a.contains(&evidence)) {
                continue;
            }
            terms.entry(item.to_string()).or_default().insert(term.to_string());
        }
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for set in terms.values() {
            for t in set {
                *counts.entry(t.clone()).or_insert(0) += 1;
            }
        }
        let genome_size = genome_size.unwrap_or(terms.len());
        if let Some((t, &c)) = counts.iter().max_by_key(|(_, c)| **c) {
            if c > genome_size {
                return Err(Error::InvalidData(format!(
                    "term `{t}` annotates {c} items but the genome has only {genome_size}"
                )));
            }
        }
        Ok(Self {
            genome_size,
            terms,
            counts,
        })
    }

    pub fn genome_size(&self) -> usize {
        self.genome_size
    }

    pub fn terms_of(&self, item: &str) -> Option<&BTreeSet<String>> {
        self.terms.get(item)
    }

    /// `N(g)`: number of items annotated with `term`.
    pub fn term_count(&self, term: &str) -> usize {
        self.counts.get(term).copied().unwrap_or(0)
    }

    /// Every term of the table, ascending.
    pub fn universe(&self) -> impl Iterator<Item = &str> {
        self.counts.keys().map(String::as_str)
    }

    pub fn n_terms(&self) -> usize {
        self.counts.len()
    }

    pub fn contains(&self, item: &str) -> bool {
        self.terms.contains_key(item)
    }
}

/// `ln(N / min{N(g) : g shared by p and s})`, or 0 without a shared term.
pub fn shared_annotation_feature(table: &AnnotationTable, p: &str, s: &str) -> f64 {
    let (Some(a), Some(b)) = (table.terms_of(p), table.terms_of(s)) else {
        return 0.0;
    };
    a.intersection(b)
        .map(|g| table.term_count(g))
        .min()
        .map_or(0.0, |n| (table.genome_size() as f64 / n as f64).ln())
}

/// One indicator per term of `table`'s universe, 1 where `p` has the term.
pub fn binary_indicator(table: &AnnotationTable, p: &str) -> Vec<f64> {
    let own = table.terms_of(p);
    table
        .universe()
        .map(|t| f64::from(u8::from(own.is_some_and(|o| o.contains(t)))))
        .collect()
}

/// `(TF block, TFBS block)` indicator vectors of `p`.
pub fn regulatory_binary_features(
    tf_table: &AnnotationTable,
    tfbs_table: &AnnotationTable,
    p: &str,
) -> (Vec<f64>, Vec<f64>) {
    (binary_indicator(tf_table, p), binary_indicator(tfbs_table, p))
}
