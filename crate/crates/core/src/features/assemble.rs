use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::ops::Range;

use rayon::prelude::*;

use super::{
    binary_indicator, ppi_from_length, relation_score_feature, shared_annotation_feature,
    shared_document_feature, stacked_ir_feature, AnnotationTable, DocumentCorpus, ExpressionMatrix,
    InteractionGraph, OrthologMap,
};
use crate::error::{Error, Result};

/// Feature families in assembly order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureBlock {
    Ppi,
    Ortholog,
    Ir,
    Pid,
    Re,
    Co,
    Go,
    Kegg,
    AraCyc,
    Tf,
    Tfbs,
}

impl FeatureBlock {
    pub const ALL: [FeatureBlock; 11] = [
        FeatureBlock::Ppi,
        FeatureBlock::Ortholog,
        FeatureBlock::Ir,
        FeatureBlock::Pid,
        FeatureBlock::Re,
        FeatureBlock::Co,
        FeatureBlock::Go,
        FeatureBlock::Kegg,
        FeatureBlock::AraCyc,
        FeatureBlock::Tf,
        FeatureBlock::Tfbs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureBlock::Ppi => "ppi",
            FeatureBlock::Ortholog => "ol",
            FeatureBlock::Ir => "ir",
            FeatureBlock::Pid => "pid",
            FeatureBlock::Re => "re",
            FeatureBlock::Co => "co",
            FeatureBlock::Go => "go",
            FeatureBlock::Kegg => "kegg",
            FeatureBlock::AraCyc => "aracyc",
            FeatureBlock::Tf => "tf",
            FeatureBlock::Tfbs => "tfbs",
        }
    }
}

impl fmt::Display for FeatureBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Text evidence plus what the stacked IR feature needs.
#[derive(Debug, Clone, Copy)]
pub struct TextSources<'a> {
    pub corpus: &'a DocumentCorpus,
    /// Universe for document frequencies.
    pub dataset_items: &'a [String],
    /// Negative examples of the stacking classifier.
    pub background: &'a [String],
    pub stacking_c: f64,
}

/// Every source a feature family may draw from. A missing source yields a
/// zero-width block.
#[derive(Debug, Clone, Copy, Default)]
pub struct FeatureSources<'a> {
    pub interactions: Option<&'a InteractionGraph>,
    pub orthologs: Option<(&'a BTreeMap<String, InteractionGraph>, &'a OrthologMap)>,
    pub text: Option<TextSources<'a>>,
    pub expression: Option<&'a ExpressionMatrix>,
    pub go: Option<&'a AnnotationTable>,
    pub kegg: Option<&'a AnnotationTable>,
    pub aracyc: Option<&'a AnnotationTable>,
    pub tf: Option<&'a AnnotationTable>,
    pub tfbs: Option<&'a AnnotationTable>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockRange {
    pub block: FeatureBlock,
    pub columns: Range<usize>,
}

/// Normalized item x feature matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    items: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    blocks: Vec<BlockRange>,
}

impl FeatureMatrix {
    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn blocks(&self) -> &[BlockRange] {
        &self.blocks
    }

    pub fn block(&self, block: FeatureBlock) -> Range<usize> {
        self.blocks
            .iter()
            .find(|b| b.block == block)
            .map(|b| b.columns.clone())
            .expect("every block is listed")
    }

    /// Row of `item`, if present.
    pub fn row_of(&self, item: &str) -> Option<&[f64]> {
        self.items.iter().position(|i| i == item).map(|k| self.rows[k].as_slice())
    }

    /// Lookup from item id to row index.
    pub fn index(&self) -> HashMap<&str, usize> {
        self.items.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect()
    }

    /// `item` then one column per feature, tab-separated, with a header line.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "item")?;
        for c in &self.columns {
            write!(out, "\t{c}")?;
        }
        writeln!(out)?;
        for (item, row) in self.items.iter().zip(&self.rows) {
            write!(out, "{item}")?;
            for v in row {
                write!(out, "\t{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// `block<TAB>start<TAB>end` rows (end exclusive) with a header line.
    pub fn write_block_map<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "block\tstart\tend")?;
        for b in &self.blocks {
            writeln!(out, "{}\t{}\t{}", b.block, b.columns.start, b.columns.end)?;
        }
        Ok(())
    }
}

/// A raw column; `None` marks an entry excluded from normalization.
struct RawColumn {
    name: String,
    values: Vec<Option<f64>>,
    invert: bool,
}

impl RawColumn {
    fn dense(name: String, values: Vec<f64>) -> Self {
        Self {
            name,
            values: values.into_iter().map(Some).collect(),
            invert: false,
        }
    }

    /// Min-max scaling over the present entries; constant columns and
    /// absent entries become 0.
    fn normalize(&self) -> Vec<f64> {
        let present = self.values.iter().flatten();
        let (lo, hi) = present.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        self.values
            .iter()
            .map(|v| match v {
                Some(v) if hi > lo => {
                    let x = (v - lo) / (hi - lo);
                    if self.invert {
                        1.0 - x
                    } else {
                        x
                    }
                }
                _ => 0.0,
            })
            .collect()
    }
}

fn warn_missing(block: FeatureBlock, items: &[String], known: impl Fn(&str) -> bool) {
    let missing = items.iter().filter(|i| !known(i)).count();
    if missing > 0 {
        log::warn!("{block}: {missing} of {} items are absent from the source; their entries are 0", items.len());
    }
}

fn per_seed<F>(prefix: &str, seeds: &[String], f: F) -> Vec<RawColumn>
where
    F: Fn(&str) -> Vec<f64> + Sync,
{
    seeds
        .par_iter()
        .map(|s| RawColumn::dense(format!("{prefix}:{s}"), f(s)))
        .collect()
}

fn ppi_columns(graph: &InteractionGraph, seeds: &[String], items: &[String]) -> Vec<RawColumn> {
    warn_missing(FeatureBlock::Ppi, items, |i| graph.contains(i));
    per_seed("ppi", seeds, |s| {
        let dist = graph.distances_from(s);
        items
            .iter()
            .map(|p| {
                if p == s {
                    1.0
                } else {
                    ppi_from_length(dist.get(p.as_str()).copied())
                }
            })
            .collect()
    })
}

fn ortholog_columns(
    graphs: &BTreeMap<String, InteractionGraph>,
    map: &OrthologMap,
    seeds: &[String],
    items: &[String],
) -> Vec<RawColumn> {
    let mut out = Vec::new();
    for org in map.organisms() {
        let graph = graphs.get(org);
        if graph.is_none() {
            log::warn!("ol: no interaction graph for organism {org}; its columns are 0");
        }
        out.extend(per_seed(&format!("ol:{org}"), seeds, |s| {
            let Some(graph) = graph else {
                return vec![0.0; items.len()];
            };
            // distance from the nearest counterpart of s
            let mut nearest: HashMap<&str, usize> = HashMap::new();
            for fs in map.counterparts(org, s) {
                nearest.insert(fs, 0);
                for (node, d) in graph.distances_from(fs) {
                    let e = nearest.entry(node).or_insert(d);
                    *e = (*e).min(d);
                }
            }
            items
                .iter()
                .map(|p| {
                    map.counterparts(org, p)
                        .map(|fp| ppi_from_length(nearest.get(fp).copied()))
                        .fold(0.0, f64::max)
                })
                .collect()
        }));
    }
    out
}

fn annotation_columns(
    block: FeatureBlock,
    table: &AnnotationTable,
    seeds: &[String],
    items: &[String],
) -> Vec<RawColumn> {
    warn_missing(block, items, |i| table.contains(i));
    per_seed(block.name(), seeds, |s| {
        items.iter().map(|p| shared_annotation_feature(table, p, s)).collect()
    })
}

fn indicator_columns(block: FeatureBlock, table: &AnnotationTable, items: &[String]) -> Vec<RawColumn> {
    let rows: Vec<Vec<f64>> = items.iter().map(|p| binary_indicator(table, p)).collect();
    table
        .universe()
        .enumerate()
        .map(|(k, term)| {
            RawColumn::dense(format!("{}:{term}", block.name()), rows.iter().map(|r| r[k]).collect())
        })
        .collect()
}

fn block_columns(
    block: FeatureBlock,
    sources: &FeatureSources<'_>,
    seeds: &[String],
    items: &[String],
) -> Result<Vec<RawColumn>> {
    Ok(match block {
        FeatureBlock::Ppi => sources
            .interactions
            .map(|g| ppi_columns(g, seeds, items))
            .unwrap_or_default(),
        FeatureBlock::Ortholog => sources
            .orthologs
            .map(|(graphs, map)| ortholog_columns(graphs, map, seeds, items))
            .unwrap_or_default(),
        FeatureBlock::Ir => match sources.text {
            None => Vec::new(),
            Some(text) => {
                let ir = stacked_ir_feature(seeds, text.background, text.corpus, text.dataset_items, text.stacking_c)?;
                warn_missing(block, items, |i| ir.margins.contains_key(i));
                vec![RawColumn::dense(
                    "ir".to_string(),
                    items.iter().map(|p| ir.margins.get(p).copied().unwrap_or(ir.bias)).collect(),
                )]
            }
        },
        FeatureBlock::Pid => match sources.text {
            None => Vec::new(),
            Some(text) => {
                warn_missing(block, items, |i| text.corpus.has_item(i));
                per_seed("pid", seeds, |s| {
                    items
                        .iter()
                        .map(|p| shared_document_feature(text.corpus, p, s) as f64)
                        .collect()
                })
            }
        },
        FeatureBlock::Re => match sources.text {
            None => Vec::new(),
            Some(text) => per_seed("re", seeds, |s| {
                items.iter().map(|p| relation_score_feature(text.corpus, p, s)).collect()
            }),
        },
        FeatureBlock::Co => match sources.expression {
            None => Vec::new(),
            Some(expr) => {
                warn_missing(block, items, |i| expr.is_valid(i));
                let table = expr.rank_table(seeds);
                let per_item: Vec<Vec<Option<f64>>> =
                    items.par_iter().map(|p| table.mutual_ranks(p, seeds)).collect();
                seeds
                    .iter()
                    .enumerate()
                    .map(|(k, s)| RawColumn {
                        name: format!("co:{s}"),
                        values: per_item.iter().map(|r| r[k]).collect(),
                        invert: true,
                    })
                    .collect()
            }
        },
        FeatureBlock::Go => sources
            .go
            .map(|t| annotation_columns(block, t, seeds, items))
            .unwrap_or_default(),
        FeatureBlock::Kegg => sources
            .kegg
            .map(|t| annotation_columns(block, t, seeds, items))
            .unwrap_or_default(),
        FeatureBlock::AraCyc => sources
            .aracyc
            .map(|t| annotation_columns(block, t, seeds, items))
            .unwrap_or_default(),
        FeatureBlock::Tf => sources
            .tf
            .map(|t| indicator_columns(block, t, items))
            .unwrap_or_default(),
        FeatureBlock::Tfbs => sources
            .tfbs
            .map(|t| indicator_columns(block, t, items))
            .unwrap_or_default(),
    })
}

/// Builds every feature block for `items` against the ordered seed list,
/// concatenates them in [`FeatureBlock::ALL`] order and min-max normalizes
/// each column over `items`. Mutual-rank columns are inverted so that 1
/// means strongest co-expression; genes without a valid profile get 0 there.
pub fn assemble_and_normalize(
    sources: &FeatureSources<'_>,
    seeds: &[String],
    items: &[String],
) -> Result<FeatureMatrix> {
    if items.is_empty() {
        return Err(Error::EmptyInput("no items to featurize"));
    }
    let blocks: Vec<Vec<RawColumn>> = FeatureBlock::ALL
        .par_iter()
        .map(|&b| block_columns(b, sources, seeds, items))
        .collect::<Result<_>>()?;

    let mut ranges = Vec::with_capacity(blocks.len());
    let mut columns = Vec::new();
    let mut normalized: Vec<Vec<f64>> = Vec::new();
    for (block, cols) in FeatureBlock::ALL.iter().zip(blocks) {
        let start = columns.len();
        for c in cols {
            normalized.push(c.normalize());
            columns.push(c.name);
        }
        ranges.push(BlockRange {
            block: *block,
            columns: start..columns.len(),
        });
    }
    let rows = (0..items.len())
        .map(|i| normalized.iter().map(|col| col[i]).collect())
        .collect();
    Ok(FeatureMatrix {
        items: items.to_vec(),
        columns,
        rows,
        blocks: ranges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn sources_fixture() -> (InteractionGraph, ExpressionMatrix, AnnotationTable, AnnotationTable) {
        let mut g = InteractionGraph::new();
        g.add_edge("a", "b", "x", 2000).unwrap();
        g.add_edge("b", "c", "x", 2000).unwrap();
        g.add_edge("c", "d", "x", 2000).unwrap();
        let expr = ExpressionMatrix::new(vec![
            ("a".into(), vec![1.0, 2.0, 3.0, 4.0]),
            ("b".into(), vec![1.1, 2.3, 2.9, 4.2]),
            ("c".into(), vec![4.0, 1.0, 3.0, 2.0]),
            ("d".into(), vec![2.0, 2.0, 2.0, 2.0]),
            ("e".into(), vec![3.0, 1.0, 0.0, 2.5]),
        ])
        .unwrap();
        let go = AnnotationTable::from_records(
            [("a", "t1", "IDA"), ("b", "t1", "IDA"), ("c", "t2", "IDA")],
            None,
            Some(10),
        )
        .unwrap();
        let tf = AnnotationTable::from_records([("a", "tfA", ""), ("d", "tfB", "")], None, None).unwrap();
        (g, expr, go, tf)
    }

    #[test]
    fn shape_range_and_block_order() {
        let (g, expr, go, tf) = sources_fixture();
        let sources = FeatureSources {
            interactions: Some(&g),
            expression: Some(&expr),
            go: Some(&go),
            tf: Some(&tf),
            ..Default::default()
        };
        let seeds = ids(&["a", "b"]);
        let items = ids(&["a", "b", "c", "d", "e"]);
        let m = assemble_and_normalize(&sources, &seeds, &items).unwrap();
        assert_eq!(m.block(FeatureBlock::Ppi), 0..2);
        assert_eq!(m.block(FeatureBlock::Ortholog), 2..2);
        assert_eq!(m.block(FeatureBlock::Co), 2..4);
        assert_eq!(m.block(FeatureBlock::Go), 4..6);
        assert_eq!(m.block(FeatureBlock::Tf), 6..8);
        assert_eq!(m.columns()[0], "ppi:a");
        assert_eq!(m.columns()[7], "tf:tfB");
        for row in m.rows() {
            assert_eq!(row.len(), 8);
            assert!(row.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        // ppi:a raw = [1.0, 1.0, 0.9, 0.8, 0.0] -> min-max
        let col: Vec<f64> = m.rows().iter().map(|r| r[0]).collect();
        for (got, want) in col.iter().zip([1.0, 1.0, 0.9, 0.8, 0.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        // d has a flat profile: co entries are 0; a is its own best partner (rank 1 -> 1.0)
        let d = m.row_of("d").unwrap();
        assert_eq!(&d[2..4], &[0.0, 0.0]);
        assert_eq!(m.row_of("a").unwrap()[2], 1.0);
        assert_eq!(m.row_of("d").unwrap()[7], 1.0);
    }

    #[test]
    fn constant_columns_become_zero() {
        let col = RawColumn::dense("x".into(), vec![3.0, 3.0, 3.0]);
        assert_eq!(col.normalize(), vec![0.0; 3]);
        let inv = RawColumn {
            name: "co".into(),
            values: vec![Some(1.0), None, Some(5.0), Some(3.0)],
            invert: true,
        };
        assert_eq!(inv.normalize(), vec![1.0, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn output_is_deterministic() {
        let (g, expr, go, tf) = sources_fixture();
        let sources = FeatureSources {
            interactions: Some(&g),
            expression: Some(&expr),
            go: Some(&go),
            tf: Some(&tf),
            ..Default::default()
        };
        let seeds = ids(&["b", "a"]);
        let items = ids(&["e", "d", "c", "b", "a"]);
        let write = || {
            let m = assemble_and_normalize(&sources, &seeds, &items).unwrap();
            let mut buf = Vec::new();
            m.write_tsv(&mut buf).unwrap();
            m.write_block_map(&mut buf).unwrap();
            buf
        };
        assert_eq!(write(), write());
    }
}
