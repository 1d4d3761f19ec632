//! TSV source files: parsing, year cutoff, cross-reference checks and the
//! canonical re-emitted form.
//!
//! Every file has a one-line header. Canonical files hold the surviving
//! records deduplicated and sorted, interaction endpoints in ascending order
//! and floats in shortest round-trip notation, so ingesting a canonical
//! directory and emitting it again reproduces it byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use lpu_core::features::{
    AnnotationTable, DocumentCorpus, ExpressionMatrix, InteractionGraph, OrthologMap,
};
use lpu_core::ontology::OntologyDag;

use crate::config::RunConfig;
use crate::error::{PipelineError, Result, Stage, StageExt};
use crate::io::write_atomic;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Interaction {
    pub a: String,
    pub b: String,
    pub source: String,
    pub year: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Annotation {
    pub gene: String,
    pub term: String,
    pub evidence: String,
    pub year: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Document {
    pub gene: String,
    pub doc_id: String,
    pub year: i32,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct Relation {
    pub a: String,
    pub b: String,
    pub doc_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Ortholog {
    pub organism: String,
    pub foreign_id: String,
    pub target_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OntologyTerm {
    pub term: String,
    pub parents: Vec<String>,
}

/// Parsed records of every configured source. `None` marks a source that
/// was not configured.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceRecords {
    pub seeds: Vec<String>,
    pub interactions: Option<Vec<Interaction>>,
    pub foreign_interactions: BTreeMap<String, Vec<Interaction>>,
    pub orthologs: Option<Vec<Ortholog>>,
    pub documents: Option<Vec<Document>>,
    pub relations: Option<Vec<Relation>>,
    pub expression: Option<Vec<(String, Vec<f64>)>>,
    pub go: Option<Vec<Annotation>>,
    pub kegg: Option<Vec<Annotation>>,
    pub aracyc: Option<Vec<Annotation>>,
    pub tf: Option<Vec<Annotation>>,
    pub tfbs: Option<Vec<Annotation>>,
    pub ontology: Option<Vec<OntologyTerm>>,
}

type Rows = Vec<(u64, csv::StringRecord)>;

fn read_rows(path: &Path, header: &[&str], open_ended: bool) -> Result<Rows> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let found = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    if found.is_empty() {
        // a zero-byte file is an empty source, not a malformed one
        log::warn!("{}: empty file, no records", path.display());
        return Ok(Vec::new());
    }
    let width = found.len();
    let header_ok = if open_ended {
        width > header.len() && found.iter().zip(header).all(|(a, b)| a == *b)
    } else {
        found.iter().eq(header.iter().copied())
    };
    if !header_ok {
        let want = if open_ended {
            format!("{}\tv1..vK", header.join("\t"))
        } else {
            header.join("\t")
        };
        return Err(PipelineError::parse(path, 1, format!("expected header `{want}`")));
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(PipelineError::parse(
                path,
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        rows.push((line, rec));
    }
    if rows.is_empty() {
        log::warn!("{}: no records", path.display());
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> PipelineError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => PipelineError::io(path, io),
        other => PipelineError::parse(path, line, format!("{other:?}")),
    }
}

fn field<T: std::str::FromStr>(path: &Path, line: u64, rec: &csv::StringRecord, i: usize, name: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = rec.get(i).unwrap_or("");
    raw.parse::<T>()
        .map_err(|e| PipelineError::parse(path, line, format!("{name} `{raw}`: {e}")))
}

fn id(path: &Path, line: u64, rec: &csv::StringRecord, i: usize, name: &str) -> Result<String> {
    let raw = rec.get(i).unwrap_or("").trim();
    if raw.is_empty() {
        return Err(PipelineError::parse(path, line, format!("{name} is empty")));
    }
    Ok(raw.to_string())
}

pub fn read_seeds(path: &Path) -> Result<Vec<String>> {
    let rows = read_rows(path, &["gene_id"], false)?;
    let set: BTreeSet<String> = rows
        .iter()
        .map(|(line, rec)| id(path, *line, rec, 0, "gene_id"))
        .collect::<Result<_>>()?;
    Ok(set.into_iter().collect())
}

pub fn read_interactions(path: &Path) -> Result<Vec<Interaction>> {
    read_rows(path, &["id_a", "id_b", "source", "year"], false)?
        .iter()
        .map(|(line, rec)| {
            let a = id(path, *line, rec, 0, "id_a")?;
            let b = id(path, *line, rec, 1, "id_b")?;
            if a == b {
                return Err(PipelineError::parse(path, *line, format!("self-interaction of `{a}`")));
            }
            Ok(Interaction {
                a,
                b,
                source: id(path, *line, rec, 2, "source")?,
                year: field(path, *line, rec, 3, "year")?,
            })
        })
        .collect()
}

pub fn read_annotations(path: &Path) -> Result<Vec<Annotation>> {
    read_rows(path, &["gene_id", "term_id", "evidence", "year"], false)?
        .iter()
        .map(|(line, rec)| {
            Ok(Annotation {
                gene: id(path, *line, rec, 0, "gene_id")?,
                term: id(path, *line, rec, 1, "term_id")?,
                evidence: rec.get(2).unwrap_or("").trim().to_string(),
                year: field(path, *line, rec, 3, "year")?,
            })
        })
        .collect()
}

pub fn read_documents(path: &Path) -> Result<Vec<Document>> {
    read_rows(path, &["gene_id", "doc_id", "year", "text"], false)?
        .iter()
        .map(|(line, rec)| {
            Ok(Document {
                gene: id(path, *line, rec, 0, "gene_id")?,
                doc_id: id(path, *line, rec, 1, "doc_id")?,
                year: field(path, *line, rec, 2, "year")?,
                text: rec.get(3).unwrap_or("").trim().to_string(),
            })
        })
        .collect()
}

pub fn read_relations(path: &Path) -> Result<Vec<Relation>> {
    read_rows(path, &["id_a", "id_b", "doc_id", "score"], false)?
        .iter()
        .map(|(line, rec)| {
            let score: f64 = field(path, *line, rec, 3, "score")?;
            if !(0.0..=1.0).contains(&score) {
                return Err(PipelineError::parse(path, *line, format!("score {score} outside [0, 1]")));
            }
            Ok(Relation {
                a: id(path, *line, rec, 0, "id_a")?,
                b: id(path, *line, rec, 1, "id_b")?,
                doc_id: id(path, *line, rec, 2, "doc_id")?,
                score,
            })
        })
        .collect()
}

pub fn read_orthologs(path: &Path) -> Result<Vec<Ortholog>> {
    read_rows(path, &["organism", "foreign_id", "target_id"], false)?
        .iter()
        .map(|(line, rec)| {
            Ok(Ortholog {
                organism: id(path, *line, rec, 0, "organism")?,
                foreign_id: id(path, *line, rec, 1, "foreign_id")?,
                target_id: id(path, *line, rec, 2, "target_id")?,
            })
        })
        .collect()
}

pub fn read_expression(path: &Path) -> Result<Vec<(String, Vec<f64>)>> {
    read_rows(path, &["gene_id"], true)?
        .iter()
        .map(|(line, rec)| {
            let gene = id(path, *line, rec, 0, "gene_id")?;
            let values = (1..rec.len())
                .map(|i| {
                    let v: f64 = field(path, *line, rec, i, "value")?;
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(PipelineError::parse(path, *line, format!("non-finite value {v}")))
                    }
                })
                .collect::<Result<_>>()?;
            Ok((gene, values))
        })
        .collect()
}

pub fn read_ontology(path: &Path) -> Result<Vec<OntologyTerm>> {
    read_rows(path, &["term_id", "parent_ids"], false)?
        .iter()
        .map(|(line, rec)| {
            let parents = rec
                .get(1)
                .unwrap_or("")
                .split(';')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(str::to_string)
                .collect();
            Ok(OntologyTerm {
                term: id(path, *line, rec, 0, "term_id")?,
                parents,
            })
        })
        .collect()
}

fn opt<T>(path: &Option<std::path::PathBuf>, read: impl Fn(&Path) -> Result<T>) -> Result<Option<T>> {
    path.as_deref().map(read).transpose()
}

impl SourceRecords {
    /// Reads every configured file and puts the records in canonical form.
    pub fn read(cfg: &RunConfig) -> Result<Self> {
        let p = &cfg.paths;
        let mut rec = SourceRecords {
            seeds: match &p.seeds {
                Some(path) => read_seeds(path)?,
                None => Vec::new(),
            },
            interactions: opt(&p.interactions, read_interactions)?,
            foreign_interactions: p
                .foreign_interactions
                .iter()
                .map(|(org, path)| Ok((org.clone(), read_interactions(path)?)))
                .collect::<Result<_>>()?,
            orthologs: opt(&p.orthologs, read_orthologs)?,
            documents: opt(&p.documents, read_documents)?,
            relations: opt(&p.relations, read_relations)?,
            expression: opt(&p.expression, read_expression)?,
            go: opt(&p.go, read_annotations)?,
            kegg: opt(&p.kegg, read_annotations)?,
            aracyc: opt(&p.aracyc, read_annotations)?,
            tf: opt(&p.tf, read_annotations)?,
            tfbs: opt(&p.tfbs, read_annotations)?,
            ontology: opt(&p.ontology, read_ontology)?,
        };
        rec.canonicalize()?;
        Ok(rec)
    }

    fn canonicalize(&mut self) -> Result<()> {
        fn sort_dedup<T: Ord>(v: &mut Vec<T>) {
            v.sort();
            v.dedup();
        }
        let orient = |v: &mut Vec<Interaction>| {
            for e in v.iter_mut() {
                if e.b < e.a {
                    std::mem::swap(&mut e.a, &mut e.b);
                }
            }
            sort_dedup(v);
        };
        if let Some(v) = &mut self.interactions {
            orient(v);
        }
        for v in self.foreign_interactions.values_mut() {
            orient(v);
        }
        for v in [&mut self.go, &mut self.kegg, &mut self.aracyc, &mut self.tf, &mut self.tfbs]
            .into_iter()
            .flatten()
        {
            sort_dedup(v);
        }
        if let Some(v) = &mut self.orthologs {
            sort_dedup(v);
        }
        if let Some(v) = &mut self.documents {
            sort_dedup(v);
        }
        if let Some(v) = &mut self.relations {
            for r in v.iter_mut() {
                if r.b < r.a {
                    std::mem::swap(&mut r.a, &mut r.b);
                }
            }
            v.sort_by(|x, y| x.partial_cmp(y).expect("scores are finite"));
            v.dedup();
        }
        if let Some(v) = &mut self.expression {
            v.sort_by(|x, y| x.0.cmp(&y.0));
            if let Some(w) = v.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(PipelineError::Config(format!("expression: gene `{}` appears twice", w[0].0)));
            }
        }
        if let Some(v) = &mut self.ontology {
            for t in v.iter_mut() {
                sort_dedup(&mut t.parents);
            }
            sort_dedup(v);
        }
        Ok(())
    }

    /// Drops timestamped records newer than `year`. Relation scores go with
    /// the documents they were extracted from.
    pub fn apply_cutoff(&mut self, year: i32) {
        let keep = |y: i32| y <= year;
        if let Some(v) = &mut self.interactions {
            v.retain(|e| keep(e.year));
        }
        for v in self.foreign_interactions.values_mut() {
            v.retain(|e| keep(e.year));
        }
        for v in [&mut self.go, &mut self.kegg, &mut self.aracyc, &mut self.tf, &mut self.tfbs]
            .into_iter()
            .flatten()
        {
            v.retain(|a| keep(a.year));
        }
        if let Some(docs) = &mut self.documents {
            let late: BTreeSet<String> = docs
                .iter()
                .filter(|d| !keep(d.year))
                .map(|d| d.doc_id.clone())
                .collect();
            docs.retain(|d| keep(d.year));
            let kept: BTreeSet<&str> = docs.iter().map(|d| d.doc_id.as_str()).collect();
            if let Some(rel) = &mut self.relations {
                rel.retain(|r| kept.contains(r.doc_id.as_str()) || !late.contains(&r.doc_id));
            }
        }
    }

    /// Per-source record counts.
    pub fn counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        out.insert("seeds".to_string(), self.seeds.len());
        let mut put = |k: &str, n: Option<usize>| {
            if let Some(n) = n {
                out.insert(k.to_string(), n);
            }
        };
        put("interactions", self.interactions.as_ref().map(Vec::len));
        put("orthologs", self.orthologs.as_ref().map(Vec::len));
        put("documents", self.documents.as_ref().map(Vec::len));
        put("relations", self.relations.as_ref().map(Vec::len));
        put("expression", self.expression.as_ref().map(Vec::len));
        put("go", self.go.as_ref().map(Vec::len));
        put("kegg", self.kegg.as_ref().map(Vec::len));
        put("aracyc", self.aracyc.as_ref().map(Vec::len));
        put("tf", self.tf.as_ref().map(Vec::len));
        put("tfbs", self.tfbs.as_ref().map(Vec::len));
        put("ontology", self.ontology.as_ref().map(Vec::len));
        for (org, v) in &self.foreign_interactions {
            out.insert(format!("interactions.{org}"), v.len());
        }
        out
    }

    /// Writes every present source in canonical form into `dir`, plus a
    /// `sources.txt` config fragment naming the files.
    pub fn write_canonical(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
        let mut index = String::new();
        let mut emit = |key: &str, file: &str, body: String| -> Result<()> {
            writeln!(index, "{key} = {file}").expect("string write");
            write_atomic(&dir.join(file), body.as_bytes())
        };
        let mut s = String::from("gene_id\n");
        for g in &self.seeds {
            writeln!(s, "{g}").expect("string write");
        }
        emit("seeds", "seeds.tsv", s)?;
        let interactions = |v: &[Interaction]| {
            let mut s = String::from("id_a\tid_b\tsource\tyear\n");
            for e in v {
                writeln!(s, "{}\t{}\t{}\t{}", e.a, e.b, e.source, e.year).expect("string write");
            }
            s
        };
        if let Some(v) = &self.interactions {
            emit("interactions", "interactions.tsv", interactions(v))?;
        }
        for (org, v) in &self.foreign_interactions {
            emit(
                &format!("interactions.{org}"),
                &format!("interactions.{org}.tsv"),
                interactions(v),
            )?;
        }
        if let Some(v) = &self.orthologs {
            let mut s = String::from("organism\tforeign_id\ttarget_id\n");
            for o in v {
                writeln!(s, "{}\t{}\t{}", o.organism, o.foreign_id, o.target_id).expect("string write");
            }
            emit("orthologs", "orthologs.tsv", s)?;
        }
        if let Some(v) = &self.documents {
            let mut s = String::from("gene_id\tdoc_id\tyear\ttext\n");
            for d in v {
                writeln!(s, "{}\t{}\t{}\t{}", d.gene, d.doc_id, d.year, d.text).expect("string write");
            }
            emit("documents", "documents.tsv", s)?;
        }
        if let Some(v) = &self.relations {
            let mut s = String::from("id_a\tid_b\tdoc_id\tscore\n");
            for r in v {
                writeln!(s, "{}\t{}\t{}\t{}", r.a, r.b, r.doc_id, r.score).expect("string write");
            }
            emit("relations", "relations.tsv", s)?;
        }
        if let Some(v) = &self.expression {
            let k = v.first().map_or(0, |r| r.1.len());
            let mut s = String::from("gene_id");
            for i in 1..=k {
                write!(s, "\tv{i}").expect("string write");
            }
            s.push('\n');
            for (g, row) in v {
                s.push_str(g);
                for x in row {
                    write!(s, "\t{x}").expect("string write");
                }
                s.push('\n');
            }
            emit("expression", "expression.tsv", s)?;
        }
        for (key, table) in [
            ("go", &self.go),
            ("kegg", &self.kegg),
            ("aracyc", &self.aracyc),
            ("tf", &self.tf),
            ("tfbs", &self.tfbs),
        ] {
            if let Some(v) = table {
                let mut s = String::from("gene_id\tterm_id\tevidence\tyear\n");
                for a in v {
                    writeln!(s, "{}\t{}\t{}\t{}", a.gene, a.term, a.evidence, a.year).expect("string write");
                }
                emit(key, &format!("{key}.tsv"), s)?;
            }
        }
        if let Some(v) = &self.ontology {
            let mut s = String::from("term_id\tparent_ids\n");
            for t in v {
                writeln!(s, "{}\t{}", t.term, t.parents.join(";")).expect("string write");
            }
            emit("ontology", "ontology.tsv", s)?;
        }
        write_atomic(&dir.join("sources.txt"), index.as_bytes())
    }
}

/// Structures built from the records, ready for featurization and
/// unlabeled-example selection.
#[derive(Debug, Clone)]
pub struct Sources {
    pub records: SourceRecords,
    /// Every target-organism id mentioned by any source, ascending.
    pub universe: Vec<String>,
    pub interactions: Option<InteractionGraph>,
    pub foreign_interactions: BTreeMap<String, InteractionGraph>,
    pub orthologs: Option<OrthologMap>,
    pub corpus: Option<DocumentCorpus>,
    pub expression: Option<ExpressionMatrix>,
    pub go: Option<AnnotationTable>,
    pub kegg: Option<AnnotationTable>,
    pub aracyc: Option<AnnotationTable>,
    pub tf: Option<AnnotationTable>,
    pub tfbs: Option<AnnotationTable>,
    /// Term DAG annotated with the GO records that passed the evidence filter.
    pub ontology: Option<OntologyDag>,
}

fn graph_of(v: &[Interaction]) -> Result<InteractionGraph> {
    let mut g = InteractionGraph::new();
    for e in v {
        g.add_edge(&e.a, &e.b, &e.source, e.year).stage(Stage::Ingest)?;
    }
    Ok(g)
}

impl Sources {
    pub fn build(records: SourceRecords, cfg: &RunConfig) -> Result<Self> {
        let mut universe: BTreeSet<&str> = records.seeds.iter().map(String::as_str).collect();
        if let Some(v) = &records.interactions {
            universe.extend(v.iter().flat_map(|e| [e.a.as_str(), e.b.as_str()]));
        }
        if let Some(v) = &records.orthologs {
            universe.extend(v.iter().map(|o| o.target_id.as_str()));
        }
        if let Some(v) = &records.documents {
            universe.extend(v.iter().map(|d| d.gene.as_str()));
        }
        if let Some(v) = &records.relations {
            universe.extend(v.iter().flat_map(|r| [r.a.as_str(), r.b.as_str()]));
        }
        if let Some(v) = &records.expression {
            universe.extend(v.iter().map(|r| r.0.as_str()));
        }
        for v in [&records.go, &records.kegg, &records.aracyc, &records.tf, &records.tfbs]
            .into_iter()
            .flatten()
        {
            universe.extend(v.iter().map(|a| a.gene.as_str()));
        }
        let universe: Vec<String> = universe.into_iter().map(str::to_string).collect();
        let genome_size = cfg.genome_size.unwrap_or(universe.len());

        let interactions = records.interactions.as_deref().map(graph_of).transpose()?;
        let foreign_interactions = records
            .foreign_interactions
            .iter()
            .map(|(org, v)| Ok((org.clone(), graph_of(v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let orthologs = records.orthologs.as_ref().map(|v| {
            let mut map = OrthologMap::new();
            let mut skipped = BTreeMap::<&str, usize>::new();
            for o in v {
                if foreign_interactions.contains_key(&o.organism) {
                    map.insert(&o.organism, &o.foreign_id, &o.target_id);
                } else {
                    *skipped.entry(o.organism.as_str()).or_default() += 1;
                }
            }
            for (org, n) in skipped {
                log::warn!("orthologs: no interaction file for organism `{org}`; skipped {n} records");
            }
            map
        });
        let corpus = if records.documents.is_some() || records.relations.is_some() {
            let mut c = DocumentCorpus::new();
            for d in records.documents.iter().flatten() {
                c.add_document(&d.gene, &d.doc_id, &d.text);
            }
            for r in records.relations.iter().flatten() {
                c.add_relation(&r.a, &r.b, r.score).stage(Stage::Ingest)?;
            }
            Some(c)
        } else {
            None
        };
        let expression = records
            .expression
            .clone()
            .map(ExpressionMatrix::new)
            .transpose()
            .stage(Stage::Ingest)?;
        let evidence: Vec<&str> = cfg.go_evidence.iter().map(String::as_str).collect();
        let table = |v: &Option<Vec<Annotation>>, allowed: Option<&[&str]>| -> Result<Option<AnnotationTable>> {
            v.as_ref()
                .map(|v| {
                    AnnotationTable::from_records(
                        v.iter().map(|a| (a.gene.as_str(), a.term.as_str(), a.evidence.as_str())),
                        allowed,
                        Some(genome_size),
                    )
                })
                .transpose()
                .stage(Stage::Ingest)
        };
        let go = table(&records.go, Some(&evidence))?;
        let kegg = table(&records.kegg, None)?;
        let aracyc = table(&records.aracyc, None)?;
        let tf = table(&records.tf, None)?;
        let tfbs = table(&records.tfbs, None)?;

        let ontology = match &records.ontology {
            None => None,
            Some(terms) => {
                let defs: Vec<(String, Vec<String>)> =
                    terms.iter().map(|t| (t.term.clone(), t.parents.clone())).collect();
                let mut dag = OntologyDag::new(&defs).stage(Stage::Ingest)?;
                let mut unknown = 0usize;
                for a in records.go.iter().flatten() {
                    if !evidence.contains(&a.evidence.as_str()) {
                        continue;
                    }
                    if dag.annotate(&a.gene, &a.term).is_err() {
                        unknown += 1;
                    }
                }
                if unknown > 0 {
                    log::warn!("go: {unknown} annotations name terms missing from the ontology; skipped");
                }
                Some(dag)
            }
        };
        Ok(Sources {
            records,
            universe,
            interactions,
            foreign_interactions,
            orthologs,
            corpus,
            expression,
            go,
            kegg,
            aracyc,
            tf,
            tfbs,
            ontology,
        })
    }
}

/// Reads, filters by `cutoff_year` and builds every configured source.
pub fn ingest_sources(cfg: &RunConfig) -> Result<Sources> {
    let mut records = SourceRecords::read(cfg)?;
    if let Some(year) = cfg.cutoff_year {
        records.apply_cutoff(year);
    }
    for (k, n) in records.counts() {
        log::info!("ingest: {k} = {n}");
    }
    Sources::build(records, cfg)
}
