//! Flat `key = value` run configuration.
//!
//! Relative paths resolve against the directory of the config file. Every
//! key can be overridden on the command line as `--key value`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lpu_core::KernelKind;

use crate::error::{PipelineError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    NaiveSvm,
    Tsvm,
    LapSvm,
    Lp,
    Bsvm,
    Wsvm,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::NaiveSvm,
        Method::Tsvm,
        Method::LapSvm,
        Method::Lp,
        Method::Bsvm,
        Method::Wsvm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::NaiveSvm => "naive-svm",
            Method::Tsvm => "tsvm",
            Method::LapSvm => "lapsvm",
            Method::Lp => "lp",
            Method::Bsvm => "bsvm",
            Method::Wsvm => "wsvm",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnlabeledSelection {
    Random,
    GoSimilarity,
    GoDistance,
}

impl UnlabeledSelection {
    pub fn name(self) -> &'static str {
        match self {
            UnlabeledSelection::Random => "random",
            UnlabeledSelection::GoSimilarity => "go-sim",
            UnlabeledSelection::GoDistance => "go-dist",
        }
    }
}

impl FromStr for UnlabeledSelection {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(UnlabeledSelection::Random),
            "go-sim" => Ok(UnlabeledSelection::GoSimilarity),
            "go-dist" => Ok(UnlabeledSelection::GoDistance),
            _ => Err(format!("unknown unlabeled selection `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataSource {
    /// TSV source files.
    Files,
    /// Gaussian benchmark drawn by the synthetic generator.
    Synthetic,
}

/// Source file paths. `foreign_interactions` maps organism -> interaction file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourcePaths {
    pub seeds: Option<PathBuf>,
    pub interactions: Option<PathBuf>,
    pub foreign_interactions: BTreeMap<String, PathBuf>,
    pub orthologs: Option<PathBuf>,
    pub documents: Option<PathBuf>,
    pub relations: Option<PathBuf>,
    pub expression: Option<PathBuf>,
    pub go: Option<PathBuf>,
    pub kegg: Option<PathBuf>,
    pub aracyc: Option<PathBuf>,
    pub tf: Option<PathBuf>,
    pub tfbs: Option<PathBuf>,
    pub ontology: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: DataSource,
    pub paths: SourcePaths,
    pub method: Method,
    pub kernel: KernelKind,
    pub unlabeled_selection: UnlabeledSelection,
    pub n_pos: usize,
    pub n_unl: usize,
    pub n_test_pos: usize,
    pub n_test_neg: usize,
    pub cutoff_year: Option<i32>,
    pub seed: u64,
    pub feature_selection: bool,
    pub grid_c: Vec<f64>,
    pub grid_j: Vec<f64>,
    pub grid_gamma: Vec<f64>,
    pub top_fraction: f64,
    pub min_distance: usize,
    pub max_distance: usize,
    pub go_evidence: Vec<String>,
    pub genome_size: Option<usize>,
    pub background_factor: usize,
    pub stacking_c: f64,
    pub knn: usize,
    pub lp_alpha: f64,
    pub lapsvm_gamma_a: f64,
    pub lapsvm_gamma_i: f64,
    pub tsvm_c: f64,
    pub tsvm_c_star: f64,
    pub synth_positives: usize,
    pub dim: usize,
    pub label_frequency: f64,
    pub separation: f64,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub precision_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: DataSource::Files,
            paths: SourcePaths::default(),
            method: Method::Wsvm,
            kernel: KernelKind::Linear,
            unlabeled_selection: UnlabeledSelection::Random,
            n_pos: 30,
            n_unl: 720,
            n_test_pos: 300,
            n_test_neg: 420,
            cutoff_year: None,
            seed: 0,
            feature_selection: false,
            grid_c: vec![0.01, 0.1, 1.0, 10.0, 100.0],
            grid_j: vec![0.5, 1.0, 2.0, 5.0, 10.0, 20.0],
            grid_gamma: vec![0.01, 0.1, 0.5, 1.0, 2.0],
            top_fraction: 0.2,
            min_distance: lpu_core::ontology::DEFAULT_MIN_DISTANCE,
            max_distance: lpu_core::ontology::DEFAULT_MAX_DISTANCE,
            go_evidence: lpu_core::features::GO_EXPERIMENTAL_EVIDENCE
                .iter()
                .map(|s| s.to_string())
                .collect(),
            genome_size: None,
            background_factor: 2,
            stacking_c: 1.0,
            knn: 6,
            lp_alpha: 0.99,
            lapsvm_gamma_a: 1e-2,
            lapsvm_gamma_i: 1e-2,
            tsvm_c: 1.0,
            tsvm_c_star: 1.0,
            synth_positives: 500,
            dim: 20,
            label_frequency: 0.5,
            separation: 2.0,
            trials: 30,
            methods: vec![Method::NaiveSvm, Method::Bsvm, Method::Wsvm],
            precision_n: 20,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| bad_value(key, s, e)))
        .collect()
}

fn bad_value(key: &str, value: &str, reason: impl fmt::Display) -> PipelineError {
    PipelineError::Config(format!("`{key} = {value}`: {reason}"))
}

fn parse_one<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| bad_value(key, value, e))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(bad_value(key, value, "expected true or false")),
    }
}

fn join<T: fmt::Display>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn kernel_name(kind: KernelKind) -> &'static str {
    match kind {
        KernelKind::Linear => "linear",
        KernelKind::Gaussian => "gaussian",
    }
}

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_pairs(text: &str, origin: &Path) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(PipelineError::parse(origin, i as u64 + 1, "expected `key = value`"));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl RunConfig {
    /// Reads a config file, then applies `overrides` in order.
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        // absolute, so the manifest written from this config reloads anywhere
        let base = std::path::absolute(match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p,
            _ => Path::new("."),
        })
            .map_err(|e| PipelineError::io(path, e))?;
        let mut pairs = parse_pairs(&text, path)?;
        pairs.extend(overrides.iter().cloned());
        let cfg = Self::from_pairs(&pairs, &base)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Builds a config from pairs over the defaults. Keys in the `derived.`
    /// and `result.` namespaces (written into manifests) are ignored.
    pub fn from_pairs(pairs: &[(String, String)], base: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (k, v) in pairs {
            cfg.set(k, v, base)?;
        }
        Ok(cfg)
    }

    /// Sets one key.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let path = || Some(base.join(value));
        let p = &mut self.paths;
        match key {
            k if k.starts_with("derived.") || k.starts_with("result.") => {}
            "source" => {
                self.source = match value {
                    "files" => DataSource::Files,
                    "synthetic" => DataSource::Synthetic,
                    _ => return Err(bad_value(key, value, "expected files or synthetic")),
                }
            }
            "seeds" => p.seeds = path(),
            "interactions" => p.interactions = path(),
            k if k.starts_with("interactions.") => {
                let org = &k["interactions.".len()..];
                if org.is_empty() {
                    return Err(bad_value(key, value, "organism name is empty"));
                }
                p.foreign_interactions.insert(org.to_string(), base.join(value));
            }
            "orthologs" => p.orthologs = path(),
            "documents" => p.documents = path(),
            "relations" => p.relations = path(),
            "expression" => p.expression = path(),
            "go" => p.go = path(),
            "kegg" => p.kegg = path(),
            "aracyc" => p.aracyc = path(),
            "tf" => p.tf = path(),
            "tfbs" => p.tfbs = path(),
            "ontology" => p.ontology = path(),
            "method" => self.method = parse_one(key, value)?,
            "kernel" => {
                self.kernel = match value {
                    "linear" => KernelKind::Linear,
                    "gaussian" => KernelKind::Gaussian,
                    _ => return Err(bad_value(key, value, "expected linear or gaussian")),
                }
            }
            "unlabeled_selection" => self.unlabeled_selection = parse_one(key, value)?,
            "n_pos" => self.n_pos = parse_one(key, value)?,
            "n_unl" => self.n_unl = parse_one(key, value)?,
            "n_test_pos" => self.n_test_pos = parse_one(key, value)?,
            "n_test_neg" => self.n_test_neg = parse_one(key, value)?,
            "cutoff_year" => {
                self.cutoff_year = match value {
                    "" | "none" => None,
                    _ => Some(parse_one(key, value)?),
                }
            }
            "seed" => self.seed = parse_one(key, value)?,
            "feature_selection" => self.feature_selection = parse_bool(key, value)?,
            "grid_c" => self.grid_c = parse_list(key, value)?,
            "grid_j" => self.grid_j = parse_list(key, value)?,
            "grid_gamma" => self.grid_gamma = parse_list(key, value)?,
            "top_fraction" => self.top_fraction = parse_one(key, value)?,
            "min_distance" => self.min_distance = parse_one(key, value)?,
            "max_distance" => self.max_distance = parse_one(key, value)?,
            "go_evidence" => self.go_evidence = parse_list(key, value)?,
            "genome_size" => {
                self.genome_size = match value {
                    "" | "none" => None,
                    _ => Some(parse_one(key, value)?),
                }
            }
            "background_factor" => self.background_factor = parse_one(key, value)?,
            "stacking_c" => self.stacking_c = parse_one(key, value)?,
            "knn" => self.knn = parse_one(key, value)?,
            "lp_alpha" => self.lp_alpha = parse_one(key, value)?,
            "lapsvm_gamma_a" => self.lapsvm_gamma_a = parse_one(key, value)?,
            "lapsvm_gamma_i" => self.lapsvm_gamma_i = parse_one(key, value)?,
            "tsvm_c" => self.tsvm_c = parse_one(key, value)?,
            "tsvm_c_star" => self.tsvm_c_star = parse_one(key, value)?,
            "synth_positives" => self.synth_positives = parse_one(key, value)?,
            "dim" => self.dim = parse_one(key, value)?,
            "label_frequency" => self.label_frequency = parse_one(key, value)?,
            "separation" => self.separation = parse_one(key, value)?,
            "trials" => self.trials = parse_one(key, value)?,
            "methods" => self.methods = parse_list(key, value)?,
            "precision_n" => self.precision_n = parse_one(key, value)?,
            _ => return Err(PipelineError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Checks counts, ranges and that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(PipelineError::Config(m));
        for (name, v) in [
            ("n_pos", self.n_pos),
            ("n_unl", self.n_unl),
            ("n_test_pos", self.n_test_pos),
            ("n_test_neg", self.n_test_neg),
            ("trials", self.trials),
            ("knn", self.knn),
            ("dim", self.dim),
            ("synth_positives", self.synth_positives),
        ] {
            if v == 0 {
                return fail(format!("`{name}` must be positive"));
            }
        }
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return fail(format!("`top_fraction` must lie in (0, 1], got {}", self.top_fraction));
        }
        if !(self.label_frequency > 0.0 && self.label_frequency <= 1.0) {
            return fail(format!("`label_frequency` must lie in (0, 1], got {}", self.label_frequency));
        }
        if self.methods.is_empty() {
            return fail("`methods` is empty".into());
        }
        for (name, grid) in [("grid_c", &self.grid_c), ("grid_j", &self.grid_j), ("grid_gamma", &self.grid_gamma)] {
            if grid.is_empty() {
                return fail(format!("`{name}` is empty"));
            }
        }
        if self.source == DataSource::Files {
            if self.paths.seeds.is_none() {
                return fail("`seeds` is required for file sources".into());
            }
            if self.unlabeled_selection != UnlabeledSelection::Random
                && (self.paths.ontology.is_none() || self.paths.go.is_none())
            {
                return fail(format!(
                    "unlabeled selection `{}` needs `ontology` and `go`",
                    self.unlabeled_selection.name()
                ));
            }
            for (key, path) in self.path_entries() {
                if !path.is_file() {
                    return fail(format!("`{key}` points to missing file {}", path.display()));
                }
            }
        }
        Ok(())
    }

    fn path_entries(&self) -> Vec<(String, &PathBuf)> {
        let p = &self.paths;
        let mut out: Vec<(String, &PathBuf)> = [
            ("seeds", &p.seeds),
            ("interactions", &p.interactions),
            ("orthologs", &p.orthologs),
            ("documents", &p.documents),
            ("relations", &p.relations),
            ("expression", &p.expression),
            ("go", &p.go),
            ("kegg", &p.kegg),
            ("aracyc", &p.aracyc),
            ("tf", &p.tf),
            ("tfbs", &p.tfbs),
            ("ontology", &p.ontology),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v)))
        .collect();
        for (org, path) in &p.foreign_interactions {
            out.push((format!("interactions.{org}"), path));
        }
        out
    }

    /// Every key with its effective value; paths are written absolute.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = vec![(
            "source".into(),
            match self.source {
                DataSource::Files => "files",
                DataSource::Synthetic => "synthetic",
            }
            .into(),
        )];
        for (k, path) in self.path_entries() {
            out.push((k, path.display().to_string()));
        }
        let opt = |v: Option<String>| v.unwrap_or_else(|| "none".into());
        out.extend([
            ("method".into(), self.method.to_string()),
            ("kernel".into(), kernel_name(self.kernel).into()),
            ("unlabeled_selection".into(), self.unlabeled_selection.name().into()),
            ("n_pos".into(), self.n_pos.to_string()),
            ("n_unl".into(), self.n_unl.to_string()),
            ("n_test_pos".into(), self.n_test_pos.to_string()),
            ("n_test_neg".into(), self.n_test_neg.to_string()),
            ("cutoff_year".into(), opt(self.cutoff_year.map(|y| y.to_string()))),
            ("seed".into(), self.seed.to_string()),
            ("feature_selection".into(), self.feature_selection.to_string()),
            ("grid_c".into(), join(&self.grid_c)),
            ("grid_j".into(), join(&self.grid_j)),
            ("grid_gamma".into(), join(&self.grid_gamma)),
            ("top_fraction".into(), self.top_fraction.to_string()),
            ("min_distance".into(), self.min_distance.to_string()),
            ("max_distance".into(), self.max_distance.to_string()),
            ("go_evidence".into(), self.go_evidence.join(",")),
            ("genome_size".into(), opt(self.genome_size.map(|g| g.to_string()))),
            ("background_factor".into(), self.background_factor.to_string()),
            ("stacking_c".into(), self.stacking_c.to_string()),
            ("knn".into(), self.knn.to_string()),
            ("lp_alpha".into(), self.lp_alpha.to_string()),
            ("lapsvm_gamma_a".into(), self.lapsvm_gamma_a.to_string()),
            ("lapsvm_gamma_i".into(), self.lapsvm_gamma_i.to_string()),
            ("tsvm_c".into(), self.tsvm_c.to_string()),
            ("tsvm_c_star".into(), self.tsvm_c_star.to_string()),
            ("synth_positives".into(), self.synth_positives.to_string()),
            ("dim".into(), self.dim.to_string()),
            ("label_frequency".into(), self.label_frequency.to_string()),
            ("separation".into(), self.separation.to_string()),
            ("trials".into(), self.trials.to_string()),
            ("methods".into(), join(&self.methods)),
            ("precision_n".into(), self.precision_n.to_string()),
        ]);
        out
    }
}

/// Turns `--key value` / `--key=value` arguments into pairs.
pub fn parse_overrides(args: &[String]) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(flag) = arg.strip_prefix("--") else {
            return Err(PipelineError::Config(format!("unexpected argument `{arg}`")));
        };
        if let Some((k, v)) = flag.split_once('=') {
            out.push((k.replace('-', "_"), v.to_string()));
        } else {
            let v = it
                .next()
                .ok_or_else(|| PipelineError::Config(format!("flag `--{flag}` needs a value")))?;
            out.push((flag.replace('-', "_"), v.clone()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(text: &str) -> Vec<(String, String)> {
        parse_pairs(text, Path::new("cfg")).unwrap()
    }

    #[test]
    fn parses_and_overrides() {
        let text = "# comment\nmethod = bsvm\nn_pos=50\ngrid_c = 0.1, 1\ninteractions.yeast = y.tsv\n";
        let mut p = pairs(text);
        p.extend(parse_overrides(&["--n-pos".into(), "100".into(), "--kernel=gaussian".into()]).unwrap());
        let cfg = RunConfig::from_pairs(&p, Path::new("/data")).unwrap();
        assert_eq!(cfg.method, Method::Bsvm);
        assert_eq!(cfg.n_pos, 100);
        assert_eq!(cfg.kernel, KernelKind::Gaussian);
        assert_eq!(cfg.grid_c, vec![0.1, 1.0]);
        assert_eq!(cfg.paths.foreign_interactions["yeast"], PathBuf::from("/data/y.tsv"));
    }

    #[test]
    fn effective_pairs_reload_to_the_same_config() {
        let mut cfg = RunConfig::default();
        cfg.cutoff_year = Some(2010);
        cfg.methods = vec![Method::Lp, Method::Tsvm];
        cfg.top_fraction = 0.15;
        let back = RunConfig::from_pairs(&cfg.to_pairs(), Path::new("/")).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        let base = Path::new(".");
        assert!(RunConfig::from_pairs(&[("nope".into(), "1".into())], base).is_err());
        assert!(RunConfig::from_pairs(&[("n_pos".into(), "-3".into())], base).is_err());
        assert!(RunConfig::from_pairs(&[("method".into(), "svm".into())], base).is_err());
        assert!(parse_pairs("no equals sign", Path::new("c")).is_err());
        assert!(parse_overrides(&["--seed".into()]).is_err());
        let zero = RunConfig {
            n_pos: 0,
            source: DataSource::Synthetic,
            ..Default::default()
        };
        assert!(zero.validate().is_err());
        let missing = RunConfig {
            paths: SourcePaths {
                seeds: Some("/nonexistent/seeds.tsv".into()),
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(missing.validate().is_err());
    }
}
