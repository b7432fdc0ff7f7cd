//! Run configuration: a TOML file of resource paths and hyperparameters,
//! overridable by command-line flags. Relative paths resolve against
//! `SIMPQE_DATA_DIR` when set, otherwise against the config file's
//! directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use simpqe_core::features::Resources;
use simpqe_core::model::ForestParams;
use simpqe_core::resources::{
    CuePhraseList, EmbeddingTable, FrequencyTable, NGramModel, SynonymLexicon,
};
use simpqe_core::textproc::{tokenize, Preprocessor};

pub const DATA_DIR_VAR: &str = "SIMPQE_DATA_DIR";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub resources: ResourceSection,
    #[serde(default)]
    pub forest: ForestSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceSection {
    pub dataset: Option<String>,
    /// Prebuilt n-gram model file; mutually exclusive with `lm_corpus`.
    pub lm_model: Option<String>,
    pub lm_corpus: Option<String>,
    pub lm_order: Option<usize>,
    pub embeddings: Option<String>,
    pub synonyms: Option<String>,
    pub regular_table: Option<String>,
    pub regular_corpus: Option<String>,
    pub simple_table: Option<String>,
    pub simple_corpus: Option<String>,
    /// Optional cue-phrase list; the embedded 100-phrase list is the default.
    pub cues: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForestSection {
    pub n_trees: Option<usize>,
    pub max_depth: Option<usize>,
    pub min_samples_split: Option<usize>,
    pub features_per_split: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub tau: Option<f64>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
}

/// A parsed config plus the root that its relative paths resolve against.
pub struct RunConfig {
    pub file: ConfigFile,
    root: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let file: ConfigFile = toml::from_str(&text)
            .with_context(|| format!("invalid config file {}", path.display()))?;
        let root = match std::env::var_os(DATA_DIR_VAR) {
            Some(dir) => PathBuf::from(dir),
            None => path.parent().unwrap_or(Path::new(".")).to_path_buf(),
        };
        let cfg = RunConfig { file, root };
        cfg.validate_paths()?;
        Ok(cfg)
    }

    pub fn resolve(&self, path: &str) -> PathBuf {
        let p = Path::new(path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    /// Fail-fast check that every referenced input exists, before any
    /// long-running work starts.
    fn validate_paths(&self) -> Result<()> {
        let r = &self.file.resources;
        if r.lm_model.is_some() && r.lm_corpus.is_some() {
            bail!("config sets both lm_model and lm_corpus; pick one");
        }
        if r.regular_table.is_some() && r.regular_corpus.is_some() {
            bail!("config sets both regular_table and regular_corpus; pick one");
        }
        if r.simple_table.is_some() && r.simple_corpus.is_some() {
            bail!("config sets both simple_table and simple_corpus; pick one");
        }
        for (key, value) in [
            ("dataset", &r.dataset),
            ("lm_model", &r.lm_model),
            ("lm_corpus", &r.lm_corpus),
            ("embeddings", &r.embeddings),
            ("synonyms", &r.synonyms),
            ("regular_table", &r.regular_table),
            ("regular_corpus", &r.regular_corpus),
            ("simple_table", &r.simple_table),
            ("simple_corpus", &r.simple_corpus),
            ("cues", &r.cues),
        ] {
            if let Some(value) = value {
                let path = self.resolve(value);
                if !path.exists() {
                    bail!("{key} path {} does not exist", path.display());
                }
            }
        }
        Ok(())
    }

    pub fn dataset_path(&self, flag: Option<&Path>) -> Result<PathBuf> {
        if let Some(p) = flag {
            return Ok(p.to_path_buf());
        }
        match &self.file.resources.dataset {
            Some(p) => Ok(self.resolve(p)),
            None => bail!("no dataset given: pass --dataset or set resources.dataset"),
        }
    }

    /// Loads every feature-extraction resource named in the config.
    pub fn load_resources(&self, pre: &Preprocessor) -> Result<Resources> {
        let r = &self.file.resources;
        let need = |key: &str, value: &Option<String>| -> Result<PathBuf> {
            match value {
                Some(v) => Ok(self.resolve(v)),
                None => bail!("config is missing resources.{key}"),
            }
        };

        let lm = if let Some(model) = &r.lm_model {
            NGramModel::load(self.resolve(model))?
        } else {
            let path = need("lm_corpus (or lm_model)", &r.lm_corpus)?;
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            let sentences: Vec<Vec<String>> = text
                .lines()
                .map(|l| tokenize(l).into_iter().map(|t| t.to_lowercase()).collect())
                .collect();
            NGramModel::train(sentences, r.lm_order.unwrap_or(3))?
        };

        let freq = |table: &Option<String>, corpus: &Option<String>, name: &str| -> Result<FrequencyTable> {
            if let Some(t) = table {
                Ok(FrequencyTable::load(self.resolve(t))?)
            } else if let Some(c) = corpus {
                let path = self.resolve(c);
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                Ok(FrequencyTable::build(text.lines(), name, pre)?)
            } else {
                bail!("config is missing resources.{name}_table or resources.{name}_corpus")
            }
        };

        Ok(Resources {
            lm,
            embeddings: EmbeddingTable::load(need("embeddings", &r.embeddings)?)?,
            synonyms: SynonymLexicon::load(need("synonyms", &r.synonyms)?)?,
            regular_freq: freq(&r.regular_table, &r.regular_corpus, "regular")?,
            simple_freq: freq(&r.simple_table, &r.simple_corpus, "simple")?,
            cues: match &r.cues {
                Some(c) => CuePhraseList::load(self.resolve(c))?,
                None => CuePhraseList::shipped(),
            },
        })
    }

    /// Forest hyperparameters: flags beat the config, which beats defaults.
    pub fn forest_params(&self, flags: &ForestFlags) -> ForestParams {
        let f = &self.file.forest;
        let defaults = ForestParams::default();
        ForestParams {
            n_trees: flags.n_trees.or(f.n_trees).unwrap_or(defaults.n_trees),
            max_depth: flags.max_depth.or(f.max_depth),
            min_samples_split: flags
                .min_samples_split
                .or(f.min_samples_split)
                .unwrap_or(defaults.min_samples_split),
            features_per_split: flags.features_per_split.or(f.features_per_split),
        }
    }

    pub fn tau(&self, flag: Option<f64>) -> f64 {
        flag.or(self.file.run.tau).unwrap_or(0.5)
    }

    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.file.run.seed).unwrap_or(42)
    }

    pub fn k(&self, flag: Option<usize>) -> usize {
        flag.or(self.file.run.k).unwrap_or(10)
    }
}

/// Forest hyperparameter flags shared by `train` and `cv`.
#[derive(Debug, Default, clap::Args)]
pub struct ForestFlags {
    /// Number of trees in the forest [default: 100, or config]
    #[arg(long)]
    pub n_trees: Option<usize>,
    /// Maximum tree depth [default: unbounded]
    #[arg(long)]
    pub max_depth: Option<usize>,
    /// Minimum samples needed to split a node [default: 2, or config]
    #[arg(long)]
    pub min_samples_split: Option<usize>,
    /// Features drawn per split [default: ceil(sqrt(m))]
    #[arg(long)]
    pub features_per_split: Option<usize>,
}
