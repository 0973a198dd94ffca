//! JSON run configuration for full experiments.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evaluation::GridConfig;
use crate::kmer::MAX_K;
use crate::model::ClassifierConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

fn default_task() -> String {
    "genotyping".into()
}
fn default_k_min() -> usize {
    4
}
fn default_k_max() -> usize {
    15
}
fn default_folds() -> usize {
    5
}
fn yes() -> bool {
    true
}
fn default_fragments() -> Vec<usize> {
    vec![0, 100, 250, 500, 1000]
}
fn default_max_per_class() -> usize {
    1000
}
fn default_seed() -> u64 {
    1
}
fn default_out() -> PathBuf {
    PathBuf::from("results")
}
fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub fasta: PathBuf,
    pub labels: PathBuf,
    #[serde(default = "default_task")]
    pub task: String,
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "ClassifierConfig::study_variants")]
    pub models: Vec<ClassifierConfig>,
    #[serde(default = "default_folds")]
    pub n_folds: usize,
    #[serde(default = "yes")]
    pub shuffle: bool,
    /// 0 stands for complete sequences.
    #[serde(default = "default_fragments")]
    pub fragment_lengths: Vec<usize>,
    #[serde(default = "default_max_per_class")]
    pub max_per_class: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
    /// Manifest entries without a matching sequence become warnings.
    #[serde(default)]
    pub lenient: bool,
    /// Worker threads; `None` uses every available core.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn new(fasta: impl Into<PathBuf>, labels: impl Into<PathBuf>) -> Self {
        RunConfig {
            fasta: fasta.into(),
            labels: labels.into(),
            task: default_task(),
            k_min: default_k_min(),
            k_max: default_k_max(),
            models: ClassifierConfig::study_variants(),
            n_folds: default_folds(),
            shuffle: true,
            fragment_lengths: default_fragments(),
            max_per_class: default_max_per_class(),
            seed: default_seed(),
            out: default_out(),
            formats: default_formats(),
            lenient: false,
            workers: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_grid(&self) -> GridConfig {
        GridConfig {
            models: self.models.clone(),
            k_min: self.k_min,
            k_max: self.k_max,
            n_folds: self.n_folds,
            shuffle: self.shuffle,
            fragment_lengths: self.fragment_lengths.clone(),
            max_per_class: self.max_per_class,
            seed: self.seed,
            keep_predictions: false,
        }
    }

    /// Checks value ranges and that the input files exist.
    pub fn validate(&self) -> Result<()> {
        if self.k_min < 2 || self.k_min > self.k_max || self.k_max > MAX_K {
            return Err(Error::InvalidParameter(format!(
                "k range [{}, {}] must satisfy 2 ≤ k_min ≤ k_max ≤ {MAX_K}",
                self.k_min, self.k_max
            )));
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidParameter("workers must be ≥ 1".into()));
        }
        if self.formats.is_empty() {
            return Err(Error::InvalidParameter("no output format selected".into()));
        }
        self.to_grid().validate()?;
        for p in [&self.fasta, &self.labels] {
            fs::metadata(p).map_err(|e| Error::io(p, e))?;
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut h = Sha256::new();
        h.update(json.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
