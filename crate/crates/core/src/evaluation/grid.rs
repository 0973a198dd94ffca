use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{make_folds, FoldPlan};
use super::metrics::{weighted_f_measure, MetricRecord};
use crate::error::{Error, Result};
use crate::kmer::{build_fragment_matrix, build_matrix, KmerSpec, ProfileMatrix, MAX_K};
use crate::model::{ClassifierConfig, TrainedModel};
use crate::rng::mix_seed;
use crate::seq_io::{sample_fragments_from, FragmentSample, LabeledDataset};

fn yes() -> bool {
    true
}

/// Axes of an experiment. A fragment length of 0 stands for complete
/// sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub models: Vec<ClassifierConfig>,
    pub k_min: usize,
    pub k_max: usize,
    pub n_folds: usize,
    #[serde(default = "yes")]
    pub shuffle: bool,
    pub fragment_lengths: Vec<usize>,
    pub max_per_class: usize,
    pub seed: u64,
    /// Keep per-item predictions in the fold records.
    #[serde(default)]
    pub keep_predictions: bool,
}

impl GridConfig {
    pub fn new(models: Vec<ClassifierConfig>, k: RangeInclusive<usize>, n_folds: usize, seed: u64) -> Self {
        GridConfig {
            models,
            k_min: *k.start(),
            k_max: *k.end(),
            n_folds,
            shuffle: true,
            fragment_lengths: vec![0],
            max_per_class: 1000,
            seed,
            keep_predictions: false,
        }
    }

    pub fn ks(&self) -> RangeInclusive<usize> {
        self.k_min..=self.k_max
    }

    /// Checks everything that can be checked without the data.
    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return Err(Error::InvalidParameter("no models selected".into()));
        }
        for m in &self.models {
            m.validate()?;
        }
        if self.k_min < 1 || self.k_min > self.k_max || self.k_max > MAX_K {
            return Err(Error::InvalidParameter(format!(
                "k range [{}, {}] must satisfy 1 ≤ k_min ≤ k_max ≤ {MAX_K}",
                self.k_min, self.k_max
            )));
        }
        if self.k_min < 2 && self.models.iter().any(ClassifierConfig::needs_paired) {
            return Err(Error::InvalidParameter("Markov models need k ≥ 2".into()));
        }
        if self.n_folds < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 folds, got {}", self.n_folds)));
        }
        if self.fragment_lengths.is_empty() {
            return Err(Error::InvalidParameter("no fragment lengths given (use 0 for complete sequences)".into()));
        }
        let mut sorted = self.fragment_lengths.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.fragment_lengths.len() {
            return Err(Error::InvalidParameter("duplicate fragment length".into()));
        }
        if let Some(&l) = self.fragment_lengths.iter().find(|&&l| l != 0 && l < self.k_max) {
            return Err(Error::InvalidParameter(format!(
                "fragment length {l} is shorter than k_max = {}",
                self.k_max
            )));
        }
        if self.max_per_class < 1 {
            return Err(Error::InvalidParameter("max fragments per class must be ≥ 1".into()));
        }
        Ok(())
    }

    fn validate_for(&self, dataset: &LabeledDataset) -> Result<()> {
        self.validate()?;
        if let Some(s) = dataset.sequences().iter().find(|s| s.len() < self.k_max) {
            return Err(Error::SequenceTooShort {
                len: s.len(),
                k: self.k_max,
            }
            .for_item(s.id()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemPrediction {
    pub id: String,
    pub truth: usize,
    pub predicted: usize,
    pub fallback: bool,
}

/// Outcome of one (model, k, fragment length, fold) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    /// Index into [`ExperimentReport::models`].
    pub model: usize,
    pub k: usize,
    pub fragment_length: usize,
    pub fold: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Predictions made by prior fallback because every class scored −∞.
    pub n_fallback: usize,
    pub metrics: Option<MetricRecord>,
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predictions: Option<Vec<ItemPrediction>>,
}

/// Weighted F-measure over folds for one (model, k, fragment length).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub model: usize,
    pub k: usize,
    pub fragment_length: usize,
    /// Absent when any fold failed.
    pub f_mean: Option<f64>,
    /// Sample standard deviation.
    pub f_std: Option<f64>,
    pub n_folds: usize,
    pub n_errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub version: String,
    pub dataset_digest: String,
    pub classes: Vec<String>,
    pub class_sizes: Vec<usize>,
    pub grid: GridConfig,
    pub std_kind: String,
    pub fragment_sampling: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub meta: ReportMeta,
    pub models: Vec<ClassifierConfig>,
    pub folds: FoldPlan,
    /// Ordered by model, k, fragment length (in configuration order), fold.
    pub records: Vec<FoldRecord>,
    /// Ordered by model, k, fragment length.
    pub aggregates: Vec<Aggregate>,
}

impl ExperimentReport {
    pub fn aggregate(&self, model: usize, k: usize, fragment_length: usize) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.model == model && a.k == k && a.fragment_length == fragment_length)
    }

    pub fn fold_records(&self, model: usize, k: usize, fragment_length: usize) -> impl Iterator<Item = &FoldRecord> {
        self.records
            .iter()
            .filter(move |r| r.model == model && r.k == k && r.fragment_length == fragment_length)
    }

    pub fn model_index(&self, id: &str) -> Option<usize> {
        self.models.iter().position(|m| m.id() == id)
    }

    /// Mean F of the cell, if every fold succeeded.
    pub fn f_mean(&self, model: usize, k: usize, fragment_length: usize) -> Option<f64> {
        self.aggregate(model, k, fragment_length).and_then(|a| a.f_mean)
    }
}

/// Mean and sample standard deviation.
pub fn mean_and_std(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some(var.sqrt()))
}

fn fragment_seed(seed: u64, fold: usize, fragment_length: usize) -> u64 {
    mix_seed(mix_seed(seed, fold as u64 + 1), fragment_length as u64)
}

/// Test items of one fold for one fragment setting.
enum TestSet {
    Complete,
    Fragments(std::result::Result<FragmentSample, String>),
}

fn score_cell(model: &TrainedModel, test: &ProfileMatrix, keep: bool) -> Result<(MetricRecord, usize, Option<Vec<ItemPrediction>>)> {
    let preds = model.predict(test)?;
    let predicted: Vec<usize> = preds.iter().map(|p| p.class).collect();
    let metrics = weighted_f_measure(test.labels(), &predicted, test.classes().len())?;
    let n_fallback = preds.iter().filter(|p| p.fallback).count();
    let items = keep.then(|| {
        preds
            .iter()
            .enumerate()
            .map(|(i, p)| ItemPrediction {
                id: test.ids()[i].clone(),
                truth: test.labels()[i],
                predicted: p.class,
                fallback: p.fallback,
            })
            .collect()
    });
    Ok((metrics, n_fallback, items))
}

/// Runs every (model, k, fragment length) cell of the grid on one shared
/// fold plan.
///
/// Per fold, models are trained on the complete sequences of the training
/// folds and tested on the held-out sequences (fragment length 0) or on
/// fragments sampled from them. Fragments depend only on the seed, fold and
/// length, so every model and k sees the same test items. Each trained model
/// is reused for all fragment settings. Fitting and scoring failures are
/// recorded in the cell instead of aborting the run.
pub fn run_grid(dataset: &LabeledDataset, config: &GridConfig) -> Result<ExperimentReport> {
    config.validate_for(dataset)?;
    let plan = make_folds(dataset.labels(), dataset.classes(), config.n_folds, config.shuffle, config.seed)?;
    let paired = config.models.iter().any(ClassifierConfig::needs_paired);
    let classes = dataset.classes();

    let folds: Vec<usize> = (0..config.n_folds).collect();
    let test_sets: Vec<Vec<TestSet>> = folds
        .par_iter()
        .map(|&f| {
            let test_idx = plan.test_indices(f);
            config
                .fragment_lengths
                .iter()
                .map(|&len| {
                    if len == 0 {
                        TestSet::Complete
                    } else {
                        TestSet::Fragments(
                            sample_fragments_from(
                                dataset,
                                &test_idx,
                                len,
                                config.max_per_class,
                                fragment_seed(config.seed, f, len),
                            )
                            .map_err(|e| e.to_string()),
                        )
                    }
                })
                .collect()
        })
        .collect();

    let ks: Vec<usize> = config.ks().collect();
    // [k][fold][model][fragment setting]
    let cells: Vec<Vec<Vec<Vec<FoldRecord>>>> = ks
        .par_iter()
        .map(|&k| {
            let spec = KmerSpec::new(k)?;
            let full = build_matrix(dataset, spec, paired)?;
            folds
                .par_iter()
                .map(|&f| {
                    let train_idx = plan.train_indices(f);
                    let train = full.select(&train_idx);
                    let tests: Vec<std::result::Result<ProfileMatrix, String>> = test_sets[f]
                        .iter()
                        .map(|t| match t {
                            TestSet::Complete => Ok(full.select(&plan.test_indices(f))),
                            TestSet::Fragments(Err(e)) => Err(e.clone()),
                            TestSet::Fragments(Ok(s)) => {
                                build_fragment_matrix(&s.fragments, classes, spec, paired).map_err(|e| e.to_string())
                            }
                        })
                        .collect();
                    Ok(config
                        .models
                        .par_iter()
                        .enumerate()
                        .map(|(mi, cfg)| {
                            let fitted = cfg.fit(&train);
                            config
                                .fragment_lengths
                                .iter()
                                .zip(&tests)
                                .map(|(&len, test)| {
                                    let mut rec = FoldRecord {
                                        model: mi,
                                        k,
                                        fragment_length: len,
                                        fold: f,
                                        n_train: train.len(),
                                        n_test: test.as_ref().map_or(0, ProfileMatrix::len),
                                        n_fallback: 0,
                                        metrics: None,
                                        error: None,
                                        predictions: None,
                                    };
                                    let outcome = match (&fitted, test) {
                                        (Err(e), _) => Err(format!("fit: {e}")),
                                        (_, Err(e)) => Err(format!("test set: {e}")),
                                        (Ok(m), Ok(t)) => {
                                            score_cell(m, t, config.keep_predictions).map_err(|e| format!("predict: {e}"))
                                        }
                                    };
                                    match outcome {
                                        Ok((metrics, nf, items)) => {
                                            rec.metrics = Some(metrics);
                                            rec.n_fallback = nf;
                                            rec.predictions = items;
                                        }
                                        Err(e) => rec.error = Some(e),
                                    }
                                    rec
                                })
                                .collect()
                        })
                        .collect())
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut aggregates = Vec::new();
    for mi in 0..config.models.len() {
        for (ki, &k) in ks.iter().enumerate() {
            for (li, &len) in config.fragment_lengths.iter().enumerate() {
                let fold_recs: Vec<&FoldRecord> = folds.iter().map(|&f| &cells[ki][f][mi][li]).collect();
                let scores: Vec<f64> = fold_recs
                    .iter()
                    .filter_map(|r| r.metrics.as_ref().map(|m| m.weighted_f))
                    .collect();
                let n_errors = fold_recs.len() - scores.len();
                let (f_mean, f_std) = if n_errors == 0 {
                    let (m, s) = mean_and_std(&scores);
                    (Some(m), s)
                } else {
                    (None, None)
                };
                aggregates.push(Aggregate {
                    model: mi,
                    k,
                    fragment_length: len,
                    f_mean,
                    f_std,
                    n_folds: scores.len(),
                    n_errors,
                });
                records.extend(fold_recs.into_iter().cloned());
            }
        }
    }

    Ok(ExperimentReport {
        meta: ReportMeta {
            version: env!("CARGO_PKG_VERSION").to_string(),
            dataset_digest: dataset.digest(),
            classes: classes.to_vec(),
            class_sizes: dataset.class_sizes(),
            grid: config.clone(),
            std_kind: "sample".into(),
            fragment_sampling: "seeded uniform random start offsets without replacement, \
                                up to max_per_class per class per fold"
                .into(),
        },
        models: config.models.clone(),
        folds: plan,
        records,
        aggregates,
    })
}

/// Complete-sequence cross-validation of one classifier over a k range.
pub fn evaluate_complete(
    dataset: &LabeledDataset,
    config: &ClassifierConfig,
    k: RangeInclusive<usize>,
    n_folds: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    run_grid(dataset, &GridConfig::new(vec![*config], k, n_folds, seed))
}

/// Cross-validation training on complete sequences and testing on fragments
/// of the held-out sequences.
pub fn evaluate_fragments(
    dataset: &LabeledDataset,
    config: &ClassifierConfig,
    k: RangeInclusive<usize>,
    n_folds: usize,
    fragment_length: usize,
    max_per_class: usize,
    seed: u64,
) -> Result<ExperimentReport> {
    if fragment_length == 0 {
        return Err(Error::InvalidParameter("fragment length must be ≥ 1".into()));
    }
    let mut grid = GridConfig::new(vec![*config], k, n_folds, seed);
    grid.fragment_lengths = vec![fragment_length];
    grid.max_per_class = max_per_class;
    run_grid(dataset, &grid)
}
