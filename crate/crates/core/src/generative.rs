//! Multinomial Bayes and Markov chain classifiers over k-mer counts.
//!
//! Both estimate class-conditional word probabilities from per-class pooled
//! counts, either by maximum likelihood or with an additive pseudo-count α:
//!
//! ```text
//! P(u_i | T) = (c_i + α) / (C + α·m)
//! ```
//!
//! where `c_i` is the pooled count of word `i` over the class rows, `C` the
//! class total and `m` the vocabulary size. Scores are unnormalized log
//! posteriors; the multinomial coefficient is dropped since it is the same
//! for every class.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmer::{KmerProfile, KmerSpec, PairedProfile, ProfileMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothingPolicy {
    Mle,
    Bayesian { alpha: f64 },
}

impl SmoothingPolicy {
    pub fn bayesian(alpha: f64) -> Result<Self> {
        let p = SmoothingPolicy::Bayesian { alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SmoothingPolicy::Bayesian { alpha } if !(alpha > 0.0 && alpha.is_finite()) => Err(
                Error::InvalidParameter(format!("smoothing α must be positive and finite, got {alpha}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            SmoothingPolicy::Mle => None,
            SmoothingPolicy::Bayesian { alpha } => Some(alpha),
        }
    }
}

/// Log-probabilities of the words seen for one class, plus the value shared
/// by all unseen words. `default_log == None` marks unseen words impossible
/// (maximum likelihood).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "WordDensityWire", from = "WordDensityWire")]
pub struct WordDensity {
    log_probs: HashMap<u64, f64>,
    default_log: Option<f64>,
    total: u64,
}

#[derive(Serialize, Deserialize)]
struct WordDensityWire {
    total: u64,
    default_log: Option<f64>,
    words: Vec<(u64, f64)>,
}

impl From<WordDensity> for WordDensityWire {
    fn from(d: WordDensity) -> Self {
        let mut words: Vec<(u64, f64)> = d.log_probs.into_iter().collect();
        words.sort_unstable_by_key(|w| w.0);
        WordDensityWire {
            total: d.total,
            default_log: d.default_log,
            words,
        }
    }
}

impl From<WordDensityWire> for WordDensity {
    fn from(w: WordDensityWire) -> Self {
        WordDensity {
            log_probs: w.words.into_iter().collect(),
            default_log: w.default_log,
            total: w.total,
        }
    }
}

impl WordDensity {
    fn estimate(counts: &HashMap<u64, u64>, vocabulary: u64, policy: SmoothingPolicy) -> Self {
        let total: u64 = counts.values().sum();
        let c_total = total as f64;
        let (log_probs, default_log) = match policy {
            SmoothingPolicy::Mle => {
                let denom = c_total.ln();
                let lp = counts.iter().map(|(&i, &c)| (i, (c as f64).ln() - denom)).collect();
                (lp, None)
            }
            SmoothingPolicy::Bayesian { alpha } => {
                let denom = (c_total + alpha * vocabulary as f64).ln();
                let lp = counts
                    .iter()
                    .map(|(&i, &c)| (i, (c as f64 + alpha).ln() - denom))
                    .collect();
                (lp, Some(alpha.ln() - denom))
            }
        };
        WordDensity {
            log_probs,
            default_log,
            total,
        }
    }

    /// `None` when the word is impossible under this density.
    pub fn log_prob(&self, index: u64) -> Option<f64> {
        self.log_probs.get(&index).copied().or(self.default_log)
    }

    pub fn default_log(&self) -> Option<f64> {
        self.default_log
    }

    pub fn seen_words(&self) -> usize {
        self.log_probs.len()
    }

    /// Pooled training count behind the estimate.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Σ over the whole vocabulary, using the seen/unseen split.
    pub fn probability_mass(&self, vocabulary: u64) -> f64 {
        let seen: f64 = self.log_probs.values().map(|l| l.exp()).sum();
        let unseen = (vocabulary - self.log_probs.len() as u64) as f64;
        seen + self.default_log.map_or(0.0, |d| unseen * d.exp())
    }

    /// Σ_i x_i log P(u_i); `None` if any observed word is impossible.
    fn log_likelihood(&self, profile: &KmerProfile) -> Option<f64> {
        let mut s = 0.0;
        for &(i, x) in profile.counts() {
            s += x as f64 * self.log_prob(i)?;
        }
        Some(s)
    }
}

fn class_frequencies(matrix: &ProfileMatrix) -> Result<Vec<f64>> {
    if matrix.is_empty() {
        return Err(Error::EmptyInput("training matrix has no rows"));
    }
    let mut sizes = vec![0usize; matrix.classes().len()];
    for &l in matrix.labels() {
        sizes[l] += 1;
    }
    if let Some(c) = sizes.iter().position(|&n| n == 0) {
        return Err(Error::EmptyClass(matrix.classes()[c].clone()));
    }
    let n = matrix.len() as f64;
    Ok(sizes.iter().map(|&s| (s as f64 / n).ln()).collect())
}

fn pool_counts(
    rows: &[KmerProfile],
    labels: &[usize],
    classes: &[String],
    vocabulary: u64,
    policy: SmoothingPolicy,
) -> Result<Vec<WordDensity>> {
    let mut pooled: Vec<HashMap<u64, u64>> = vec![HashMap::new(); classes.len()];
    for (row, &l) in rows.iter().zip(labels) {
        let table = &mut pooled[l];
        for &(i, c) in row.counts() {
            *table.entry(i).or_insert(0) += c as u64;
        }
    }
    pooled
        .iter()
        .zip(classes)
        .map(|(counts, name)| {
            if counts.is_empty() {
                return Err(Error::ZeroCounts { class: name.clone() });
            }
            Ok(WordDensity::estimate(counts, vocabulary, policy))
        })
        .collect()
}

/// Index of the largest score; ties go to the lowest index. `None` when no
/// score is a finite or +∞ number (every class impossible).
pub fn argmax(scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s.is_nan() || s == f64::NEG_INFINITY {
            continue;
        }
        match best {
            Some(b) if scores[b] >= s => {}
            _ => best = Some(i),
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialBayesModel {
    spec: KmerSpec,
    classes: Vec<String>,
    log_priors: Vec<f64>,
    densities: Vec<WordDensity>,
    policy: SmoothingPolicy,
}

pub fn fit_multinomial_bayes(matrix: &ProfileMatrix, policy: SmoothingPolicy) -> Result<MultinomialBayesModel> {
    policy.validate()?;
    let log_priors = class_frequencies(matrix)?;
    let densities = pool_counts(
        matrix.rows(),
        matrix.labels(),
        matrix.classes(),
        matrix.spec().vocabulary_size(),
        policy,
    )?;
    Ok(MultinomialBayesModel {
        spec: matrix.spec(),
        classes: matrix.classes().to_vec(),
        log_priors,
        densities,
        policy,
    })
}

impl MultinomialBayesModel {
    pub fn spec(&self) -> KmerSpec {
        self.spec
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    pub fn policy(&self) -> SmoothingPolicy {
        self.policy
    }

    pub fn density(&self, class: usize) -> &WordDensity {
        &self.densities[class]
    }

    /// `log P(T) + Σ x_i log P(u_i | T)` per class; −∞ where an observed word
    /// is impossible.
    pub fn score(&self, profile: &KmerProfile) -> Result<Vec<f64>> {
        if profile.spec() != self.spec {
            return Err(Error::SpecMismatch {
                model: self.spec.k(),
                input: profile.spec().k(),
            });
        }
        Ok(self
            .densities
            .iter()
            .zip(&self.log_priors)
            .map(|(d, p)| d.log_likelihood(profile).map_or(f64::NEG_INFINITY, |ll| p + ll))
            .collect())
    }
}

/// (k-1)-order Markov chain classifier: word densities at k and k-1,
/// estimated independently over their own vocabularies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChainModel {
    spec: KmerSpec,
    classes: Vec<String>,
    log_priors: Vec<f64>,
    upper: Vec<WordDensity>,
    lower: Vec<WordDensity>,
    policy: SmoothingPolicy,
}

pub fn fit_markov(matrix: &ProfileMatrix, policy: SmoothingPolicy) -> Result<MarkovChainModel> {
    policy.validate()?;
    let lower_rows = matrix.lower_rows().ok_or_else(|| {
        Error::InvalidParameter("Markov models need a paired (k, k-1) profile matrix".into())
    })?;
    let log_priors = class_frequencies(matrix)?;
    let spec = matrix.spec();
    let upper = pool_counts(matrix.rows(), matrix.labels(), matrix.classes(), spec.vocabulary_size(), policy)?;
    let lower = pool_counts(
        lower_rows,
        matrix.labels(),
        matrix.classes(),
        spec.lower()?.vocabulary_size(),
        policy,
    )?;
    Ok(MarkovChainModel {
        spec,
        classes: matrix.classes().to_vec(),
        log_priors,
        upper,
        lower,
        policy,
    })
}

impl MarkovChainModel {
    pub fn spec(&self) -> KmerSpec {
        self.spec
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    pub fn policy(&self) -> SmoothingPolicy {
        self.policy
    }

    pub fn upper_density(&self, class: usize) -> &WordDensity {
        &self.upper[class]
    }

    pub fn lower_density(&self, class: usize) -> &WordDensity {
        &self.lower[class]
    }

    /// `log P(T) + Σ x_i log P(u_i|T) − Σ z_i log P(v_i|T)`. A class for which
    /// any observed k-mer or (k-1)-mer is impossible scores −∞.
    pub fn score(&self, upper: &KmerProfile, lower: &KmerProfile) -> Result<Vec<f64>> {
        if upper.spec() != self.spec {
            return Err(Error::SpecMismatch {
                model: self.spec.k(),
                input: upper.spec().k(),
            });
        }
        if lower.spec().k() + 1 != self.spec.k() {
            return Err(Error::SpecMismatch {
                model: self.spec.k() - 1,
                input: lower.spec().k(),
            });
        }
        Ok((0..self.classes.len())
            .map(|t| {
                match (self.upper[t].log_likelihood(upper), self.lower[t].log_likelihood(lower)) {
                    (Some(x), Some(z)) => self.log_priors[t] + x - z,
                    _ => f64::NEG_INFINITY,
                }
            })
            .collect())
    }

    pub fn score_paired(&self, paired: &PairedProfile) -> Result<Vec<f64>> {
        self.score(&paired.upper, &paired.lower)
    }
}
