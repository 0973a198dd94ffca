//! Classifier configurations, the fitted-model union, prediction and the
//! versioned JSON container.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generative::{
    argmax, fit_markov, fit_multinomial_bayes, MarkovChainModel, MultinomialBayesModel, SmoothingPolicy,
};
use crate::kmer::{KmerProfile, KmerSpec, ProfileMatrix};
use crate::linear::{fit_ovr, Loss, OneVsRestModel, Penalty, PenaltyKind, Stopping};

/// Smoothing values of the study grid.
pub const ALPHA_GRID: [f64; 5] = [1e-100, 1e-10, 1e-5, 1e-2, 1.0];

fn one() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    Stopping::default().rel_tol
}
fn default_grad_tol() -> f64 {
    Stopping::default().grad_tol
}
fn default_max_iter() -> usize {
    Stopping::default().max_iter
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearConfig {
    pub penalty: PenaltyKind,
    #[serde(default = "one")]
    pub lambda: f64,
    #[serde(rename = "C", default = "one")]
    pub cost: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_grad_tol")]
    pub grad_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Penalize the intercept like a weight. Off by default.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub penalize_intercept: bool,
}

impl LinearConfig {
    pub fn new(penalty: PenaltyKind) -> Self {
        LinearConfig {
            penalty,
            lambda: 1.0,
            cost: 1.0,
            tol: default_tol(),
            grad_tol: default_grad_tol(),
            max_iter: default_max_iter(),
            penalize_intercept: false,
        }
    }

    pub fn penalty(&self) -> Result<Penalty> {
        Ok(Penalty::new(self.penalty, self.lambda, self.cost)?.with_penalized_intercept(self.penalize_intercept))
    }

    pub fn stopping(&self) -> Stopping {
        Stopping {
            rel_tol: self.tol,
            grad_tol: self.grad_tol,
            max_iter: self.max_iter,
        }
    }
}

/// One classifier with its hyper-parameters. `alpha: None` selects maximum
/// likelihood for the generative families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ClassifierConfig {
    MultinomialBayes {
        #[serde(default)]
        alpha: Option<f64>,
    },
    Markov {
        #[serde(default)]
        alpha: Option<f64>,
    },
    LogisticRegression(LinearConfig),
    LinearSvm(LinearConfig),
}

fn fmt_alpha(a: f64) -> String {
    if a == 1.0 {
        "1".into()
    } else {
        format!("{a:e}")
    }
}

impl ClassifierConfig {
    pub fn multinomial(alpha: Option<f64>) -> Self {
        ClassifierConfig::MultinomialBayes { alpha }
    }

    pub fn markov(alpha: Option<f64>) -> Self {
        ClassifierConfig::Markov { alpha }
    }

    pub fn logistic(penalty: PenaltyKind) -> Self {
        ClassifierConfig::LogisticRegression(LinearConfig::new(penalty))
    }

    pub fn svm(penalty: PenaltyKind) -> Self {
        ClassifierConfig::LinearSvm(LinearConfig::new(penalty))
    }

    /// The sixteen variants of the study: MB and Markov each with MLE and the
    /// five α values, then LR and LSVM with L1 and L2.
    pub fn study_variants() -> Vec<ClassifierConfig> {
        let alphas = std::iter::once(None).chain(ALPHA_GRID.iter().map(|&a| Some(a)));
        let mut v: Vec<_> = alphas.clone().map(Self::multinomial).collect();
        v.extend(alphas.map(Self::markov));
        for kind in [PenaltyKind::L1, PenaltyKind::L2] {
            v.push(Self::logistic(kind));
        }
        for kind in [PenaltyKind::L1, PenaltyKind::L2] {
            v.push(Self::svm(kind));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ClassifierConfig::MultinomialBayes { alpha } | ClassifierConfig::Markov { alpha } => {
                self.policy_for(*alpha)?;
            }
            ClassifierConfig::LogisticRegression(c) | ClassifierConfig::LinearSvm(c) => {
                c.penalty()?;
                if !(c.tol > 0.0 && c.grad_tol > 0.0) || c.max_iter == 0 {
                    return Err(Error::InvalidParameter(
                        "tolerances must be positive and max_iter ≥ 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn policy_for(&self, alpha: Option<f64>) -> Result<SmoothingPolicy> {
        match alpha {
            None => Ok(SmoothingPolicy::Mle),
            Some(a) => SmoothingPolicy::bayesian(a),
        }
    }

    pub fn needs_paired(&self) -> bool {
        matches!(self, ClassifierConfig::Markov { .. })
    }

    /// Family column of reports: MB, Markov, LR or LSVM.
    pub fn family_name(&self) -> &'static str {
        match self {
            ClassifierConfig::MultinomialBayes { .. } => "MB",
            ClassifierConfig::Markov { .. } => "Markov",
            ClassifierConfig::LogisticRegression(_) => "LR",
            ClassifierConfig::LinearSvm(_) => "LSVM",
        }
    }

    /// Unique name such as `MB_MLE`, `Markov_alpha=1e-10`, `LSVM_L2` or
    /// `LR_L1(C=10;lambda=0.5)`.
    pub fn id(&self) -> String {
        match self {
            ClassifierConfig::MultinomialBayes { alpha } | ClassifierConfig::Markov { alpha } => match alpha {
                None => format!("{}_MLE", self.family_name()),
                Some(a) => format!("{}_alpha={}", self.family_name(), fmt_alpha(*a)),
            },
            ClassifierConfig::LogisticRegression(c) | ClassifierConfig::LinearSvm(c) => {
                let base = format!("{}_{}", self.family_name(), c.penalty.short_name());
                let mut extra = Vec::new();
                if c.cost != 1.0 {
                    extra.push(format!("C={}", c.cost));
                }
                if c.lambda != 1.0 {
                    extra.push(format!("lambda={}", c.lambda));
                }
                if c.penalize_intercept {
                    extra.push("penalized_intercept".to_string());
                }
                if extra.is_empty() {
                    base
                } else {
                    format!("{base}({})", extra.join(";"))
                }
            }
        }
    }

    pub fn loss(&self) -> Option<Loss> {
        match self {
            ClassifierConfig::LogisticRegression(_) => Some(Loss::Logistic),
            ClassifierConfig::LinearSvm(_) => Some(Loss::SquaredHinge),
            _ => None,
        }
    }

    pub fn linear(&self) -> Option<&LinearConfig> {
        match self {
            ClassifierConfig::LogisticRegression(c) | ClassifierConfig::LinearSvm(c) => Some(c),
            _ => None,
        }
    }

    pub fn alpha(&self) -> Option<Option<f64>> {
        match self {
            ClassifierConfig::MultinomialBayes { alpha } | ClassifierConfig::Markov { alpha } => Some(*alpha),
            _ => None,
        }
    }

    pub fn fit(&self, matrix: &ProfileMatrix) -> Result<TrainedModel> {
        self.validate()?;
        if matrix.classes().len() < 2 {
            return Err(Error::TooFewClasses(matrix.classes().len()));
        }
        Ok(match self {
            ClassifierConfig::MultinomialBayes { alpha } => {
                TrainedModel::MultinomialBayes(fit_multinomial_bayes(matrix, self.policy_for(*alpha)?)?)
            }
            ClassifierConfig::Markov { alpha } => TrainedModel::Markov(fit_markov(matrix, self.policy_for(*alpha)?)?),
            ClassifierConfig::LogisticRegression(c) => {
                TrainedModel::OneVsRest(fit_ovr(matrix, Loss::Logistic, c.penalty()?, &c.stopping())?)
            }
            ClassifierConfig::LinearSvm(c) => {
                TrainedModel::OneVsRest(fit_ovr(matrix, Loss::SquaredHinge, c.penalty()?, &c.stopping())?)
            }
        })
    }
}

impl fmt::Display for ClassifierConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: usize,
    /// Every class scored −∞; the class with the largest prior was chosen.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "parameters", rename_all = "snake_case")]
pub enum TrainedModel {
    MultinomialBayes(MultinomialBayesModel),
    Markov(MarkovChainModel),
    OneVsRest(OneVsRestModel),
}

impl TrainedModel {
    pub fn spec(&self) -> KmerSpec {
        match self {
            TrainedModel::MultinomialBayes(m) => m.spec(),
            TrainedModel::Markov(m) => m.spec(),
            TrainedModel::OneVsRest(m) => m.spec(),
        }
    }

    pub fn classes(&self) -> &[String] {
        match self {
            TrainedModel::MultinomialBayes(m) => m.classes(),
            TrainedModel::Markov(m) => m.classes(),
            TrainedModel::OneVsRest(m) => m.classes(),
        }
    }

    pub fn needs_paired(&self) -> bool {
        matches!(self, TrainedModel::Markov(_))
    }

    /// Per-class scores. `lower` is required for Markov models.
    pub fn scores(&self, upper: &KmerProfile, lower: Option<&KmerProfile>) -> Result<Vec<f64>> {
        match self {
            TrainedModel::MultinomialBayes(m) => m.score(upper),
            TrainedModel::Markov(m) => {
                let lower = lower.ok_or_else(|| {
                    Error::InvalidParameter("Markov scoring needs the (k-1)-mer profile".into())
                })?;
                m.score(upper, lower)
            }
            TrainedModel::OneVsRest(m) => m.decision_function(upper),
        }
    }

    fn fallback_class(&self) -> usize {
        match self {
            TrainedModel::MultinomialBayes(m) => argmax(m.log_priors()).unwrap_or(0),
            TrainedModel::Markov(m) => argmax(m.log_priors()).unwrap_or(0),
            TrainedModel::OneVsRest(_) => 0,
        }
    }

    pub fn predict_scores(&self, scores: &[f64]) -> Prediction {
        match argmax(scores) {
            Some(class) => Prediction { class, fallback: false },
            None => Prediction {
                class: self.fallback_class(),
                fallback: true,
            },
        }
    }

    pub fn predict_one(&self, upper: &KmerProfile, lower: Option<&KmerProfile>) -> Result<Prediction> {
        Ok(self.predict_scores(&self.scores(upper, lower)?))
    }

    /// Predicts every row of a matrix.
    pub fn predict(&self, matrix: &ProfileMatrix) -> Result<Vec<Prediction>> {
        if self.needs_paired() && !matrix.is_paired() {
            return Err(Error::InvalidParameter(
                "Markov prediction needs a paired profile matrix".into(),
            ));
        }
        (0..matrix.len())
            .map(|i| {
                let lower = matrix.lower_rows().map(|l| &l[i]);
                self.predict_one(&matrix.rows()[i], lower)
                    .map_err(|e| e.for_item(&matrix.ids()[i]))
            })
            .collect()
    }
}

pub const CONTAINER_FORMAT: &str = "kmerlin-model";
pub const CONTAINER_VERSION: u32 = 1;

/// Serialized form of a fitted model together with the configuration that
/// produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelContainer {
    pub format: String,
    pub version: u32,
    pub config: ClassifierConfig,
    pub k: usize,
    pub model: TrainedModel,
}

impl ModelContainer {
    pub fn new(config: ClassifierConfig, model: TrainedModel) -> Self {
        ModelContainer {
            format: CONTAINER_FORMAT.into(),
            version: CONTAINER_VERSION,
            k: model.spec().k(),
            config,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ModelContainer = serde_json::from_str(text)?;
        if c.format != CONTAINER_FORMAT {
            return Err(Error::InvalidParameter(format!("not a model container: format {:?}", c.format)));
        }
        if c.version != CONTAINER_VERSION {
            return Err(Error::UnsupportedVersion(c.version));
        }
        if c.k != c.model.spec().k() {
            return Err(Error::SpecMismatch {
                model: c.model.spec().k(),
                input: c.k,
            });
        }
        Ok(c)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_json()?.as_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kmer::build_matrix;
    use crate::seq_io::{LabeledDataset, Sequence};

    fn toy() -> LabeledDataset {
        let items = [
            ("AAAAACAAAAACAAG", "a"),
            ("AACAAAAAACAAGAA", "a"),
            ("GGGGTGGGGTGGAGG", "b"),
            ("GTGGGGGTGGGGAGG", "b"),
        ];
        let seqs = items
            .iter()
            .enumerate()
            .map(|(i, (s, _))| Sequence::new(format!("s{i}"), s.as_bytes().to_vec()).unwrap())
            .collect();
        let labels: Vec<&str> = items.iter().map(|i| i.1).collect();
        LabeledDataset::new(seqs, &labels).unwrap()
    }

    #[test]
    fn sixteen_study_variants_with_unique_ids() {
        let v = ClassifierConfig::study_variants();
        assert_eq!(v.len(), 16);
        let ids: std::collections::HashSet<String> = v.iter().map(|c| c.id()).collect();
        assert_eq!(ids.len(), 16);
        assert!(ids.contains("MB_alpha=1e-100"));
        assert!(ids.contains("Markov_alpha=1"));
        assert!(ids.contains("LSVM_L2"));
    }

    #[test]
    fn config_json_defaults() {
        let c: ClassifierConfig = serde_json::from_str(r#"{"family":"linear_svm","penalty":"l2"}"#).unwrap();
        assert_eq!(c, ClassifierConfig::svm(PenaltyKind::L2));
        let c: ClassifierConfig = serde_json::from_str(r#"{"family":"markov"}"#).unwrap();
        assert_eq!(c, ClassifierConfig::markov(None));
        assert!(ClassifierConfig::multinomial(Some(-1.0)).validate().is_err());
    }

    #[test]
    fn container_round_trip_every_family() {
        let ds = toy();
        for cfg in ClassifierConfig::study_variants() {
            let mat = build_matrix(&ds, KmerSpec::new(3).unwrap(), cfg.needs_paired()).unwrap();
            let model = cfg.fit(&mat).unwrap();
            let c = ModelContainer::new(cfg, model);
            let back = ModelContainer::from_json(&c.to_json().unwrap()).unwrap();
            assert_eq!(back, c, "{}", cfg.id());
            assert_eq!(back.model.predict(&mat).unwrap(), c.model.predict(&mat).unwrap());
        }
    }

    #[test]
    fn container_rejects_other_versions() {
        let ds = toy();
        let mat = build_matrix(&ds, KmerSpec::new(2).unwrap(), false).unwrap();
        let cfg = ClassifierConfig::multinomial(Some(1.0));
        let mut c = ModelContainer::new(cfg, cfg.fit(&mat).unwrap());
        c.version = 9;
        assert!(matches!(
            ModelContainer::from_json(&c.to_json().unwrap()),
            Err(Error::UnsupportedVersion(9))
        ));
    }

    #[test]
    fn mle_fallback_flagged() {
        let ds = toy();
        let mat = build_matrix(&ds, KmerSpec::new(3).unwrap(), false).unwrap();
        let m = ClassifierConfig::multinomial(None).fit(&mat).unwrap();
        let p = crate::kmer::build_profile(b"TTTTTT", KmerSpec::new(3).unwrap()).unwrap();
        let pred = m.predict_one(&p, None).unwrap();
        assert!(pred.fallback);
        assert_eq!(pred.class, 0);
    }
}
