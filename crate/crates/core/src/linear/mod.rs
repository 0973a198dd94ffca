//! Regularized linear classifiers: logistic regression and squared-hinge
//! linear SVM, each with an L1 or squared-L2 penalty, trained one class
//! against the rest.

mod design;
pub mod objective;
pub mod optimizer;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use design::{Design, FeatureIndex};
pub use objective::{Loss, Penalty, PenaltyKind, Problem};
pub use optimizer::{intercept_only_optimum, minimize, Solution, Stopping};

use crate::error::{Error, Result};
use crate::generative::argmax;
use crate::kmer::{KmerProfile, KmerSpec, ProfileMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryLinearModel {
    #[serde(with = "sparse_weights")]
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub loss: Loss,
    pub penalty: Penalty,
    pub converged: bool,
    pub iterations: usize,
    pub objective: f64,
}

impl BinaryLinearModel {
    /// `wᵀx + w0` for a row already mapped to weight columns.
    pub fn decision(&self, mapped: &[(u32, f64)]) -> f64 {
        self.intercept
            + mapped
                .iter()
                .map(|&(c, v)| v * self.weights[c as usize])
                .sum::<f64>()
    }

    pub fn nonzero_weights(&self) -> usize {
        self.weights.iter().filter(|w| **w != 0.0).count()
    }
}

/// Fits one binary model on a design matrix with ±1 targets.
pub fn fit_binary_design(
    design: &Design,
    targets: &[f64],
    loss: Loss,
    penalty: Penalty,
    stopping: &Stopping,
) -> Result<(BinaryLinearModel, Vec<f64>)> {
    penalty.validate()?;
    if stopping.rel_tol <= 0.0 || stopping.grad_tol <= 0.0 {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    if targets.len() != design.n_rows() {
        return Err(Error::InvalidParameter("one target per row required".into()));
    }
    if targets.iter().any(|&t| t != 1.0 && t != -1.0) {
        return Err(Error::InvalidParameter("targets must be ±1".into()));
    }
    if !(targets.contains(&1.0) && targets.contains(&-1.0)) {
        return Err(Error::TooFewClasses(1));
    }
    design.check_finite()?;
    let problem = Problem {
        design,
        targets,
        loss,
        penalty,
    };
    let sol = minimize(&problem, stopping);
    Ok((
        BinaryLinearModel {
            weights: sol.weights,
            intercept: sol.intercept,
            loss,
            penalty,
            converged: sol.converged,
            iterations: sol.iterations,
            objective: sol.objective,
        },
        sol.trace,
    ))
}

/// Fits a binary model on profile rows; the weight columns follow
/// `FeatureIndex::from_profiles(matrix.rows())`.
pub fn fit_binary(
    matrix: &ProfileMatrix,
    targets: &[f64],
    loss: Loss,
    penalty: Penalty,
    stopping: &Stopping,
) -> Result<BinaryLinearModel> {
    let features = FeatureIndex::from_profiles(matrix.rows());
    let design = Design::from_profiles(matrix.rows(), &features);
    fit_binary_design(&design, targets, loss, penalty, stopping).map(|r| r.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsRestModel {
    spec: KmerSpec,
    classes: Vec<String>,
    features: FeatureIndex,
    models: Vec<BinaryLinearModel>,
}

pub fn fit_ovr(
    matrix: &ProfileMatrix,
    loss: Loss,
    penalty: Penalty,
    stopping: &Stopping,
) -> Result<OneVsRestModel> {
    let classes = matrix.classes();
    if classes.len() < 2 {
        return Err(Error::TooFewClasses(classes.len()));
    }
    if matrix.is_empty() {
        return Err(Error::EmptyInput("training matrix has no rows"));
    }
    let features = FeatureIndex::from_profiles(matrix.rows());
    let design = Design::from_profiles(matrix.rows(), &features);
    let models = (0..classes.len())
        .into_par_iter()
        .map(|c| {
            let targets: Vec<f64> = matrix
                .labels()
                .iter()
                .map(|&l| if l == c { 1.0 } else { -1.0 })
                .collect();
            fit_binary_design(&design, &targets, loss, penalty, stopping)
                .map(|r| r.0)
                .map_err(|e| Error::ClassFit {
                    class: classes[c].clone(),
                    source: Box::new(e),
                })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(OneVsRestModel {
        spec: matrix.spec(),
        classes: classes.to_vec(),
        features,
        models,
    })
}

impl OneVsRestModel {
    pub fn spec(&self) -> KmerSpec {
        self.spec
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn features(&self) -> &FeatureIndex {
        &self.features
    }

    pub fn models(&self) -> &[BinaryLinearModel] {
        &self.models
    }

    pub fn all_converged(&self) -> bool {
        self.models.iter().all(|m| m.converged)
    }

    /// `w_jᵀx + w0_j` per class; words unseen in training are dropped.
    pub fn decision_function(&self, profile: &KmerProfile) -> Result<Vec<f64>> {
        if profile.spec() != self.spec {
            return Err(Error::SpecMismatch {
                model: self.spec.k(),
                input: profile.spec().k(),
            });
        }
        let mapped = self.features.map_profile(profile);
        Ok(self.models.iter().map(|m| m.decision(&mapped)).collect())
    }

    pub fn predict_one(&self, profile: &KmerProfile) -> Result<usize> {
        let s = self.decision_function(profile)?;
        Ok(argmax(&s).unwrap_or(0))
    }
}

/// Weights are stored as `{len, entries: [[index, value], ...]}` holding the
/// entries whose bit pattern is non-zero, which keeps L1 models small.
mod sparse_weights {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wire {
        len: usize,
        entries: Vec<(usize, f64)>,
    }

    pub fn serialize<S: Serializer>(w: &[f64], s: S) -> Result<S::Ok, S::Error> {
        Wire {
            len: w.len(),
            entries: w
                .iter()
                .enumerate()
                .filter(|(_, v)| v.to_bits() != 0)
                .map(|(i, &v)| (i, v))
                .collect(),
        }
        .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let wire = Wire::deserialize(d)?;
        let mut w = vec![0.0; wire.len];
        for (i, v) in wire.entries {
            *w.get_mut(i)
                .ok_or_else(|| serde::de::Error::custom(format!("weight index {i} ≥ {}", wire.len)))? = v;
        }
        Ok(w)
    }
}
