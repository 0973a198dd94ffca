use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Assignment of every row to one test fold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub n_folds: usize,
    pub assignments: Vec<usize>,
    pub stratified: bool,
    pub shuffled: bool,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_folds];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified fold plan over `labels` (class indices into `classes`).
///
/// Members of each class are dealt to folds round-robin, in dataset order or
/// after a seeded per-class shuffle. The fold cursor carries over from one
/// class to the next so that total fold sizes also stay within one of each
/// other.
pub fn make_folds(labels: &[usize], classes: &[String], n_folds: usize, shuffled: bool, seed: u64) -> Result<FoldPlan> {
    if n_folds < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 folds, got {n_folds}")));
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    for (i, &l) in labels.iter().enumerate() {
        let slot = members
            .get_mut(l)
            .ok_or_else(|| Error::UnknownClass(format!("#{l}")))?;
        slot.push(i);
    }
    // report the smallest offending class so the hint is sufficient
    if let Some((c, m)) = members
        .iter()
        .enumerate()
        .filter(|(_, m)| m.len() < n_folds)
        .min_by_key(|(c, m)| (m.len(), *c))
    {
        return Err(Error::ClassTooSmallForFolds {
            class: classes[c].clone(),
            size: m.len(),
            n_folds,
        });
    }

    let mut assignments = vec![0; labels.len()];
    let mut cursor = 0;
    for (c, mut m) in members.into_iter().enumerate() {
        if shuffled {
            m.shuffle(&mut stream_rng(seed, c as u64));
        }
        for i in m {
            assignments[i] = cursor;
            cursor = (cursor + 1) % n_folds;
        }
    }
    Ok(FoldPlan {
        n_folds,
        assignments,
        stratified: true,
        shuffled,
        seed,
    })
}
