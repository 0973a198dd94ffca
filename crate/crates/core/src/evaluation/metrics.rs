use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub support: usize,
}

/// Per-class and support-weighted precision, recall and F-measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub per_class: Vec<ClassMetrics>,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f: f64,
}

/// `2RP / (R + P)`, or 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * recall * precision / (recall + precision)
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Classes with zero support carry weight 0 in the aggregates.
pub fn weighted_f_measure(truth: &[usize], predicted: &[usize], n_classes: usize) -> Result<MetricRecord> {
    if truth.len() != predicted.len() {
        return Err(Error::InvalidParameter(format!(
            "{} true labels but {} predictions",
            truth.len(),
            predicted.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::EmptyInput("no predictions to score"));
    }
    let mut tp = vec![0usize; n_classes];
    let mut pred_count = vec![0usize; n_classes];
    let mut support = vec![0usize; n_classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::UnknownClass(format!("#{}", t.max(p))));
        }
        support[t] += 1;
        pred_count[p] += 1;
        if t == p {
            tp[t] += 1;
        }
    }
    let per_class: Vec<ClassMetrics> = (0..n_classes)
        .map(|c| {
            let precision = ratio(tp[c], pred_count[c]);
            let recall = ratio(tp[c], support[c]);
            ClassMetrics {
                precision,
                recall,
                f_measure: f_measure(precision, recall),
                support: support[c],
            }
        })
        .collect();
    let n = truth.len() as f64;
    let weighted = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(|m| m.support as f64 * f(m)).sum::<f64>() / n;
    Ok(MetricRecord {
        weighted_precision: weighted(|m| m.precision),
        weighted_recall: weighted(|m| m.recall),
        weighted_f: weighted(|m| m.f_measure),
        per_class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_hand_examples() {
        let r = weighted_f_measure(&[0, 1, 2, 1], &[0, 1, 2, 1], 3).unwrap();
        assert_eq!(r.weighted_f, 1.0);

        // supports {3, 1}; class 1 always mispredicted, class 0 perfect
        // would need no false positives, so use three classes
        let r = weighted_f_measure(&[0, 0, 0, 1], &[0, 0, 0, 2], 3).unwrap();
        assert_eq!(r.per_class[0].f_measure, 1.0);
        assert_eq!(r.per_class[1].f_measure, 0.0);
        assert_eq!(r.weighted_f, 0.75);
    }

    #[test]
    fn zero_denominators() {
        let r = weighted_f_measure(&[0, 0], &[1, 1], 2).unwrap();
        assert_eq!(r.per_class[0].precision, 0.0);
        assert_eq!(r.per_class[1].recall, 0.0);
        assert_eq!(r.weighted_f, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(weighted_f_measure(&[0], &[0, 1], 2).is_err());
        assert!(weighted_f_measure(&[0, 3], &[0, 1], 2).is_err());
        assert!(weighted_f_measure(&[], &[], 2).is_err());
    }
}
