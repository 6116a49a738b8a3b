//! Confusion-matrix construction and binary classification measures.
//!
//! Degenerate tasks (single-class truth sets, empty prediction columns)
//! come up routinely in grid experiments, so every ratio returns `None`
//! instead of panicking or aborting a run when its denominator is zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class label. Positive is the class of interest; the classifier
/// assigns it when the readout falls below the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Positive,
    Negative,
}

/// Two-class confusion counts: rows are predictions, columns are truths.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
}

impl ConfusionMatrix {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        Self {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            true_negatives: tn,
        }
    }

    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.false_negatives + self.true_negatives
    }

    /// Correct predictions over all predictions; `None` on an empty matrix.
    pub fn accuracy(&self) -> Option<f64> {
        let total = self.total();
        if total == 0 {
            return None;
        }
        Some((self.true_positives + self.true_negatives) as f64 / total as f64)
    }

    /// True positive rate (recall): `tp / (tp + fn)`.
    pub fn tpr(&self) -> Option<f64> {
        let denom = self.true_positives + self.false_negatives;
        if denom == 0 {
            return None;
        }
        Some(self.true_positives as f64 / denom as f64)
    }

    /// Positive predictive value (precision): `tp / (tp + fp)`.
    pub fn ppv(&self) -> Option<f64> {
        let denom = self.true_positives + self.false_positives;
        if denom == 0 {
            return None;
        }
        Some(self.true_positives as f64 / denom as f64)
    }

    /// Harmonic mean of precision and recall: `2tp / (2tp + fp + fn)`.
    pub fn f1(&self) -> Option<f64> {
        let denom = 2 * self.true_positives + self.false_positives + self.false_negatives;
        if denom == 0 {
            return None;
        }
        Some(2.0 * self.true_positives as f64 / denom as f64)
    }
}

/// Counts prediction/truth agreement into a confusion matrix.
pub fn confusion(predictions: &[Label], truths: &[Label]) -> Result<ConfusionMatrix> {
    if predictions.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: truths.len(),
            found: predictions.len(),
        });
    }
    if predictions.is_empty() {
        return Err(Error::EmptyInput("confusion of zero instances".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&pred, &truth) in predictions.iter().zip(truths) {
        match (pred, truth) {
            (Label::Positive, Label::Positive) => cm.true_positives += 1,
            (Label::Positive, Label::Negative) => cm.false_positives += 1,
            (Label::Negative, Label::Positive) => cm.false_negatives += 1,
            (Label::Negative, Label::Negative) => cm.true_negatives += 1,
        }
    }
    Ok(cm)
}

/// Area under the ROC curve over positive-affinity scores.
///
/// The affinity of an instance is `1 - readout` (lower readouts mean
/// "more positive" under the thresholding rule). The result is the
/// Mann-Whitney statistic, computed from tie-averaged ranks:
/// `P(affinity_pos > affinity_neg) + 0.5 * P(equal)` over all
/// positive-negative pairs. `None` when only one class is present.
pub fn roc_auc(readouts: &[f64], truths: &[Label]) -> Result<Option<f64>> {
    if readouts.len() != truths.len() {
        return Err(Error::DimensionMismatch {
            expected: truths.len(),
            found: readouts.len(),
        });
    }
    let num_pos = truths.iter().filter(|&&t| t == Label::Positive).count();
    let num_neg = truths.len() - num_pos;
    if num_pos == 0 || num_neg == 0 {
        return Ok(None);
    }

    let mut scored: Vec<(f64, Label)> = readouts
        .iter()
        .zip(truths)
        .map(|(&r, &t)| (1.0 - r, t))
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite affinities"));

    // Tie-averaged rank sum of the positives (ranks start at 1). With ties
    // averaged, rank arithmetic is exact in f64: every rank is a multiple
    // of 1/2 far below the integer-precision limit.
    let mut pos_rank_sum = 0.0f64;
    let mut idx = 0;
    while idx < scored.len() {
        let mut end = idx + 1;
        while end < scored.len() && scored[end].0 == scored[idx].0 {
            end += 1;
        }
        let avg_rank = (idx + 1 + end) as f64 / 2.0;
        let ties_pos = scored[idx..end]
            .iter()
            .filter(|(_, t)| *t == Label::Positive)
            .count();
        pos_rank_sum += avg_rank * ties_pos as f64;
        idx = end;
    }

    let u = pos_rank_sum - (num_pos * (num_pos + 1)) as f64 / 2.0;
    Ok(Some(u / (num_pos as f64 * num_neg as f64)))
}

/// All measures reported per binary task; `None` marks an undefined ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: Option<f64>,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
}

impl MetricsReport {
    pub fn from_confusion(cm: &ConfusionMatrix, auc: Option<f64>) -> Self {
        Self {
            accuracy: cm.accuracy(),
            recall: cm.tpr(),
            precision: cm.ppv(),
            f1: cm.f1(),
            auc,
        }
    }
}
