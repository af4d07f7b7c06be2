use serde::{Deserialize, Serialize};

use super::forest::Forest;
use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: Label,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// The class never occurs in the reference labels.
    pub absent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Control first, then Target.
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub weighted_f1: f64,
    pub macro_f1: f64,
    /// `confusion[true][predicted]`, Control = 0, Target = 1.
    pub confusion: [[u64; 2]; 2],
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn idx(l: Label) -> usize {
    match l {
        Label::Control => 0,
        Label::Target => 1,
    }
}

impl Metrics {
    /// Precision, recall and F1 per class; any 0/0 counts as 0.
    pub fn from_predictions(truth: &[Label], predicted: &[Label]) -> Result<Self> {
        if truth.len() != predicted.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels but {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        if truth.is_empty() {
            return Err(Error::InsufficientData("no labels to evaluate".into()));
        }
        let mut confusion = [[0u64; 2]; 2];
        for (&t, &p) in truth.iter().zip(predicted) {
            confusion[idx(t)][idx(p)] += 1;
        }
        let per_class: Vec<ClassMetrics> = [Label::Control, Label::Target]
            .into_iter()
            .map(|label| {
                let c = idx(label);
                let tp = confusion[c][c];
                let support = confusion[c][0] + confusion[c][1];
                let predicted = confusion[0][c] + confusion[1][c];
                let precision = ratio(tp, predicted);
                let recall = ratio(tp, support);
                let f1 = if precision + recall == 0.0 {
                    0.0
                } else {
                    2.0 * precision * recall / (precision + recall)
                };
                ClassMetrics {
                    label,
                    precision,
                    recall,
                    f1,
                    support,
                    absent: support == 0,
                }
            })
            .collect();
        let n = truth.len() as f64;
        let correct = confusion[0][0] + confusion[1][1];
        Ok(Metrics {
            accuracy: correct as f64 / n,
            weighted_f1: per_class
                .iter()
                .map(|m| m.f1 * m.support as f64)
                .sum::<f64>()
                / n,
            macro_f1: per_class.iter().map(|m| m.f1).sum::<f64>() / per_class.len() as f64,
            per_class,
            confusion,
        })
    }

    pub fn class(&self, label: Label) -> &ClassMetrics {
        &self.per_class[idx(label)]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }
}

/// Score the forest on `x` with predictions `proba ≥ threshold` → Target.
pub fn evaluate(
    forest: &Forest,
    x: &[Vec<Option<f64>>],
    y: &[Label],
    threshold: f64,
) -> Result<Metrics> {
    let predicted = x
        .iter()
        .map(|row| forest.predict(row, threshold))
        .collect::<Result<Vec<_>>>()?;
    Metrics::from_predictions(y, &predicted)
}
