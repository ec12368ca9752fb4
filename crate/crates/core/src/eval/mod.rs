//! Confusion matrices, binary metrics and the per-group / pooled report tables.

pub mod report;

pub use report::{per_group_report, pooled_report, recall_bar_svg, ReportRow, ReportTable};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("{predictions} predictions for {truths} truths")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("nothing to evaluate")]
    Empty,
}

/// Binary confusion counts, positive class first.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Positive-class count in the truth labels.
    pub fn support(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn record(&mut self, predicted_positive: bool, truly_positive: bool) {
        match (predicted_positive, truly_positive) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

impl std::ops::Add for ConfusionMatrix {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

/// Counts predictions against truths, treating `positive` as the positive class.
pub fn confusion<T: PartialEq>(
    predictions: &[T],
    truths: &[T],
    positive: &T,
) -> Result<ConfusionMatrix, EvalError> {
    if predictions.len() != truths.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    if predictions.is_empty() {
        return Err(EvalError::Empty);
    }
    let mut cm = ConfusionMatrix::default();
    for (p, t) in predictions.iter().zip(truths) {
        cm.record(p == positive, t == positive);
    }
    Ok(cm)
}

/// Which ratios hit 0/0 and were replaced by the convention value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroDivision {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl ZeroDivision {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }

    /// `;`-separated flag names, empty when nothing was substituted.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if self.precision {
            parts.push("precision_zero_division");
        }
        if self.recall {
            parts.push("recall_zero_division");
        }
        if self.f1 {
            parts.push("f1_zero_division");
        }
        parts.join(";")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub support: usize,
    pub zero_division: ZeroDivision,
}

/// Harmonic mean of precision and recall; `None` when both are zero.
pub fn f1_score(precision: f64, recall: f64) -> Option<f64> {
    let s = precision + recall;
    (s > 0.0).then(|| 2.0 * precision * recall / s)
}

/// Binary metrics with `zero_division` substituted for any 0/0 ratio.
pub fn metrics_with(cm: &ConfusionMatrix, zero_division: f64) -> MetricsReport {
    let mut flags = ZeroDivision::default();
    let ratio = |num: usize, den: usize, flag: &mut bool| {
        if den == 0 {
            *flag = true;
            zero_division
        } else {
            num as f64 / den as f64
        }
    };
    let precision = ratio(cm.tp, cm.tp + cm.fp, &mut flags.precision);
    let recall = ratio(cm.tp, cm.tp + cm.fn_, &mut flags.recall);
    let f1 = f1_score(precision, recall).unwrap_or_else(|| {
        flags.f1 = true;
        zero_division
    });
    let total = cm.total();
    MetricsReport {
        precision,
        recall,
        f1,
        accuracy: if total == 0 { zero_division } else { (cm.tp + cm.tn) as f64 / total as f64 },
        support: cm.support(),
        zero_division: flags,
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> MetricsReport {
    metrics_with(cm, 0.0)
}
