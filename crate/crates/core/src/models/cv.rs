//! Stratified k-fold and leave-one-out cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{predict_rows, train, ModelError, ModelKind, TrainConfig};
use crate::eval::{metrics, ConfusionMatrix, MetricsReport};
use crate::features::{Dataset, NormalizationStats};

/// Held-out fold of every row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Folds {
    pub k: usize,
    pub assignment: Vec<usize>,
}

impl Folds {
    pub fn held_out(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == fold).collect()
    }

    pub fn training(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] != fold).collect()
    }
}

/// Within each class (sorted by name) the row indices are shuffled with a
/// generator seeded by `seed` and dealt round-robin into folds `0, 1, …, k-1`.
pub fn stratified_folds(labels: &[String], k: usize, seed: u64) -> Result<Folds, ModelError> {
    if k < 2 {
        return Err(ModelError::InvalidConfig(format!("k = {k}, need at least 2 folds")));
    }
    let mut classes: Vec<&String> = labels.iter().collect();
    classes.sort();
    classes.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    for class in classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == *class).collect();
        if members.len() < k {
            return Err(ModelError::ClassSmallerThanK {
                class: class.clone(),
                count: members.len(),
                k,
            });
        }
        members.shuffle(&mut rng);
        for (j, &i) in members.iter().enumerate() {
            assignment[i] = j % k;
        }
    }
    Ok(Folds { k, assignment })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CvMethod {
    StratifiedKFold,
    LeaveOneOut,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    /// Normalizer fitted on this fold's training rows.
    pub normalization: NormalizationStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowPrediction {
    pub row: usize,
    pub fold: usize,
    pub truth: String,
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub model: ModelKind,
    pub method: CvMethod,
    pub k: usize,
    pub seed: u64,
    pub positive_label: String,
    pub folds: Vec<FoldSummary>,
    pub predictions: Vec<RowPrediction>,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

fn run_folds(
    ds: &Dataset,
    cfg: &TrainConfig,
    folds: &Folds,
    method: CvMethod,
    seed: u64,
) -> Result<CvReport, ModelError> {
    let results: Vec<Result<(FoldSummary, Vec<RowPrediction>), ModelError>> = (0..folds.k)
        .into_par_iter()
        .map(|f| {
            let train_idx = folds.training(f);
            let test_idx = folds.held_out(f);
            let model = train(&ds.subset(&train_idx), cfg)?;
            let preds = predict_rows(&model, &ds.subset(&test_idx))?;
            let rows = test_idx
                .iter()
                .zip(preds)
                .map(|(&row, p)| RowPrediction {
                    row,
                    fold: f,
                    truth: ds.labels[row].clone(),
                    label: p.label,
                    score: p.score,
                })
                .collect();
            Ok((
                FoldSummary {
                    fold: f,
                    train_rows: train_idx.len(),
                    test_rows: test_idx.len(),
                    normalization: model.normalization,
                },
                rows,
            ))
        })
        .collect();

    let mut summaries = Vec::with_capacity(folds.k);
    let mut predictions = Vec::with_capacity(ds.len());
    for r in results {
        let (s, p) = r?;
        summaries.push(s);
        predictions.extend(p);
    }
    predictions.sort_by_key(|p| p.row);
    let mut cm = ConfusionMatrix::default();
    for p in &predictions {
        cm.record(p.label == cfg.positive_label, p.truth == cfg.positive_label);
    }
    Ok(CvReport {
        model: cfg.kind,
        method,
        k: folds.k,
        seed,
        positive_label: cfg.positive_label.clone(),
        folds: summaries,
        predictions,
        confusion: cm,
        metrics: metrics(&cm),
    })
}

/// Stratified k-fold cross-validation; every held-out prediction is pooled
/// into one confusion matrix.
pub fn cross_validate(ds: &Dataset, cfg: &TrainConfig, k: usize, seed: u64) -> Result<CvReport, ModelError> {
    let folds = stratified_folds(&ds.labels, k, seed)?;
    run_folds(ds, cfg, &folds, CvMethod::StratifiedKFold, seed)
}

/// Leave-one-out: each row is its own held-out fold.
pub fn cross_validate_loo(ds: &Dataset, cfg: &TrainConfig) -> Result<CvReport, ModelError> {
    let folds = Folds {
        k: ds.len(),
        assignment: (0..ds.len()).collect(),
    };
    run_folds(ds, cfg, &folds, CvMethod::LeaveOneOut, 0)
}

/// k-fold when every class has at least `k` rows, leave-one-out otherwise.
pub fn cross_validate_auto(ds: &Dataset, cfg: &TrainConfig, k: usize, seed: u64) -> Result<CvReport, ModelError> {
    let smallest = ds
        .classes()
        .iter()
        .map(|c| ds.labels.iter().filter(|l| *l == c).count())
        .min()
        .unwrap_or(0);
    if smallest >= k {
        cross_validate(ds, cfg, k, seed)
    } else {
        cross_validate_loo(ds, cfg)
    }
}
