use serde::{Deserialize, Serialize};

use super::{Dataset, FeatureError};

/// Standard deviation below which a column is treated as constant.
pub const CONSTANT_STD: f64 = 1e-12;

/// Per-column z-score parameters (population standard deviation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormalizationStats {
    /// Stats that leave every column unchanged.
    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![0.0; dim],
            std: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn is_constant(&self, col: usize) -> bool {
        self.std[col] < CONSTANT_STD
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, v)| {
                if self.is_constant(j) {
                    0.0
                } else {
                    (v - self.mean[j]) / self.std[j]
                }
            })
            .collect()
    }
}

pub fn fit_normalizer(ds: &Dataset) -> Result<NormalizationStats, FeatureError> {
    let n = ds.rows.len();
    if n < 2 {
        return Err(FeatureError::TooFewRows { rows: n, needed: 2 });
    }
    let d = ds.dim();
    let mut mean = vec![0.0; d];
    for row in &ds.rows {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; d];
    for row in &ds.rows {
        for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let std = var.into_iter().map(|s| (s / n as f64).sqrt()).collect();
    Ok(NormalizationStats { mean, std })
}

pub fn apply_normalizer(ds: &Dataset, stats: &NormalizationStats) -> Result<Dataset, FeatureError> {
    if stats.dim() != ds.dim() {
        return Err(FeatureError::DimensionMismatch {
            expected: stats.dim(),
            found: ds.dim(),
        });
    }
    let mut out = ds.clone();
    out.rows = ds.rows.iter().map(|r| stats.apply_row(r)).collect();
    Ok(out)
}
