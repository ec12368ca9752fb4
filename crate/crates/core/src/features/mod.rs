//! Window feature extraction and dataset handling.
//!
//! Every window yields, for each channel in `x, y, z, amag`, the seven
//! statistical features, lag-1 autocorrelation, zero crossings and the
//! spectral set (with `n_cepstral` cepstral coefficients), followed by the
//! three pairwise axis correlations. Column names are `<channel>.<feature>`
//! and are part of the feature file format.

pub mod normalize;
pub mod spectral;
pub mod stats;
pub mod temporal;

mod dataset;

pub use dataset::{read_features_csv, write_features_csv, Dataset, UNLABELED};
pub use normalize::{apply_normalizer, fit_normalizer, NormalizationStats};
pub use spectral::{spectral_features, SpectralAnalyzer, SpectralFeatures};
pub use stats::{stat_features, StatFeatures};
pub use temporal::{autocorr_lag1, pearson, zero_crossings};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::preprocess::LabeledWindow;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("no windows to featurize")]
    EmptyInput,
    #[error("window {index} has {found} samples, expected {expected}")]
    MixedWindowLength {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("windows of {0} samples are too short for spectral features (need 4)")]
    WindowTooShort(usize),
    #[error("{rows} rows, need at least {needed}")]
    TooFewRows { rows: usize, needed: usize },
    #[error("expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dataset columns are inconsistent: {0}")]
    Inconsistent(String),
    #[error("feature file line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error("invalid feature config: {0}")]
    InvalidConfig(String),
}

pub const CHANNELS: [&str; 4] = ["x", "y", "z", "amag"];
pub const AXIS_PAIRS: [(&str, usize, usize); 3] = [("xy", 0, 1), ("xz", 0, 2), ("yz", 1, 2)];
pub const MIN_WINDOW: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub sample_rate_hz: f64,
    pub n_cepstral: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: 12.5,
            n_cepstral: 4,
        }
    }
}

impl FeatureConfig {
    /// Features extracted per channel.
    pub fn per_channel(&self) -> usize {
        StatFeatures::NAMES.len() + 2 + 5 + self.n_cepstral
    }

    pub fn schema(&self) -> FeatureSchema {
        let mut names = Vec::with_capacity(CHANNELS.len() * self.per_channel() + AXIS_PAIRS.len());
        for ch in CHANNELS {
            for f in StatFeatures::NAMES {
                names.push(format!("{ch}.{f}"));
            }
            names.push(format!("{ch}.autocorr"));
            names.push(format!("{ch}.zero_crossings"));
            names.push(format!("{ch}.max_frequency"));
            names.push(format!("{ch}.median_frequency"));
            for k in 0..self.n_cepstral {
                names.push(format!("{ch}.cepstral_{k}"));
            }
            names.push(format!("{ch}.max_power"));
            names.push(format!("{ch}.power_bandwidth"));
            names.push(format!("{ch}.fundamental_frequency"));
        }
        for (pair, _, _) in AXIS_PAIRS {
            names.push(format!("{pair}.pairwise_corr"));
        }
        FeatureSchema::new(names)
    }

    pub fn validate(&self, window_len: usize) -> Result<(), FeatureError> {
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(FeatureError::InvalidConfig(format!(
                "sample rate {}",
                self.sample_rate_hz
            )));
        }
        if self.n_cepstral > window_len {
            return Err(FeatureError::InvalidConfig(format!(
                "{} cepstral coefficients from {window_len}-sample windows",
                self.n_cepstral
            )));
        }
        if window_len < MIN_WINDOW {
            return Err(FeatureError::WindowTooShort(window_len));
        }
        Ok(())
    }
}

/// Ordered, unique feature column names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    names: Vec<String>,
}

impl FeatureSchema {
    pub fn new(names: Vec<String>) -> Self {
        Self { names }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Hex SHA-256 over the newline-joined column names.
    pub fn hash(&self) -> SchemaHash {
        let mut h = Sha256::new();
        for (i, n) in self.names.iter().enumerate() {
            if i > 0 {
                h.update(b"\n");
            }
            h.update(n.as_bytes());
        }
        SchemaHash(hex::encode(h.finalize()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SchemaHash(pub String);

impl std::fmt::Display for SchemaHash {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Feature values tagged with the schema they were extracted under.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub schema_hash: SchemaHash,
    pub values: Vec<f64>,
}

/// Extracts one row of features using a pre-planned analyzer.
pub fn extract_window(window: &LabeledWindow, cfg: &FeatureConfig, analyzer: &SpectralAnalyzer) -> Vec<f64> {
    let channels = [&window.x, &window.y, &window.z, &window.amag];
    let mut row = Vec::with_capacity(CHANNELS.len() * cfg.per_channel() + AXIS_PAIRS.len());
    for seq in channels {
        row.extend(stat_features(seq).values());
        row.push(autocorr_lag1(seq));
        row.push(zero_crossings(seq) as f64);
        let sp = analyzer.features(seq, cfg.sample_rate_hz, cfg.n_cepstral);
        row.push(sp.max_frequency);
        row.push(sp.median_frequency);
        row.extend(sp.cepstral);
        row.push(sp.max_power);
        row.push(sp.power_bandwidth);
        row.push(sp.fundamental_frequency);
    }
    for (_, a, b) in AXIS_PAIRS {
        row.push(pearson(channels[a], channels[b]));
    }
    row
}

/// Single-window extraction producing a schema-tagged vector.
pub fn feature_vector(window: &LabeledWindow, cfg: &FeatureConfig) -> Result<FeatureVector, FeatureError> {
    cfg.validate(window.len())?;
    let analyzer = SpectralAnalyzer::new(window.len());
    Ok(FeatureVector {
        schema_hash: cfg.schema().hash(),
        values: extract_window(window, cfg, &analyzer),
    })
}

/// Featurizes windows in parallel; row order follows window order and the
/// result is identical to a sequential pass.
pub fn featurize(windows: &[LabeledWindow], cfg: &FeatureConfig) -> Result<Dataset, FeatureError> {
    let first = windows.first().ok_or(FeatureError::EmptyInput)?;
    let len = first.len();
    for (index, w) in windows.iter().enumerate() {
        for ch in [&w.x, &w.y, &w.z, &w.amag] {
            if ch.len() != len {
                return Err(FeatureError::MixedWindowLength {
                    index,
                    expected: len,
                    found: ch.len(),
                });
            }
        }
    }
    cfg.validate(len)?;
    let analyzer = SpectralAnalyzer::new(len);
    let rows: Vec<Vec<f64>> = windows
        .par_iter()
        .map(|w| extract_window(w, cfg, &analyzer))
        .collect();
    Dataset::new(
        cfg.schema(),
        rows,
        windows
            .iter()
            .map(|w| w.label.map_or(UNLABELED.to_string(), |l| l.as_str().to_string()))
            .collect(),
        windows.iter().map(|w| w.recording_id.clone()).collect(),
        windows.iter().map(|w| w.start_index).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{RawRecording, Sample};
    use crate::preprocess::{make_windows, WindowSpec};
    use std::collections::HashSet;

    fn windows(n: usize) -> Vec<LabeledWindow> {
        let samples = (0..n)
            .map(|i| {
                let t = i as f64;
                Sample::new(i as f64 * 80.0, (t * 0.7).sin(), (t * 1.3).cos() * 0.5, 1.0 + 0.1 * (t * 2.9).sin())
            })
            .collect();
        let rec = RawRecording::new("d", 12.5, samples).unwrap();
        make_windows(&rec, "r", &WindowSpec::default()).unwrap()
    }

    #[test]
    fn schema_size_and_uniqueness() {
        let cfg = FeatureConfig::default();
        let schema = cfg.schema();
        assert_eq!(schema.len(), 4 * 18 + 3);
        let unique: HashSet<_> = schema.names().iter().collect();
        assert_eq!(unique.len(), schema.len());
        assert!(schema.names().contains(&"amag.kurtosis".to_string()));
        assert!(schema.names().contains(&"x.zero_crossings".to_string()));
        assert!(schema.names().contains(&"xy.pairwise_corr".to_string()));
        // a single cepstral coefficient gives the 15-per-channel layout
        let one = FeatureConfig { n_cepstral: 1, ..cfg };
        assert_eq!(one.schema().len(), 63);
    }

    #[test]
    fn five_windows() {
        let ds = featurize(&windows(36), &FeatureConfig::default()).unwrap();
        assert_eq!(ds.rows.len(), 5);
        assert!(ds.rows.iter().all(|r| r.len() == 75 && r.iter().all(|v| v.is_finite())));
        assert_eq!(ds.starts, vec![0, 6, 12, 18, 24]);
    }

    #[test]
    fn mixed_lengths_rejected() {
        let mut ws = windows(36);
        ws[2].amag.pop();
        assert_eq!(
            featurize(&ws, &FeatureConfig::default()),
            Err(FeatureError::MixedWindowLength { index: 2, expected: 12, found: 11 })
        );
        assert_eq!(featurize(&[], &FeatureConfig::default()), Err(FeatureError::EmptyInput));
    }

    #[test]
    fn all_zero_window_is_finite() {
        let samples = (0..12).map(|i| Sample::new(i as f64 * 80.0, 0.0, 0.0, 0.0)).collect();
        let rec = RawRecording::new("d", 12.5, samples).unwrap();
        let ws = make_windows(&rec, "r", &WindowSpec::default()).unwrap();
        let ds = featurize(&ws, &FeatureConfig::default()).unwrap();
        assert_eq!(ds.rows.len(), 1);
        assert!(ds.rows[0].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn parallel_matches_sequential() {
        let ws = windows(400);
        let cfg = FeatureConfig::default();
        let ds = featurize(&ws, &cfg).unwrap();
        let an = SpectralAnalyzer::new(12);
        for (w, row) in ws.iter().zip(&ds.rows) {
            let seq = extract_window(w, &cfg, &an);
            assert!(seq.iter().zip(row).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn schema_hash_tracks_names() {
        let a = FeatureConfig::default().schema().hash();
        let b = FeatureConfig { n_cepstral: 3, ..Default::default() }.schema().hash();
        assert_ne!(a, b);
        assert_eq!(a.0.len(), 64);
    }
}
