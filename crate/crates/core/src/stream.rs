//! Online detection: sliding-window featurization of a live sample stream,
//! per-window classification and m-of-n debouncing into alert events.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::features::{extract_window, FeatureConfig, FeatureError, SpectralAnalyzer};
use crate::ingest::Sample;
use crate::models::{ModelArtifact, ModelError};
use crate::preprocess::{LabeledWindow, PreprocessError, WindowSpec};

const STREAM_ID: &str = "stream";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StreamError {
    #[error("timestamp {found} ms does not follow {previous} ms")]
    NonMonotonicTimestamp { previous: f64, found: f64 },
    #[error("schema mismatch: model expects {expected}, detector produces {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("invalid detector configuration: {0}")]
    InvalidConfig(String),
    #[error("live line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorConfig {
    pub window: WindowSpec,
    pub features: FeatureConfig,
    /// Positive windows required among the last `n`.
    pub m: usize,
    pub n: usize,
    pub refractory_ms: u64,
    /// Sets the gap threshold and window end times, as in batch windowing.
    pub nominal_rate_hz: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            window: WindowSpec::default(),
            features: FeatureConfig::default(),
            m: 2,
            n: 3,
            refractory_ms: 30_000,
            nominal_rate_hz: 12.5,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<(), StreamError> {
        self.window.validate()?;
        self.features.validate(self.window.length_samples)?;
        if self.m == 0 || self.m > self.n {
            return Err(StreamError::InvalidConfig(format!("need 1 <= m <= n, got m={} n={}", self.m, self.n)));
        }
        if !(self.nominal_rate_hz.is_finite() && self.nominal_rate_hz > 0.0) {
            return Err(StreamError::InvalidConfig(format!("nominal rate {}", self.nominal_rate_hz)));
        }
        Ok(())
    }
}

/// Classification of one full window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowDecision {
    /// Index of the window's first sample, counted from the last reset.
    pub start_index: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub label: String,
    pub score: f64,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlertEvent {
    pub t_ms: f64,
    /// Mean positive score of the positive windows behind the alert.
    pub confidence: f64,
    pub window_span: (f64, f64),
}

impl fmt::Display for AlertEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ALERT t_ms={} confidence={:.3} span={}-{}",
            self.t_ms.round() as i64,
            self.confidence,
            self.window_span.0.round() as i64,
            self.window_span.1.round() as i64
        )
    }
}

/// m-of-n vote over window decisions with a refractory period after each alert.
#[derive(Debug, Clone)]
pub struct Debouncer {
    m: usize,
    n: usize,
    refractory_ms: u64,
    history: VecDeque<WindowDecision>,
    last_alert: Option<f64>,
}

impl Debouncer {
    pub fn new(m: usize, n: usize, refractory_ms: u64) -> Self {
        Self {
            m,
            n,
            refractory_ms,
            history: VecDeque::with_capacity(n),
            last_alert: None,
        }
    }

    pub fn in_refractory(&self, t_ms: f64) -> bool {
        self.last_alert
            .is_some_and(|t| t_ms - t < self.refractory_ms as f64)
    }

    /// Records a decision; the alert time is the end of the triggering window.
    pub fn observe(&mut self, d: WindowDecision) -> Option<AlertEvent> {
        if self.history.len() == self.n {
            self.history.pop_front();
        }
        self.history.push_back(d);
        let trigger = self.history.back()?;
        if !trigger.positive {
            return None;
        }
        let t_ms = trigger.t_end;
        let positives: Vec<&WindowDecision> = self.history.iter().filter(|w| w.positive).collect();
        if positives.len() < self.m || self.in_refractory(t_ms) {
            return None;
        }
        let event = AlertEvent {
            t_ms,
            confidence: (positives.iter().map(|w| w.score).sum::<f64>() / positives.len() as f64).clamp(0.0, 1.0),
            window_span: (positives[0].t_start, t_ms),
        };
        self.last_alert = Some(t_ms);
        self.history.clear();
        Some(event)
    }

    /// Drops the vote history, leaving the refractory clock alone.
    pub fn clear_history(&mut self) {
        self.history.clear();
    }

    pub fn reset(&mut self) {
        self.history.clear();
        self.last_alert = None;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepOutcome {
    pub window: Option<WindowDecision>,
    pub alert: Option<AlertEvent>,
}

/// Single-writer online detector bound to one model artifact.
pub struct Detector {
    model: ModelArtifact,
    cfg: DetectorConfig,
    analyzer: SpectralAnalyzer,
    period_ms: f64,
    buffer: VecDeque<Sample>,
    /// Samples seen since the last reset.
    seen: usize,
    /// Samples seen in the current gap-free segment.
    in_segment: usize,
    last_t: Option<f64>,
    debouncer: Debouncer,
}

impl Detector {
    pub fn new(model: ModelArtifact, cfg: DetectorConfig) -> Result<Self, StreamError> {
        cfg.validate()?;
        let found = cfg.features.schema().hash();
        if found != model.schema_hash {
            return Err(StreamError::SchemaMismatch {
                expected: model.schema_hash.0.clone(),
                found: found.0,
            });
        }
        let len = cfg.window.length_samples;
        Ok(Self {
            model,
            analyzer: SpectralAnalyzer::new(len),
            period_ms: 1000.0 / cfg.nominal_rate_hz,
            buffer: VecDeque::with_capacity(len),
            seen: 0,
            in_segment: 0,
            last_t: None,
            debouncer: Debouncer::new(cfg.m, cfg.n, cfg.refractory_ms),
            cfg,
        })
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.cfg
    }

    /// Buffers one sample and, on every hop once a window is full, classifies
    /// the newest window.
    pub fn push(&mut self, s: Sample) -> Result<StepOutcome, StreamError> {
        if let Some(prev) = self.last_t {
            if s.t.partial_cmp(&prev) != Some(std::cmp::Ordering::Greater) {
                return Err(StreamError::NonMonotonicTimestamp { previous: prev, found: s.t });
            }
            if s.t - prev > 2.0 * self.period_ms {
                self.buffer.clear();
                self.in_segment = 0;
                self.debouncer.clear_history();
            }
        }
        self.last_t = Some(s.t);
        let len = self.cfg.window.length_samples;
        if self.buffer.len() == len {
            self.buffer.pop_front();
        }
        self.buffer.push_back(s);
        self.seen += 1;
        self.in_segment += 1;
        if self.in_segment < len || !(self.in_segment - len).is_multiple_of(self.cfg.window.hop()) {
            return Ok(StepOutcome::default());
        }
        let samples: Vec<Sample> = self.buffer.iter().copied().collect();
        let window = LabeledWindow::from_samples(STREAM_ID, self.seen - len, &samples, self.period_ms);
        let row = extract_window(&window, &self.cfg.features, &self.analyzer);
        let p = self.model.predict_raw(&row)?;
        let decision = WindowDecision {
            start_index: window.start_index,
            t_start: window.t_start,
            t_end: window.t_end,
            positive: p.label == self.model.params.positive_label,
            label: p.label,
            score: p.score,
        };
        let alert = self.debouncer.observe(decision.clone());
        Ok(StepOutcome {
            window: Some(decision),
            alert,
        })
    }

    pub fn push_sample(&mut self, s: Sample) -> Result<Option<AlertEvent>, StreamError> {
        Ok(self.push(s)?.alert)
    }

    /// Clears buffers, vote history and the refractory clock.
    pub fn reset(&mut self) {
        self.buffer.clear();
        self.seen = 0;
        self.in_segment = 0;
        self.last_t = None;
        self.debouncer.reset();
    }

    /// Feeds every sample in order and collects per-window decisions and alerts.
    pub fn replay(&mut self, samples: &[Sample]) -> Result<(Vec<WindowDecision>, Vec<AlertEvent>), StreamError> {
        let mut windows = Vec::new();
        let mut alerts = Vec::new();
        for &s in samples {
            let out = self.push(s)?;
            windows.extend(out.window);
            alerts.extend(out.alert);
        }
        Ok((windows, alerts))
    }
}

/// Parses one live-feed line: `t_ms x_g y_g z_g`, whitespace separated.
pub fn parse_live_line(line: &str, line_no: usize) -> Result<Sample, StreamError> {
    let bad = |reason: String| StreamError::BadLine { line: line_no, reason };
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(bad(format!("expected 4 fields, found {}", fields.len())));
    }
    let mut v = [0.0; 4];
    for (slot, f) in v.iter_mut().zip(&fields) {
        *slot = f.parse::<f64>().map_err(|e| bad(format!("`{f}`: {e}")))?;
        if !slot.is_finite() {
            return Err(bad(format!("`{f}` is not finite")));
        }
    }
    Ok(Sample {
        t: v[0],
        x: v[1],
        y: v[2],
        z: v[3],
    })
}
