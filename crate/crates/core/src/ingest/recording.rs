use serde::{Deserialize, Serialize};

use super::IngestError;

/// Device full-scale range in g.
pub const FULL_SCALE_G: f64 = 16.0;

/// One triaxial reading. `t` is milliseconds since the epoch, axes are in g.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Sample {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn in_range(&self) -> bool {
        self.t.is_finite()
            && self.t >= 0.0
            && [self.x, self.y, self.z]
                .iter()
                .all(|v| v.is_finite() && v.abs() <= FULL_SCALE_G)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawRecording {
    pub device_id: String,
    pub nominal_rate_hz: f64,
    pub samples: Vec<Sample>,
}

impl RawRecording {
    /// Builds a recording, checking the sample range, ordering and rate invariants.
    pub fn new(
        device_id: impl Into<String>,
        nominal_rate_hz: f64,
        samples: Vec<Sample>,
    ) -> Result<Self, IngestError> {
        let rec = Self {
            device_id: device_id.into(),
            nominal_rate_hz,
            samples,
        };
        rec.check()?;
        Ok(rec)
    }

    pub fn check(&self) -> Result<(), IngestError> {
        if !(self.nominal_rate_hz.is_finite() && self.nominal_rate_hz > 0.0) {
            return Err(IngestError::InvalidRecording(format!(
                "nominal rate {} Hz",
                self.nominal_rate_hz
            )));
        }
        if let Some(i) = self.samples.iter().position(|s| !s.in_range()) {
            return Err(IngestError::InvalidRecording(format!(
                "sample {i} out of range"
            )));
        }
        if let Some(i) = self.samples.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(IngestError::InvalidRecording(format!(
                "timestamps not increasing at sample {}",
                i + 1
            )));
        }
        Ok(())
    }

    /// Nominal sampling period in milliseconds.
    pub fn period_ms(&self) -> f64 {
        1000.0 / self.nominal_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Keeps the samples whose timestamp falls inside one of the closed `keep`
/// intervals. Order is preserved; an empty keep list yields an empty recording.
pub fn trim_recording(rec: &RawRecording, keep: &[(f64, f64)]) -> RawRecording {
    let samples = rec
        .samples
        .iter()
        .filter(|s| keep.iter().any(|&(lo, hi)| s.t >= lo && s.t <= hi))
        .copied()
        .collect();
    RawRecording {
        device_id: rec.device_id.clone(),
        nominal_rate_hz: rec.nominal_rate_hz,
        samples,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub samples: usize,
    pub expected_hz: f64,
    pub empirical_hz: f64,
    pub rel_tol: f64,
    pub pass: bool,
}

/// Empirical rate `(n - 1) / (t_last - t_first)` checked against `expected_hz`.
pub fn validate_rate(
    rec: &RawRecording,
    expected_hz: f64,
    rel_tol: f64,
) -> Result<RateReport, IngestError> {
    let n = rec.samples.len();
    if n < 2 {
        return Err(IngestError::TooFewSamples);
    }
    let span_s = (rec.samples[n - 1].t - rec.samples[0].t) / 1000.0;
    let empirical_hz = (n - 1) as f64 / span_s;
    let pass = (empirical_hz - expected_hz).abs() <= rel_tol * expected_hz;
    Ok(RateReport {
        samples: n,
        expected_hz,
        empirical_hz,
        rel_tol,
        pass,
    })
}
