use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::IngestError;

/// Closed behaviour vocabulary used by the annotators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behaviour {
    SpinCw,
    SpinCcw,
    Stand,
    Jump,
    Sit,
    Rollover,
    Idle,
    Other,
}

impl Behaviour {
    pub const ALL: [Behaviour; 8] = [
        Behaviour::SpinCw,
        Behaviour::SpinCcw,
        Behaviour::Stand,
        Behaviour::Jump,
        Behaviour::Sit,
        Behaviour::Rollover,
        Behaviour::Idle,
        Behaviour::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Behaviour::SpinCw => "spin_cw",
            Behaviour::SpinCcw => "spin_ccw",
            Behaviour::Stand => "stand",
            Behaviour::Jump => "jump",
            Behaviour::Sit => "sit",
            Behaviour::Rollover => "rollover",
            Behaviour::Idle => "idle",
            Behaviour::Other => "other",
        }
    }

    pub fn is_spin(self) -> bool {
        matches!(self, Behaviour::SpinCw | Behaviour::SpinCcw)
    }
}

impl fmt::Display for Behaviour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Behaviour {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Behaviour::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledInterval {
    pub start_ms: f64,
    pub end_ms: f64,
    pub label: Behaviour,
}

impl LabeledInterval {
    pub fn new(start_ms: f64, end_ms: f64, label: Behaviour) -> Self {
        Self {
            start_ms,
            end_ms,
            label,
        }
    }

    pub fn duration_ms(&self) -> f64 {
        self.end_ms - self.start_ms
    }

    /// Length of the intersection with `[lo, hi]`, zero when disjoint.
    pub fn overlap_with(&self, lo: f64, hi: f64) -> f64 {
        (self.end_ms.min(hi) - self.start_ms.max(lo)).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationTrack {
    pub recording_id: String,
    pub intervals: Vec<LabeledInterval>,
    pub annotator: String,
}

impl AnnotationTrack {
    /// Builds a track, sorting intervals and rejecting inverted or overlapping ones.
    /// Error line numbers refer to positions in the sorted order, starting at 1.
    pub fn new(
        recording_id: impl Into<String>,
        annotator: impl Into<String>,
        mut intervals: Vec<LabeledInterval>,
    ) -> Result<Self, IngestError> {
        if let Some(i) = intervals.iter().position(|iv| iv.start_ms.partial_cmp(&iv.end_ms) != Some(std::cmp::Ordering::Less)) {
            return Err(IngestError::InvertedInterval(i + 1));
        }
        intervals.sort_by(|a, b| a.start_ms.total_cmp(&b.start_ms));
        if let Some(i) = intervals.windows(2).position(|w| w[1].start_ms < w[0].end_ms) {
            return Err(IngestError::OverlapWithinTrack(i + 2));
        }
        Ok(Self {
            recording_id: recording_id.into(),
            intervals,
            annotator: annotator.into(),
        })
    }
}

/// Keeps only what both annotators agree on: for every pair of same-label
/// intervals with a non-empty intersection, the intersection survives.
pub fn merge_annotations(
    a: &AnnotationTrack,
    b: &AnnotationTrack,
) -> Result<AnnotationTrack, IngestError> {
    if a.recording_id != b.recording_id {
        return Err(IngestError::RecordingMismatch(
            a.recording_id.clone(),
            b.recording_id.clone(),
        ));
    }
    let mut merged = Vec::new();
    for ia in &a.intervals {
        for ib in b.intervals.iter().filter(|ib| ib.label == ia.label) {
            let lo = ia.start_ms.max(ib.start_ms);
            let hi = ia.end_ms.min(ib.end_ms);
            if lo < hi {
                merged.push(LabeledInterval::new(lo, hi, ia.label));
            }
        }
    }
    merged.sort_by(|x, y| {
        x.start_ms
            .total_cmp(&y.start_ms)
            .then(x.end_ms.total_cmp(&y.end_ms))
            .then(x.label.cmp(&y.label))
    });
    Ok(AnnotationTrack {
        recording_id: a.recording_id.clone(),
        intervals: merged,
        annotator: "merged".to_string(),
    })
}
