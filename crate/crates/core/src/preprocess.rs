//! Orientation-invariant magnitude and fixed-length overlapping windows.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{AnnotationTrack, Behaviour, RawRecording};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PreprocessError {
    #[error("recording has {samples} usable samples, window needs {window}")]
    RecordingTooShort { samples: usize, window: usize },
    #[error("invalid window spec: {0}")]
    InvalidWindowSpec(String),
    #[error("window belongs to `{window}` but track to `{track}`")]
    RecordingMismatch { window: String, track: String },
}

/// Euclidean norm of one triaxial reading.
#[inline]
pub fn amag(x: f64, y: f64, z: f64) -> f64 {
    (x * x + y * y + z * z).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MagnitudeSample {
    pub t: f64,
    pub amag: f64,
}

pub fn magnitude(rec: &RawRecording) -> Vec<MagnitudeSample> {
    rec.samples
        .iter()
        .map(|s| MagnitudeSample {
            t: s.t,
            amag: amag(s.x, s.y, s.z),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub length_samples: usize,
    pub overlap_fraction: f64,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self {
            length_samples: 12,
            overlap_fraction: 0.5,
        }
    }
}

impl WindowSpec {
    pub fn new(length_samples: usize, overlap_fraction: f64) -> Result<Self, PreprocessError> {
        let spec = Self {
            length_samples,
            overlap_fraction,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), PreprocessError> {
        if self.length_samples == 0 {
            return Err(PreprocessError::InvalidWindowSpec("zero length".into()));
        }
        if !(0.0..1.0).contains(&self.overlap_fraction) {
            return Err(PreprocessError::InvalidWindowSpec(format!(
                "overlap {} outside [0, 1)",
                self.overlap_fraction
            )));
        }
        if self.hop() == 0 {
            return Err(PreprocessError::InvalidWindowSpec("hop rounds to zero".into()));
        }
        Ok(())
    }

    /// Samples between consecutive window starts.
    pub fn hop(&self) -> usize {
        (self.length_samples as f64 * (1.0 - self.overlap_fraction)).round() as usize
    }
}

/// Window label after collapsing both spin directions into one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WindowLabel {
    Spin,
    Behaviour(Behaviour),
    Negative,
}

impl WindowLabel {
    pub const SPIN: &'static str = "spin";
    pub const NEGATIVE: &'static str = "negative";

    pub fn from_behaviour(b: Behaviour) -> Self {
        if b.is_spin() {
            WindowLabel::Spin
        } else {
            WindowLabel::Behaviour(b)
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            WindowLabel::Spin => Self::SPIN,
            WindowLabel::Behaviour(b) => b.as_str(),
            WindowLabel::Negative => Self::NEGATIVE,
        }
    }

    /// Binary spin-vs-rest view.
    pub fn binary(&self) -> &'static str {
        match self {
            WindowLabel::Spin => Self::SPIN,
            _ => Self::NEGATIVE,
        }
    }
}

impl fmt::Display for WindowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WindowLabel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            Self::SPIN => Ok(WindowLabel::Spin),
            Self::NEGATIVE => Ok(WindowLabel::Negative),
            other => other.parse::<Behaviour>().map(WindowLabel::from_behaviour),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledWindow {
    pub recording_id: String,
    /// Index of the first sample in the source recording.
    pub start_index: usize,
    pub t_start: f64,
    /// One nominal period past the last sample, so the span is `L` periods long.
    pub t_end: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub amag: Vec<f64>,
    pub label: Option<WindowLabel>,
}

impl LabeledWindow {
    /// Builds an unlabeled window from `samples`, computing the magnitude channel.
    pub fn from_samples(
        recording_id: &str,
        start_index: usize,
        samples: &[crate::ingest::Sample],
        period_ms: f64,
    ) -> Self {
        let n = samples.len();
        let mut w = LabeledWindow {
            recording_id: recording_id.to_string(),
            start_index,
            t_start: samples[0].t,
            t_end: samples[n - 1].t + period_ms,
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            z: Vec::with_capacity(n),
            amag: Vec::with_capacity(n),
            label: None,
        };
        for s in samples {
            w.x.push(s.x);
            w.y.push(s.y);
            w.z.push(s.z);
            w.amag.push(amag(s.x, s.y, s.z));
        }
        w
    }

    pub fn len(&self) -> usize {
        self.amag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amag.is_empty()
    }
}

/// Start offsets of every full window of length `len` stepping by `hop`
/// over `n` samples. Trailing samples that do not fill a window are dropped.
pub fn window_starts(n: usize, len: usize, hop: usize) -> Vec<usize> {
    assert!(hop > 0, "hop must be positive");
    if len == 0 || n < len {
        return Vec::new();
    }
    (0..=n - len).step_by(hop).collect()
}

/// Splits sample indices into contiguous segments, breaking wherever the gap
/// between neighbours exceeds twice the nominal period.
pub fn segments(rec: &RawRecording) -> Vec<std::ops::Range<usize>> {
    let max_gap = 2.0 * rec.period_ms();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..rec.samples.len() {
        if rec.samples[i].t - rec.samples[i - 1].t > max_gap {
            out.push(start..i);
            start = i;
        }
    }
    if !rec.samples.is_empty() {
        out.push(start..rec.samples.len());
    }
    out
}

/// Slices each gap-free segment of `rec` into windows, in increasing
/// `start_index` order.
pub fn make_windows(
    rec: &RawRecording,
    recording_id: &str,
    spec: &WindowSpec,
) -> Result<Vec<LabeledWindow>, PreprocessError> {
    spec.validate()?;
    let len = spec.length_samples;
    let too_short = PreprocessError::RecordingTooShort {
        samples: rec.samples.len(),
        window: len,
    };
    if rec.samples.len() < len {
        return Err(too_short);
    }
    let period = rec.period_ms();
    let mut windows = Vec::new();
    for seg in segments(rec) {
        for s in window_starts(seg.len(), len, spec.hop()) {
            let start = seg.start + s;
            windows.push(LabeledWindow::from_samples(
                recording_id,
                start,
                &rec.samples[start..start + len],
                period,
            ));
        }
    }
    if windows.is_empty() {
        return Err(too_short);
    }
    Ok(windows)
}

/// Assigns each window the label covering at least `min_overlap_fraction` of
/// its span. Competing labels resolve by largest overlap, then by earliest
/// interval start; windows with no qualifying label become `Negative`.
pub fn label_windows(
    mut windows: Vec<LabeledWindow>,
    track: &AnnotationTrack,
    min_overlap_fraction: f64,
) -> Result<Vec<LabeledWindow>, PreprocessError> {
    for w in &mut windows {
        if w.recording_id != track.recording_id {
            return Err(PreprocessError::RecordingMismatch {
                window: w.recording_id.clone(),
                track: track.recording_id.clone(),
            });
        }
        let span = w.t_end - w.t_start;
        let mut cover: BTreeMap<WindowLabel, (f64, f64)> = BTreeMap::new();
        for iv in &track.intervals {
            let ov = iv.overlap_with(w.t_start, w.t_end);
            if ov > 0.0 {
                let e = cover
                    .entry(WindowLabel::from_behaviour(iv.label))
                    .or_insert((0.0, iv.start_ms));
                e.0 += ov;
                e.1 = e.1.min(iv.start_ms);
            }
        }
        let best = cover
            .into_iter()
            .filter(|(_, (ov, _))| *ov >= min_overlap_fraction * span)
            .min_by(|a, b| b.1 .0.total_cmp(&a.1 .0).then(a.1 .1.total_cmp(&b.1 .1)));
        w.label = Some(best.map_or(WindowLabel::Negative, |(label, _)| label));
    }
    Ok(windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{LabeledInterval, Sample};
    use proptest::prelude::*;

    fn rec(n: usize) -> RawRecording {
        let samples = (0..n)
            .map(|i| Sample::new(i as f64 * 80.0, 0.1 * i as f64 % 1.0, 0.0, 1.0))
            .collect();
        RawRecording::new("d", 12.5, samples).unwrap()
    }

    fn track(ivs: &[(f64, f64, Behaviour)]) -> AnnotationTrack {
        AnnotationTrack::new(
            "r",
            "A",
            ivs.iter().map(|&(s, e, l)| LabeledInterval::new(s, e, l)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn magnitude_examples() {
        let r = RawRecording::new(
            "d",
            12.5,
            vec![
                Sample::new(0.0, 0.0, 0.0, 0.0),
                Sample::new(80.0, 3.0, 4.0, 0.0),
                Sample::new(160.0, 1.0, 1.0, 1.0),
            ],
        )
        .unwrap();
        let m = magnitude(&r);
        assert_eq!(m[0].amag, 0.0);
        assert_eq!(m[1].amag, 5.0);
        assert!((m[2].amag - 1.7320508).abs() < 1e-7);
        assert_eq!(m[2].t, 160.0);
    }

    #[test]
    fn windows_at_half_overlap() {
        let w = make_windows(&rec(36), "r", &WindowSpec::default()).unwrap();
        let starts: Vec<_> = w.iter().map(|w| w.start_index).collect();
        assert_eq!(starts, vec![0, 6, 12, 18, 24]);
        assert_eq!(w[0].t_start, 0.0);
        assert_eq!(w[0].t_end, 960.0);
    }

    #[test]
    fn window_count_edges() {
        assert_eq!(make_windows(&rec(12), "r", &WindowSpec::default()).unwrap().len(), 1);
        assert_eq!(
            make_windows(&rec(11), "r", &WindowSpec::default()),
            Err(PreprocessError::RecordingTooShort { samples: 11, window: 12 })
        );
    }

    #[test]
    fn gaps_split_segments() {
        let mut r = rec(30);
        for s in r.samples.iter_mut().skip(15) {
            s.t += 1000.0;
        }
        let w = make_windows(&r, "r", &WindowSpec::default()).unwrap();
        let starts: Vec<_> = w.iter().map(|w| w.start_index).collect();
        assert_eq!(starts, vec![0, 15]);
    }

    #[test]
    fn bad_specs() {
        assert!(WindowSpec::new(0, 0.5).is_err());
        assert!(WindowSpec::new(12, 1.0).is_err());
        assert!(WindowSpec::new(1, 0.9).is_err());
        assert_eq!(WindowSpec::new(12, 0.5).unwrap().hop(), 6);
    }

    fn first_window_label(t: &AnnotationTrack) -> WindowLabel {
        let w = make_windows(&rec(12), "r", &WindowSpec::default()).unwrap();
        label_windows(w, t, 0.5).unwrap()[0].label.unwrap()
    }

    #[test]
    fn label_inside_spin() {
        assert_eq!(first_window_label(&track(&[(0.0, 2000.0, Behaviour::SpinCw)])), WindowLabel::Spin);
    }

    #[test]
    fn label_quarter_overlap_is_negative() {
        assert_eq!(
            first_window_label(&track(&[(720.0, 2000.0, Behaviour::SpinCw)])),
            WindowLabel::Negative
        );
    }

    #[test]
    fn label_max_overlap_wins() {
        // 60% jump, 40% spin
        let t = track(&[(0.0, 576.0, Behaviour::Jump), (576.0, 2000.0, Behaviour::SpinCw)]);
        let w = make_windows(&rec(12), "r", &WindowSpec::default()).unwrap();
        assert_eq!(label_windows(w.clone(), &t, 0.5).unwrap()[0].label, Some(WindowLabel::Behaviour(Behaviour::Jump)));
        // with a lower threshold both qualify and the larger overlap still wins
        assert_eq!(label_windows(w, &t, 0.3).unwrap()[0].label, Some(WindowLabel::Behaviour(Behaviour::Jump)));
    }

    #[test]
    fn spin_directions_pool() {
        let t = track(&[(0.0, 300.0, Behaviour::SpinCw), (300.0, 600.0, Behaviour::SpinCcw)]);
        assert_eq!(first_window_label(&t), WindowLabel::Spin);
    }

    #[test]
    fn tie_goes_to_earlier_interval() {
        let t = track(&[(0.0, 480.0, Behaviour::Sit), (480.0, 960.0, Behaviour::Jump)]);
        assert_eq!(first_window_label(&t), WindowLabel::Behaviour(Behaviour::Sit));
    }

    #[test]
    fn label_recording_mismatch() {
        let w = make_windows(&rec(12), "other", &WindowSpec::default()).unwrap();
        assert!(matches!(
            label_windows(w, &track(&[]), 0.5),
            Err(PreprocessError::RecordingMismatch { .. })
        ));
    }

    #[test]
    fn label_strings_round_trip() {
        for l in [WindowLabel::Spin, WindowLabel::Negative, WindowLabel::Behaviour(Behaviour::Jump)] {
            assert_eq!(l.as_str().parse::<WindowLabel>(), Ok(l));
        }
        assert_eq!("spin_ccw".parse::<WindowLabel>(), Ok(WindowLabel::Spin));
    }

    proptest! {
        #[test]
        fn window_count_formula(n in 0usize..500, len in 1usize..60, hop in 1usize..60) {
            let starts = window_starts(n, len, hop);
            let expected = if n >= len { (n - len) / hop + 1 } else { 0 };
            prop_assert_eq!(starts.len(), expected);
        }

        #[test]
        fn windows_cover_prefix(n in 12usize..200, len in 1usize..30, overlap in 0.0f64..0.95) {
            prop_assume!(n >= len);
            let spec = WindowSpec { length_samples: len, overlap_fraction: overlap };
            prop_assume!(spec.hop() >= 1 && spec.hop() <= len);
            let ws = make_windows(&rec(n), "r", &spec).unwrap();
            let last = ws.last().unwrap().start_index + len;
            let mut seen = vec![false; last];
            for w in &ws {
                seen[w.start_index..w.start_index + len].fill(true);
                prop_assert_eq!(w.x.len(), len);
                prop_assert_eq!(w.amag.len(), len);
            }
            prop_assert!(seen.into_iter().all(|s| s));
        }
    }
}
