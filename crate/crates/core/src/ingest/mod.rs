//! Sensor log and annotation ingestion.
//!
//! Two sample sources are supported: the block-structured binary logger
//! format ([`cwa`]) and a plain samples CSV ([`text`]). Annotation tracks come
//! from CSV and can be merged across two annotators, keeping only the
//! intervals both agree on.

pub mod cwa;
pub mod text;

mod annotations;
mod recording;

pub use annotations::{merge_annotations, AnnotationTrack, Behaviour, LabeledInterval};
pub use cwa::{parse_cwa, write_cwa, CwaParse, CwaWarning};
pub use recording::{trim_recording, validate_rate, RateReport, RawRecording, Sample, FULL_SCALE_G};
pub use text::{parse_annotations_csv, parse_samples_csv, write_annotations_csv, write_samples_csv};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("no samples could be decoded")]
    EmptyRecording,
    #[error("bad header row, expected `{expected}`")]
    BadHeader { expected: &'static str },
    #[error("could not parse row at line {0}")]
    RowParse(usize),
    #[error("acceleration outside the ±16 g device range at line {0}")]
    OutOfRange(usize),
    #[error("timestamp does not increase at line {0}")]
    NonMonotonicTimestamp(usize),
    #[error("unknown behaviour label at line {0}")]
    UnknownLabel(usize),
    #[error("interval end precedes start at line {0}")]
    InvertedInterval(usize),
    #[error("interval at line {0} overlaps an earlier interval")]
    OverlapWithinTrack(usize),
    #[error("rows from more than one annotator at line {0}")]
    MixedAnnotators(usize),
    #[error("tracks belong to different recordings: `{0}` vs `{1}`")]
    RecordingMismatch(String, String),
    #[error("rate validation needs at least two samples")]
    TooFewSamples,
    #[error("invalid recording: {0}")]
    InvalidRecording(String),
}
