//! CSV sample and annotation files.
//!
//! Line numbers reported in errors are 1-based and count the header row.

use std::fmt::Write as _;

use super::{AnnotationTrack, Behaviour, IngestError, LabeledInterval, RawRecording, Sample};

pub const SAMPLES_HEADER: &str = "t_ms,x_g,y_g,z_g";
pub const ANNOTATIONS_HEADER: &str = "start_ms,end_ms,label,annotator";

/// Nominal rate assumed for CSV sample files, which carry no device metadata.
pub const DEFAULT_RATE_HZ: f64 = 12.5;

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes())
}

fn check_header(
    records: &mut csv::StringRecordsIter<'_, &[u8]>,
    expected: &'static str,
) -> Result<(), IngestError> {
    let bad = IngestError::BadHeader { expected };
    let header = records.next().ok_or(bad.clone())?.map_err(|_| bad.clone())?;
    if header.iter().eq(expected.split(',')) {
        Ok(())
    } else {
        Err(bad)
    }
}

fn line_of(rec: &csv::StringRecord, fallback: usize) -> usize {
    rec.position().map_or(fallback, |p| p.line() as usize)
}

pub fn parse_samples_csv(text: &str) -> Result<RawRecording, IngestError> {
    let mut rdr = reader(text);
    let mut records = rdr.records();
    check_header(&mut records, SAMPLES_HEADER)?;
    let mut samples: Vec<Sample> = Vec::new();
    for (i, row) in records.enumerate() {
        let fallback = i + 2;
        let row = row.map_err(|_| IngestError::RowParse(fallback))?;
        let line = line_of(&row, fallback);
        if row.len() != 4 {
            return Err(IngestError::RowParse(line));
        }
        let mut vals = [0.0f64; 4];
        for (v, field) in vals.iter_mut().zip(row.iter()) {
            *v = field
                .trim()
                .parse()
                .map_err(|_| IngestError::RowParse(line))?;
        }
        let s = Sample::new(vals[0], vals[1], vals[2], vals[3]);
        if !s.in_range() {
            return Err(IngestError::OutOfRange(line));
        }
        if samples.last().is_some_and(|prev| s.t <= prev.t) {
            return Err(IngestError::NonMonotonicTimestamp(line));
        }
        samples.push(s);
    }
    Ok(RawRecording {
        device_id: "csv".to_string(),
        nominal_rate_hz: DEFAULT_RATE_HZ,
        samples,
    })
}

/// Writes samples using the shortest representation that parses back to the
/// same `f64`, so parse ∘ write is the identity.
pub fn write_samples_csv(rec: &RawRecording) -> String {
    let mut out = String::with_capacity(32 * (rec.samples.len() + 1));
    out.push_str(SAMPLES_HEADER);
    out.push('\n');
    for s in &rec.samples {
        let _ = writeln!(out, "{},{},{},{}", s.t, s.x, s.y, s.z);
    }
    out
}

pub fn parse_annotations_csv(text: &str, recording_id: &str) -> Result<AnnotationTrack, IngestError> {
    let mut rdr = reader(text);
    let mut records = rdr.records();
    check_header(&mut records, ANNOTATIONS_HEADER)?;
    let mut annotator: Option<String> = None;
    let mut rows: Vec<(usize, LabeledInterval)> = Vec::new();
    for (i, row) in records.enumerate() {
        let fallback = i + 2;
        let row = row.map_err(|_| IngestError::RowParse(fallback))?;
        let line = line_of(&row, fallback);
        if row.len() != 4 {
            return Err(IngestError::RowParse(line));
        }
        let start: f64 = row[0].trim().parse().map_err(|_| IngestError::RowParse(line))?;
        let end: f64 = row[1].trim().parse().map_err(|_| IngestError::RowParse(line))?;
        if !start.is_finite() || !end.is_finite() {
            return Err(IngestError::RowParse(line));
        }
        let label: Behaviour = row[2]
            .trim()
            .parse()
            .map_err(|_| IngestError::UnknownLabel(line))?;
        if start.partial_cmp(&end) != Some(std::cmp::Ordering::Less) {
            return Err(IngestError::InvertedInterval(line));
        }
        let who = row[3].trim();
        match &annotator {
            None => annotator = Some(who.to_string()),
            Some(a) if a != who => return Err(IngestError::MixedAnnotators(line)),
            Some(_) => {}
        }
        rows.push((line, LabeledInterval::new(start, end, label)));
    }
    rows.sort_by(|a, b| a.1.start_ms.total_cmp(&b.1.start_ms).then(a.0.cmp(&b.0)));
    if let Some(w) = rows.windows(2).find(|w| w[1].1.start_ms < w[0].1.end_ms) {
        return Err(IngestError::OverlapWithinTrack(w[0].0.max(w[1].0)));
    }
    Ok(AnnotationTrack {
        recording_id: recording_id.to_string(),
        intervals: rows.into_iter().map(|(_, iv)| iv).collect(),
        annotator: annotator.unwrap_or_default(),
    })
}

pub fn write_annotations_csv(track: &AnnotationTrack) -> String {
    let mut out = String::from(ANNOTATIONS_HEADER);
    out.push('\n');
    for iv in &track.intervals {
        let _ = writeln!(out, "{},{},{},{}", iv.start_ms, iv.end_ms, iv.label, track.annotator);
    }
    out
}
