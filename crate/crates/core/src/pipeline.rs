//! Glue from annotated recordings to a feature dataset.

use thiserror::Error;

use crate::features::{featurize, Dataset, FeatureConfig, FeatureError};
use crate::ingest::{AnnotationTrack, IngestError, RawRecording};
use crate::preprocess::{label_windows, make_windows, PreprocessError, WindowLabel, WindowSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("recording `{0}`: {1}")]
    Ingest(String, IngestError),
    #[error("recording `{0}`: {1}")]
    Preprocess(String, PreprocessError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("no recordings given")]
    Empty,
}

/// One recording with its (possibly merged) annotation track.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedRecording {
    pub id: String,
    pub recording: RawRecording,
    pub annotations: AnnotationTrack,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetOptions {
    pub window: WindowSpec,
    pub features: FeatureConfig,
    pub min_overlap: f64,
    /// Keep every behaviour label instead of collapsing to spin / negative.
    pub multiclass: bool,
}

impl Default for DatasetOptions {
    fn default() -> Self {
        Self {
            window: WindowSpec::default(),
            features: FeatureConfig::default(),
            min_overlap: 0.5,
            multiclass: false,
        }
    }
}

/// Windows, labels and featurizes every recording; rows keep input order.
pub fn build_dataset(inputs: &[AnnotatedRecording], opts: &DatasetOptions) -> Result<Dataset, PipelineError> {
    if inputs.is_empty() {
        return Err(PipelineError::Empty);
    }
    let mut windows = Vec::new();
    for r in inputs {
        r.recording.check().map_err(|e| PipelineError::Ingest(r.id.clone(), e))?;
        let w = make_windows(&r.recording, &r.id, &opts.window)
            .and_then(|w| label_windows(w, &r.annotations, opts.min_overlap))
            .map_err(|e| PipelineError::Preprocess(r.id.clone(), e))?;
        windows.extend(w);
    }
    let ds = featurize(&windows, &opts.features)?;
    Ok(if opts.multiclass {
        ds
    } else {
        ds.binarize(WindowLabel::SPIN, WindowLabel::NEGATIVE)
    })
}
