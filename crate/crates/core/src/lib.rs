//! Spin-behaviour detection from collar accelerometer recordings.

pub mod eval;
pub mod features;
pub mod ingest;
pub mod models;
pub mod pipeline;
pub mod preprocess;
pub mod stream;
pub mod synth;

pub use eval::{ConfusionMatrix, MetricsReport};
pub use features::{Dataset, FeatureConfig, FeatureSchema, FeatureVector, SchemaHash};
pub use ingest::{AnnotationTrack, Behaviour, LabeledInterval, RawRecording, Sample};
pub use models::{ModelArtifact, ModelError, ModelKind, Prediction, TrainConfig};
pub use preprocess::{LabeledWindow, WindowLabel, WindowSpec};
pub use stream::{AlertEvent, Detector, DetectorConfig};
pub use pipeline::{build_dataset, AnnotatedRecording, DatasetOptions};
