//! `collarwave`: ingest collar accelerometer logs, extract window features,
//! train and evaluate spin classifiers, and run the online detector.
//!
//! Exit status: 0 success, 1 usage error, 2 input or parse error,
//! 3 validation failure, 4 internal error.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::ExitStatus;

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (model format collarwave-model v1)");

#[derive(Debug, Parser)]
#[command(name = "collarwave", version = VERSION, about = "Spin detection from collar accelerometer data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a recording between the binary block format (.cwa) and CSV.
    Convert {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a recording's empirical sampling rate against the nominal one.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 12.5)]
        rate: f64,
        /// Relative tolerance.
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
    },
    /// Window, label and featurize annotated recordings.
    Featurize(FeaturizeArgs),
    /// Train one classifier on a feature file.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        model: String,
        #[command(flatten)]
        common: TrainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stratified k-fold cross-validation of one classifier.
    Cv {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[command(flatten)]
        common: TrainArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-dog or pooled evaluation table for several classifiers.
    Report {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportMode::Pooled)]
        mode: ReportMode,
        /// Comma-separated model names.
        #[arg(long, default_value = "nb,rf,svm,logreg,knn", value_delimiter = ',')]
        models: Vec<String>,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[command(flatten)]
        common: TrainArgs,
        /// Report CSV; written to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Recall bar chart (SVG).
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run the online detector over a recording or a live feed on stdin.
    Detect(DetectArgs),
    /// Write a synthetic annotated corpus and a streaming scenario.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        dogs: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportMode {
    PerDog,
    Pooled,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Window length in samples.
    #[arg(long, default_value_t = 12)]
    pub window: usize,
    #[arg(long, default_value_t = 0.5)]
    pub overlap: f64,
    /// Sampling rate used for spectral features, Hz.
    #[arg(long, default_value_t = 12.5)]
    pub rate: f64,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    /// Recording (.csv or .cwa); repeat for several recordings.
    #[arg(long, required = true)]
    pub samples: Vec<PathBuf>,
    /// Annotation CSV, one per --samples, in the same order.
    #[arg(long, required = true)]
    pub annotations: Vec<PathBuf>,
    /// Second annotator's CSV; windows are labeled by the agreed intervals.
    #[arg(long)]
    pub annotations2: Vec<PathBuf>,
    /// Recording ids; default to the samples file stems.
    #[arg(long)]
    pub id: Vec<String>,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value_t = 0.5)]
    pub min_overlap: f64,
    /// Keep individual behaviour labels instead of spin / negative.
    #[arg(long)]
    pub multiclass: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "spin")]
    pub positive: String,
    /// Inverse-frequency class weights.
    #[arg(long)]
    pub class_weighted: bool,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Recording to replay (.csv or .cwa).
    #[arg(long, conflicts_with = "live", required_unless_present = "live")]
    pub replay: Option<PathBuf>,
    /// Read `t_ms x_g y_g z_g` lines from stdin.
    #[arg(long)]
    pub live: bool,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 30_000)]
    pub refractory_ms: u64,
    #[command(flatten)]
    pub window: WindowArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitStatus::Success,
                _ => ExitStatus::Usage,
            }
            .into();
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitStatus::Success.into(),
        Err(e) => {
            eprintln!("error: {e}");
            e.status.into()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn version_names_model_format() {
        let expected = format!("{} v{}", collarwave::models::MODEL_FORMAT, collarwave::models::MODEL_VERSION);
        assert!(VERSION.ends_with(&format!("(model format {expected})")));
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
