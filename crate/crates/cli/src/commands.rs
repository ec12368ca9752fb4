use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use collarwave::eval::{per_group_report, pooled_report, recall_bar_svg};
use collarwave::features::{read_features_csv, write_features_csv, Dataset, FeatureConfig};
use collarwave::ingest::{
    merge_annotations, parse_annotations_csv, parse_cwa, parse_samples_csv, validate_rate, write_annotations_csv,
    write_cwa, write_samples_csv, AnnotationTrack, RawRecording,
};
use collarwave::models::{cross_validate, load_model, save_model, train, ModelArtifact, ModelKind, TrainConfig};
use collarwave::pipeline::{build_dataset, AnnotatedRecording, DatasetOptions};
use collarwave::preprocess::WindowSpec;
use collarwave::stream::{parse_live_line, Detector, DetectorConfig};
use collarwave::synth::{burst_scenario, corpus, SynthConfig};

use crate::error::CliError;
use crate::{Command, DetectArgs, FeaturizeArgs, ReportMode, TrainArgs, WindowArgs};

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Convert { input, out } => convert(&input, &out),
        Command::Validate { input, rate, tol } => validate(&input, rate, tol),
        Command::Featurize(args) => featurize(&args),
        Command::Train {
            features,
            model,
            common,
            out,
        } => {
            let cfg = train_config(&model, &common)?;
            let artifact = train(&load_features(&features)?, &cfg)?;
            write_output(out.as_deref(), &save_model(&artifact))
        }
        Command::Cv {
            features,
            model,
            k,
            common,
            out,
        } => {
            let cfg = train_config(&model, &common)?;
            let report = cross_validate(&load_features(&features)?, &cfg, k, common.seed)?;
            let m = &report.metrics;
            eprintln!(
                "{} {k}-fold: precision {:.4} recall {:.4} f1 {:.4} accuracy {:.4} support {}",
                report.model.short(),
                m.precision,
                m.recall,
                m.f1,
                m.accuracy,
                m.support
            );
            let mut json = serde_json::to_vec_pretty(&report)?;
            json.push(b'\n');
            write_output(out.as_deref(), &json)
        }
        Command::Report {
            features,
            mode,
            models,
            k,
            common,
            out,
            plot,
        } => report(&features, mode, &models, k, &common, out.as_deref(), plot.as_deref()),
        Command::Detect(args) => detect(&args),
        Command::Synth { out_dir, seed, dogs } => synth(&out_dir, seed, dogs),
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::from(e).context(path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read(path)?).map_err(|_| CliError::input(format!("{}: not valid UTF-8", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| CliError::from(e).context(path.display()))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_file(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn is_cwa(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("cwa"))
}

fn load_recording(path: &Path) -> Result<RawRecording> {
    if is_cwa(path) {
        let parsed = parse_cwa(&read(path)?).map_err(|e| CliError::from(e).context(path.display()))?;
        for w in &parsed.warnings {
            eprintln!("warning: {}: {w}", path.display());
        }
        Ok(parsed.recording)
    } else {
        parse_samples_csv(&read_text(path)?).map_err(|e| CliError::from(e).context(path.display()))
    }
}

fn load_annotations(path: &Path, id: &str) -> Result<AnnotationTrack> {
    parse_annotations_csv(&read_text(path)?, id).map_err(|e| CliError::from(e).context(path.display()))
}

fn load_features(path: &Path) -> Result<Dataset> {
    read_features_csv(&read_text(path)?).map_err(|e| CliError::from(e).context(path.display()))
}

fn load_artifact(path: &Path) -> Result<ModelArtifact> {
    load_model(&read(path)?).map_err(|e| CliError::from(e).context(path.display()))
}

fn parse_kind(name: &str) -> Result<ModelKind> {
    name.trim()
        .parse()
        .map_err(|_| CliError::usage(format!("unknown model `{name}` (expected nb, logreg, knn, rf or svm)")))
}

fn train_config(model: &str, args: &TrainArgs) -> Result<TrainConfig> {
    let mut cfg = TrainConfig::new(parse_kind(model)?, args.seed).with_positive(args.positive.clone());
    cfg.class_weighted = args.class_weighted;
    Ok(cfg)
}

fn window_spec(args: &WindowArgs) -> Result<WindowSpec> {
    Ok(WindowSpec::new(args.window, args.overlap)?)
}

fn convert(input: &Path, out: &Path) -> Result<()> {
    let rec = load_recording(input)?;
    let bytes = if is_cwa(out) {
        write_cwa(&rec)?
    } else {
        write_samples_csv(&rec).into_bytes()
    };
    write_file(out, &bytes)?;
    eprintln!("{}: {} samples", out.display(), rec.samples.len());
    Ok(())
}

fn validate(input: &Path, rate: f64, tol: f64) -> Result<()> {
    let rec = load_recording(input)?;
    let report = validate_rate(&rec, rate, tol)?;
    let mut line = serde_json::to_vec(&report)?;
    line.push(b'\n');
    write_output(None, &line)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::validation(format!(
            "empirical rate {:.4} Hz is outside {rate} Hz ± {}%",
            report.empirical_hz,
            tol * 100.0
        )))
    }
}

fn featurize(args: &FeaturizeArgs) -> Result<()> {
    let n = args.samples.len();
    if args.annotations.len() != n {
        return Err(CliError::usage(format!(
            "{n} --samples but {} --annotations",
            args.annotations.len()
        )));
    }
    if !args.annotations2.is_empty() && args.annotations2.len() != n {
        return Err(CliError::usage(format!(
            "{n} --samples but {} --annotations2",
            args.annotations2.len()
        )));
    }
    if !args.id.is_empty() && args.id.len() != n {
        return Err(CliError::usage(format!("{n} --samples but {} --id", args.id.len())));
    }
    let mut inputs = Vec::with_capacity(n);
    for (i, path) in args.samples.iter().enumerate() {
        let id = match args.id.get(i) {
            Some(id) => id.clone(),
            None => stem(path),
        };
        let recording = load_recording(path)?;
        let mut annotations = load_annotations(&args.annotations[i], &id)?;
        if let Some(second) = args.annotations2.get(i) {
            annotations = merge_annotations(&annotations, &load_annotations(second, &id)?)?;
        }
        inputs.push(AnnotatedRecording {
            id,
            recording,
            annotations,
        });
    }
    let opts = DatasetOptions {
        window: window_spec(&args.window)?,
        features: FeatureConfig {
            sample_rate_hz: args.window.rate,
            ..FeatureConfig::default()
        },
        min_overlap: args.min_overlap,
        multiclass: args.multiclass,
    };
    let ds = build_dataset(&inputs, &opts)?;
    let spins = ds.labels.iter().filter(|l| *l == "spin").count();
    eprintln!("{} windows ({spins} spin) from {n} recordings", ds.len());
    write_output(args.out.as_deref(), write_features_csv(&ds).as_bytes())
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_string()
}

fn report(
    features: &Path,
    mode: ReportMode,
    models: &[String],
    k: usize,
    common: &TrainArgs,
    out: Option<&Path>,
    plot: Option<&Path>,
) -> Result<()> {
    let kinds = models.iter().map(|m| parse_kind(m)).collect::<Result<Vec<_>>>()?;
    let ds = load_features(features)?;
    let base = train_config("nb", common)?;
    let table = match mode {
        ReportMode::PerDog => per_group_report(&ds, &kinds, &base, k, common.seed)?,
        ReportMode::Pooled => pooled_report(&ds, &kinds, &base, k, common.seed)?,
    };
    if let Some(p) = plot {
        write_file(p, recall_bar_svg(&table).as_bytes())?;
    }
    match out {
        Some(p) => {
            write_file(p, table.to_csv().as_bytes())?;
            write_output(None, table.to_text().as_bytes())
        }
        None => write_output(None, table.to_csv().as_bytes()),
    }
}

fn detect(args: &DetectArgs) -> Result<()> {
    let model = load_artifact(&args.model)?;
    let window = window_spec(&args.window)?;
    // the artifact records feature names only; recover the cepstral count from them
    let features = (0..=window.length_samples)
        .map(|c| FeatureConfig {
            sample_rate_hz: args.window.rate,
            n_cepstral: c,
        })
        .find(|f| f.schema().hash() == model.schema_hash)
        .unwrap_or(FeatureConfig {
            sample_rate_hz: args.window.rate,
            ..FeatureConfig::default()
        });
    let cfg = DetectorConfig {
        window,
        features,
        m: args.m,
        n: args.n,
        refractory_ms: args.refractory_ms,
        nominal_rate_hz: args.window.rate,
    };
    let mut det = Detector::new(model, cfg)?;
    let mut out = io::stdout().lock();
    let (mut windows, mut positives, mut alerts) = (0usize, 0usize, 0usize);
    let mut step = |s, out: &mut io::StdoutLock| -> Result<()> {
        let o = det.push(s)?;
        if let Some(w) = o.window {
            windows += 1;
            positives += usize::from(w.positive);
        }
        if let Some(a) = o.alert {
            alerts += 1;
            writeln!(out, "{a}")?;
            out.flush()?;
        }
        Ok(())
    };
    if let Some(path) = &args.replay {
        for s in load_recording(path)?.samples {
            step(s, &mut out)?;
        }
    } else {
        for (i, line) in io::stdin().lock().lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            step(parse_live_line(trimmed, i + 1)?, &mut out)?;
        }
    }
    eprintln!("{windows} windows, {positives} positive, {alerts} alerts");
    Ok(())
}

fn synth(dir: &PathBuf, seed: u64, dogs: usize) -> Result<()> {
    if dogs == 0 {
        return Err(CliError::usage("--dogs must be at least 1"));
    }
    fs::create_dir_all(dir).map_err(|e| CliError::from(e).context(dir.display()))?;
    let cfg = SynthConfig {
        dogs,
        seed,
        ..SynthConfig::default()
    };
    for dog in corpus(&cfg) {
        write_file(&dir.join(format!("{}.cwa", dog.id)), &write_cwa(&dog.recording)?)?;
        write_file(
            &dir.join(format!("{}.annotations.csv", dog.id)),
            write_annotations_csv(&dog.annotations).as_bytes(),
        )?;
        write_file(
            &dir.join(format!("{}.annotations2.csv", dog.id)),
            write_annotations_csv(&dog.second_annotator).as_bytes(),
        )?;
    }
    let (rec, spin) = burst_scenario(&cfg, 0, seed, 60_000.0, 2000.0);
    write_file(&dir.join("stream.csv"), write_samples_csv(&rec).as_bytes())?;
    let track = AnnotationTrack::new("stream", "synth", vec![spin])?;
    write_file(&dir.join("stream.annotations.csv"), write_annotations_csv(&track).as_bytes())?;
    eprintln!("wrote {dogs} dogs and a streaming scenario to {}", dir.display());
    Ok(())
}
