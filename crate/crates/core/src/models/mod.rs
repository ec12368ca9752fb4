//! The five classifier families, the persisted model artifact and
//! stratified cross-validation.
//!
//! [`train`] fits its own z-score normalizer on the rows it is given and
//! stores it in the artifact; [`predict`] applies that normalizer before
//! scoring. Inside cross-validation this keeps held-out rows out of the
//! normalization statistics.

pub mod cv;
pub mod forest;
pub mod knn;
pub mod linear;
pub mod naive_bayes;

pub use cv::{cross_validate, cross_validate_auto, cross_validate_loo, stratified_folds, CvMethod, CvReport, Folds};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::features::{fit_normalizer, Dataset, FeatureError, FeatureVector, NormalizationStats, SchemaHash};
use crate::preprocess::WindowLabel;
use forest::Forest;
use knn::Knn;
use linear::{fit_logistic, fit_pegasos, sigmoid, LinearModel};
use naive_bayes::GaussianNb;

pub const MODEL_FORMAT: &str = "collarwave-model";
pub const MODEL_VERSION: u64 = 1;
pub const MIN_TRAIN_ROWS: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("training data holds a single class")]
    SingleClassDataset,
    #[error("{rows} rows, need at least {needed}")]
    TooFewRows { rows: usize, needed: usize },
    #[error("schema mismatch: model expects {expected}, got {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("feature vector contains non-finite values")]
    NonFiniteInput,
    #[error("positive label `{0}` does not occur in the training data")]
    MissingPositiveClass(String),
    #[error("class `{class}` has {count} rows, fewer than k = {k}")]
    ClassSmallerThanK { class: String, count: usize, k: usize },
    #[error("unsupported model artifact version {0}")]
    VersionMismatch(String),
    #[error("corrupt model artifact: {0}")]
    CorruptArtifact(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    SvmLinear,
    Logreg,
    Knn,
    RandomForest,
    NaiveBayes,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::SvmLinear,
        ModelKind::Logreg,
        ModelKind::Knn,
        ModelKind::RandomForest,
        ModelKind::NaiveBayes,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::SvmLinear => "svm_linear",
            ModelKind::Logreg => "logreg",
            ModelKind::Knn => "knn",
            ModelKind::RandomForest => "random_forest",
            ModelKind::NaiveBayes => "naive_bayes",
        }
    }

    /// Short command-line name.
    pub fn short(self) -> &'static str {
        match self {
            ModelKind::SvmLinear => "svm",
            ModelKind::Logreg => "logreg",
            ModelKind::Knn => "knn",
            ModelKind::RandomForest => "rf",
            ModelKind::NaiveBayes => "nb",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s || k.short() == s)
            .ok_or_else(|| format!("unknown model `{s}` (expected nb, logreg, knn, rf or svm)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    /// Variance floor as a fraction of the largest column variance.
    pub var_smoothing: f64,
}

impl Default for NaiveBayesParams {
    fn default() -> Self {
        Self { var_smoothing: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegParams {
    pub lambda: f64,
    pub learning_rate: f64,
    pub iterations: usize,
}

impl Default for LogRegParams {
    fn default() -> Self {
        Self {
            lambda: 1e-3,
            learning_rate: 0.1,
            iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self { k: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows trees until leaves are pure.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// `None` means `⌈√d⌉`.
    pub max_features: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_split: 2,
            max_features: None,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            lambda: 1e-2,
            epochs: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub seed: u64,
    pub positive_label: String,
    /// Inverse-frequency class weights for logreg and svm, uniform priors for naive Bayes.
    pub class_weighted: bool,
    pub naive_bayes: NaiveBayesParams,
    pub logreg: LogRegParams,
    pub knn: KnnParams,
    pub forest: ForestParams,
    pub svm: SvmParams,
}

impl TrainConfig {
    pub fn new(kind: ModelKind, seed: u64) -> Self {
        Self {
            kind,
            seed,
            positive_label: WindowLabel::SPIN.to_string(),
            class_weighted: false,
            naive_bayes: NaiveBayesParams::default(),
            logreg: LogRegParams::default(),
            knn: KnnParams::default(),
            forest: ForestParams::default(),
            svm: SvmParams::default(),
        }
    }

    pub fn with_positive(mut self, label: impl Into<String>) -> Self {
        self.positive_label = label.into();
        self
    }

    fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidConfig(m.to_string()));
        if self.knn.k == 0 {
            return bad("knn.k must be positive");
        }
        if self.forest.n_trees == 0 {
            return bad("forest.n_trees must be positive");
        }
        if self.svm.lambda <= 0.0 || self.svm.epochs == 0 {
            return bad("svm needs lambda > 0 and at least one epoch");
        }
        if self.logreg.lambda < 0.0 || self.logreg.learning_rate <= 0.0 {
            return bad("logreg needs lambda >= 0 and a positive learning rate");
        }
        Ok(())
    }
}

/// One linear scorer per class, or a single positive-vs-rest scorer when
/// there are exactly two classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsRest {
    pub classes: Vec<usize>,
    pub models: Vec<LinearModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Learned {
    NaiveBayes(GaussianNb),
    Logreg(OneVsRest),
    Knn(Knn),
    RandomForest(Forest),
    SvmLinear(OneVsRest),
}

impl Learned {
    fn kind(&self) -> ModelKind {
        match self {
            Learned::NaiveBayes(_) => ModelKind::NaiveBayes,
            Learned::Logreg(_) => ModelKind::Logreg,
            Learned::Knn(_) => ModelKind::Knn,
            Learned::RandomForest(_) => ModelKind::RandomForest,
            Learned::SvmLinear(_) => ModelKind::SvmLinear,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub classes: Vec<String>,
    pub positive_label: String,
    pub learned: Learned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub seed: u64,
    pub config: TrainConfig,
    pub dataset_fingerprint: String,
    pub training_rows: usize,
    pub schema: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format: String,
    pub version: u64,
    pub kind: ModelKind,
    pub schema_hash: SchemaHash,
    pub normalization: NormalizationStats,
    pub params: ModelParams,
    pub meta: ModelMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub label: String,
    /// Positive-class confidence in `[0, 1]`.
    pub score: f64,
}

impl ModelArtifact {
    pub fn positive_index(&self) -> usize {
        self.params
            .classes
            .iter()
            .position(|c| *c == self.params.positive_label)
            .unwrap_or(0)
    }

    pub fn dim(&self) -> usize {
        self.normalization.dim()
    }

    /// Per-class scores for an already normalized row.
    pub fn class_scores(&self, x: &[f64]) -> Vec<f64> {
        let n_classes = self.params.classes.len();
        match &self.params.learned {
            Learned::NaiveBayes(nb) => nb.posteriors(x),
            Learned::Knn(knn) => knn.vote_fractions(x, n_classes),
            Learned::RandomForest(f) => f.vote_fractions(x, n_classes),
            Learned::Logreg(ovr) | Learned::SvmLinear(ovr) => {
                let mut s = vec![0.0; n_classes];
                if n_classes == 2 && ovr.models.len() == 1 {
                    let p = sigmoid(ovr.models[0].margin(x));
                    let pos = ovr.classes[0];
                    s[pos] = p;
                    s[1 - pos] = 1.0 - p;
                } else {
                    for (&c, m) in ovr.classes.iter().zip(&ovr.models) {
                        s[c] = sigmoid(m.margin(x));
                    }
                }
                s
            }
        }
    }

    /// Scores a normalized row: argmax class, ties resolved towards the
    /// positive class and then towards the lower class index.
    pub fn predict_normalized(&self, x: &[f64]) -> Prediction {
        let scores = self.class_scores(x);
        let pos = self.positive_index();
        let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let idx = if scores[pos] == best {
            pos
        } else {
            scores.iter().position(|&s| s == best).unwrap_or(pos)
        };
        Prediction {
            label: self.params.classes[idx].clone(),
            score: scores[pos].clamp(0.0, 1.0),
        }
    }

    /// Normalizes a raw feature row with the stored statistics and scores it.
    pub fn predict_raw(&self, values: &[f64]) -> Result<Prediction, ModelError> {
        if values.len() != self.dim() {
            return Err(ModelError::Feature(FeatureError::DimensionMismatch {
                expected: self.dim(),
                found: values.len(),
            }));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteInput);
        }
        Ok(self.predict_normalized(&self.normalization.apply_row(values)))
    }

    fn check_consistency(&self) -> Result<(), ModelError> {
        let corrupt = |m: &str| Err(ModelError::CorruptArtifact(m.to_string()));
        if self.params.learned.kind() != self.kind {
            return corrupt("kind does not match parameters");
        }
        let n_classes = self.params.classes.len();
        if n_classes < 2 || !self.params.classes.contains(&self.params.positive_label) {
            return corrupt("class list");
        }
        let d = self.dim();
        if self.normalization.std.len() != d || self.meta.schema.len() != d {
            return corrupt("normalization and schema disagree");
        }
        let ok = match &self.params.learned {
            Learned::NaiveBayes(nb) => {
                nb.priors.len() == n_classes
                    && nb.means.iter().chain(&nb.variances).all(|v| v.len() == d)
                    && nb.means.len() == n_classes
                    && nb.variances.len() == n_classes
                    && nb.variances.iter().flatten().all(|&v| v > 0.0)
            }
            Learned::Knn(k) => {
                k.k > 0
                    && !k.points.is_empty()
                    && k.points.len() == k.labels.len()
                    && k.points.iter().all(|p| p.len() == d)
                    && k.labels.iter().all(|&l| l < n_classes)
            }
            Learned::RandomForest(f) => {
                !f.trees.is_empty()
                    && f.trees.iter().all(|t| {
                        !t.nodes.is_empty()
                            && t.nodes.iter().enumerate().all(|(i, n)| match *n {
                                forest::Node::Leaf { class } => class < n_classes,
                                forest::Node::Split { feature, left, right, .. } => {
                                    feature < d && left > i && right > i && left < t.nodes.len() && right < t.nodes.len()
                                }
                            })
                    })
            }
            Learned::Logreg(o) | Learned::SvmLinear(o) => {
                !o.models.is_empty()
                    && o.classes.len() == o.models.len()
                    && o.classes.iter().all(|&c| c < n_classes)
                    && o.models.iter().all(|m| m.weights.len() == d)
            }
        };
        if ok {
            Ok(())
        } else {
            corrupt("parameter shapes")
        }
    }
}

fn class_weights(y: &[usize], n_classes: usize, enabled: bool) -> Vec<f64> {
    if !enabled {
        return vec![1.0; y.len()];
    }
    let mut counts = vec![0usize; n_classes];
    for &c in y {
        counts[c] += 1;
    }
    let n = y.len() as f64;
    y.iter()
        .map(|&c| n / (n_classes as f64 * counts[c] as f64))
        .collect()
}

fn fit_ovr(
    y: &[usize],
    n_classes: usize,
    pos: usize,
    mut fit: impl FnMut(usize, &[f64]) -> LinearModel,
) -> OneVsRest {
    let targets: Vec<usize> = if n_classes == 2 { vec![pos] } else { (0..n_classes).collect() };
    let models = targets
        .iter()
        .map(|&c| {
            let t: Vec<f64> = y.iter().map(|&l| if l == c { 1.0 } else { 0.0 }).collect();
            fit(c, &t)
        })
        .collect();
    OneVsRest {
        classes: targets,
        models,
    }
}

/// Trains one classifier. The normalizer is fit on `ds` and stored with the model.
pub fn train(ds: &Dataset, cfg: &TrainConfig) -> Result<ModelArtifact, ModelError> {
    cfg.validate()?;
    if let Some(r) = ds.rows.iter().find(|r| r.len() != ds.dim()) {
        return Err(ModelError::SchemaMismatch {
            expected: format!("{} columns", ds.dim()),
            found: format!("{} columns", r.len()),
        });
    }
    let classes = ds.classes();
    if classes.len() < 2 {
        return Err(ModelError::SingleClassDataset);
    }
    if ds.len() < MIN_TRAIN_ROWS {
        return Err(ModelError::TooFewRows {
            rows: ds.len(),
            needed: MIN_TRAIN_ROWS,
        });
    }
    if ds.rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteInput);
    }
    let pos = classes
        .iter()
        .position(|c| *c == cfg.positive_label)
        .ok_or_else(|| ModelError::MissingPositiveClass(cfg.positive_label.clone()))?;
    let n_classes = classes.len();
    let y: Vec<usize> = ds
        .labels
        .iter()
        .map(|l| classes.binary_search(l).expect("label from class list"))
        .collect();

    let normalization = fit_normalizer(ds)?;
    let x: Vec<Vec<f64>> = ds.rows.iter().map(|r| normalization.apply_row(r)).collect();
    let weights = class_weights(&y, n_classes, cfg.class_weighted);

    let learned = match cfg.kind {
        ModelKind::NaiveBayes => Learned::NaiveBayes(GaussianNb::fit(
            &x,
            &y,
            n_classes,
            &cfg.naive_bayes,
            cfg.class_weighted,
        )),
        ModelKind::Logreg => Learned::Logreg(fit_ovr(&y, n_classes, pos, |_, t| {
            fit_logistic(&x, t, &weights, &cfg.logreg)
        })),
        ModelKind::SvmLinear => Learned::SvmLinear(fit_ovr(&y, n_classes, pos, |c, t| {
            let signed: Vec<f64> = t.iter().map(|v| 2.0 * v - 1.0).collect();
            fit_pegasos(&x, &signed, &weights, &cfg.svm, cfg.seed.wrapping_add(c as u64), false).model
        })),
        ModelKind::Knn => Learned::Knn(Knn {
            k: cfg.knn.k,
            points: x,
            labels: y,
        }),
        ModelKind::RandomForest => {
            Learned::RandomForest(Forest::fit(&x, &y, n_classes, pos, &cfg.forest, cfg.seed))
        }
    };

    Ok(ModelArtifact {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        kind: cfg.kind,
        schema_hash: ds.schema.hash(),
        normalization,
        params: ModelParams {
            classes,
            positive_label: cfg.positive_label.clone(),
            learned,
        },
        meta: ModelMeta {
            seed: cfg.seed,
            config: cfg.clone(),
            dataset_fingerprint: ds.fingerprint(),
            training_rows: ds.len(),
            schema: ds.schema.names().to_vec(),
        },
    })
}

/// Scores a raw feature vector, refusing vectors from a different schema.
pub fn predict(m: &ModelArtifact, v: &FeatureVector) -> Result<Prediction, ModelError> {
    if v.schema_hash != m.schema_hash {
        return Err(ModelError::SchemaMismatch {
            expected: m.schema_hash.0.clone(),
            found: v.schema_hash.0.clone(),
        });
    }
    m.predict_raw(&v.values)
}

/// Scores every row of a raw (unnormalized) dataset.
pub fn predict_rows(m: &ModelArtifact, ds: &Dataset) -> Result<Vec<Prediction>, ModelError> {
    let found = ds.schema.hash();
    if found != m.schema_hash {
        return Err(ModelError::SchemaMismatch {
            expected: m.schema_hash.0.clone(),
            found: found.0,
        });
    }
    ds.rows.iter().map(|r| m.predict_raw(r)).collect()
}

pub fn save_model(m: &ModelArtifact) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(m).expect("model artifacts always serialize");
    out.push(b'\n');
    out
}

pub fn load_model(bytes: &[u8]) -> Result<ModelArtifact, ModelError> {
    let doc: Value =
        serde_json::from_slice(bytes).map_err(|e| ModelError::CorruptArtifact(e.to_string()))?;
    if doc.get("format").and_then(Value::as_str) != Some(MODEL_FORMAT) {
        return Err(ModelError::CorruptArtifact("missing or foreign format tag".into()));
    }
    match doc.get("version") {
        Some(v) if v.as_u64() == Some(MODEL_VERSION) => {}
        Some(v) => return Err(ModelError::VersionMismatch(v.to_string())),
        None => return Err(ModelError::CorruptArtifact("missing version".into())),
    }
    let m: ModelArtifact =
        serde_json::from_value(doc).map_err(|e| ModelError::CorruptArtifact(e.to_string()))?;
    m.check_consistency()?;
    Ok(m)
}
