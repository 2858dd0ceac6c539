//! Sensor models mapping feature vectors to contact states: k-nearest
//! neighbors, one-vs-rest soft-margin SVM and a small fully connected network,
//! plus cross-validated grid search and evaluation metrics.
//!
//! Every model standardizes features with per-feature mean and standard
//! deviation fitted on its training rows only. A feature with zero variance
//! keeps a scale of 1, so it is centered but not blown up.

mod grid;
mod knn;
mod linalg;
mod metrics;
mod mlp;
mod svm;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

pub use grid::{default_grid, grid_search, stratified_folds, CvMetric, CvRow, GridSearchResult};
pub use knn::{KnnConfig, KnnModel, KnnTask, Weighting};
pub use metrics::{
    classification_rate, per_axis_rate, rmse, taxel_error_map, ConfusionMatrix, DistanceMetric, TaxelErrorMap,
};
pub use mlp::{Activation, Mlp, MlpConfig, MlpModel, MlpTarget};
pub use svm::{smo, BinarySolution, Kernel, SvmConfig, SvmModel};

use crate::error::bail;
use crate::sim::{Dataset, Label, LabelSchema, Split};
use crate::{Error, Result};

/// Per-feature affine normalization.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    /// Fits on the given rows of `ds`.
    pub fn fit(ds: &Dataset, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            bail!(Validation, "cannot fit a standardizer on zero rows");
        }
        let d = ds.dim();
        let n = indices.len() as f64;
        let mut mean = alloc::vec![0.0; d];
        for &i in indices {
            for (m, &v) in mean.iter_mut().zip(ds.row(i)) {
                *m += f64::from(v);
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = alloc::vec![0.0; d];
        for &i in indices {
            for ((s, &v), m) in var.iter_mut().zip(ds.row(i)).zip(&mean) {
                let c = f64::from(v) - m;
                *s += c * c;
            }
        }
        let scale = var.into_iter().map(|s| if s > 0.0 { libm::sqrt(s / n) } else { 1.0 }).collect();
        Ok(Self { mean, scale })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply_into<T: Copy + Into<f64>>(&self, x: &[T], out: &mut [f64]) {
        for (((o, &v), m), s) in out.iter_mut().zip(x).zip(&self.mean).zip(&self.scale) {
            *o = (v.into() - m) / s;
        }
    }

    pub fn apply<T: Copy + Into<f64>>(&self, x: &[T]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; x.len()];
        self.apply_into(x, &mut out);
        out
    }

    /// Standardized copies of the given dataset rows, row-major.
    pub fn transform_rows(&self, ds: &Dataset, indices: &[usize]) -> Vec<f64> {
        let d = self.dim();
        let mut out = alloc::vec![0.0; d * indices.len()];
        for (o, &i) in out.chunks_exact_mut(d).zip(indices) {
            self.apply_into(ds.row(i), o);
        }
        out
    }
}

/// Training targets after label decoding.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Targets {
    /// Positions into the model's class list.
    Classes(Vec<usize>),
    Values(Vec<f64>),
}

/// Class bookkeeping for classification schemas: the dataset groups seen in
/// training, sorted, with the label each stands for.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClassSet {
    pub groups: Vec<usize>,
    pub labels: Vec<Label>,
}

impl ClassSet {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }
}

pub(crate) fn decode_targets(ds: &Dataset, indices: &[usize]) -> Result<(Option<ClassSet>, Targets)> {
    match ds.label_schema {
        LabelSchema::RegressionMm => {
            let values = indices
                .iter()
                .map(|&i| match ds.label(i) {
                    Label::Millimetres(v) => Ok(v),
                    other => Err(Error::Validation(format!("sample {i} has label {other:?} in a regression set"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((None, Targets::Values(values)))
        }
        LabelSchema::Classification | LabelSchema::Taxel2d => {
            let mut groups: Vec<usize> = indices.iter().map(|&i| ds.group(i)).collect();
            groups.sort_unstable();
            groups.dedup();
            if groups.len() < 2 {
                bail!(Validation, "training rows contain {} class(es); at least 2 are needed", groups.len());
            }
            let labels = groups
                .iter()
                .map(|&g| {
                    let first = indices.iter().copied().find(|&i| ds.group(i) == g);
                    ds.label(first.expect("group taken from these rows"))
                })
                .collect();
            let idx = indices.iter().map(|&i| groups.binary_search(&ds.group(i)).expect("group is listed")).collect();
            Ok((Some(ClassSet { groups, labels }), Targets::Classes(idx)))
        }
    }
}

/// Index of the largest value; the first one wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum ModelKind {
    Knn,
    Svm,
    Mlp,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Knn => "knn",
            ModelKind::Svm => "svm",
            ModelKind::Mlp => "mlp",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "knn" => Ok(ModelKind::Knn),
            "svm" | "svc" => Ok(ModelKind::Svm),
            "mlp" | "nn" => Ok(ModelKind::Mlp),
            _ => Err(Error::Config(format!("unknown model kind {s:?} (expected knn, svm or mlp)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum ModelConfig {
    Knn(KnnConfig),
    Svm(SvmConfig),
    Mlp(MlpConfig),
}

impl ModelConfig {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::Knn(_) => ModelKind::Knn,
            ModelConfig::Svm(_) => ModelKind::Svm,
            ModelConfig::Mlp(_) => ModelKind::Mlp,
        }
    }

    /// Default configuration of `kind` suited to `schema`.
    pub fn default_for(kind: ModelKind, schema: LabelSchema) -> Self {
        match kind {
            ModelKind::Knn => ModelConfig::Knn(KnnConfig { task: KnnTask::for_schema(schema), ..Default::default() }),
            ModelKind::Svm => ModelConfig::Svm(SvmConfig::default()),
            ModelKind::Mlp => ModelConfig::Mlp(MlpConfig::default()),
        }
    }

    pub fn validate(&self, schema: LabelSchema) -> Result<()> {
        match self {
            ModelConfig::Knn(c) => c.validate(schema),
            ModelConfig::Svm(c) => {
                if schema == LabelSchema::RegressionMm {
                    bail!(Config, "the SVM is a classifier; use knn or mlp for regression");
                }
                c.validate()
            }
            ModelConfig::Mlp(c) => c.validate(),
        }
    }
}

impl fmt::Display for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelConfig::Knn(c) => write!(f, "knn k={} weighting={} task={}", c.k, c.weighting.name(), c.task.name()),
            ModelConfig::Svm(c) => match c.kernel {
                Kernel::Linear => write!(f, "svm kernel=linear c={}", c.c),
                Kernel::Rbf { gamma } => write!(f, "svm kernel=rbf c={} gamma={}", c.c, gamma),
            },
            ModelConfig::Mlp(c) => write!(
                f,
                "mlp hidden={:?} activation={} lr={} epochs={} batch={}",
                c.hidden_layers,
                c.activation.name(),
                c.learning_rate,
                c.epochs,
                c.batch_size
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "lowercase"))]
pub enum ModelParams {
    Knn(KnnModel),
    Svm(SvmModel),
    Mlp(MlpModel),
}

/// A trained model. Immutable; prediction takes `&self` and may run
/// concurrently.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SensorModel {
    pub label_schema: LabelSchema,
    pub config: ModelConfig,
    pub standardizer: Standardizer,
    /// `None` for regression.
    pub classes: Option<ClassSet>,
    pub params: ModelParams,
}

impl SensorModel {
    pub fn kind(&self) -> ModelKind {
        self.config.kind()
    }

    pub fn dim(&self) -> usize {
        self.standardizer.dim()
    }

    fn prepare<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), actual: x.len() });
        }
        Ok(self.standardizer.apply(x))
    }

    /// Raw model outputs: one score per class for classifiers (vote weight,
    /// SVM decision value or network logit), a single value for regressors.
    pub fn decision_values<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<Vec<f64>> {
        let z = self.prepare(x)?;
        Ok(match &self.params {
            ModelParams::Knn(m) => m.decision_values(&z),
            ModelParams::Svm(m) => m.decision_values(&z),
            ModelParams::Mlp(m) => m.decision_values(&z),
        })
    }

    /// Position in [`SensorModel::classes`] of the predicted class.
    pub fn predict_class_index<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<usize> {
        if self.classes.is_none() {
            bail!(Config, "a regression model has no classes");
        }
        Ok(argmax(&self.decision_values(x)?))
    }

    /// Predicted dataset group (class, taxel or letter index).
    pub fn predict_group<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<usize> {
        let i = self.predict_class_index(x)?;
        Ok(self.classes.as_ref().expect("checked above").groups[i])
    }

    pub fn predict<T: Copy + Into<f64>>(&self, x: &[T]) -> Result<Label> {
        match &self.classes {
            Some(cs) => Ok(cs.labels[self.predict_class_index(x)?]),
            None => Ok(Label::Millimetres(self.decision_values(x)?[0])),
        }
    }
}

/// Trains on the train split of `ds`.
pub fn train(ds: &Dataset, config: &ModelConfig) -> Result<SensorModel> {
    fit(ds, &ds.indices(Split::Train), config)
}

/// Trains on the given rows, which must all belong to the train split.
pub fn fit(ds: &Dataset, indices: &[usize], config: &ModelConfig) -> Result<SensorModel> {
    debug_assert!(indices.iter().all(|&i| ds.split(i) == Split::Train), "held-out rows reached a training computation");
    if indices.is_empty() {
        bail!(Validation, "the training split is empty");
    }
    config.validate(ds.label_schema)?;
    let standardizer = Standardizer::fit(ds, indices)?;
    let x = standardizer.transform_rows(ds, indices);
    let (classes, targets) = decode_targets(ds, indices)?;
    let params = fit_standardized(x, ds.dim(), &targets, classes.as_ref().map_or(0, ClassSet::len), config, None)?;
    Ok(SensorModel { label_schema: ds.label_schema, config: config.clone(), standardizer, classes, params })
}

/// Fits on already standardized rows. `gram` optionally supplies the
/// precomputed inner products of `x` for the SVM.
pub(crate) fn fit_standardized(
    x: Vec<f64>,
    d: usize,
    targets: &Targets,
    n_classes: usize,
    config: &ModelConfig,
    gram: Option<&[f64]>,
) -> Result<ModelParams> {
    Ok(match config {
        ModelConfig::Knn(c) => ModelParams::Knn(KnnModel::fit(c, x, d, targets, n_classes)?),
        ModelConfig::Svm(c) => {
            let Targets::Classes(y) = targets else {
                bail!(Config, "the SVM is a classifier; use knn or mlp for regression");
            };
            let own;
            let g = match gram {
                Some(g) => g,
                None => {
                    own = linalg::gram(&x, d);
                    &own
                }
            };
            ModelParams::Svm(SvmModel::fit(c, &x, d, g, y, n_classes)?)
        }
        ModelConfig::Mlp(c) => ModelParams::Mlp(MlpModel::fit(c, &x, d, targets, n_classes)?),
    })
}
