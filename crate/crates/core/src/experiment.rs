//! End-to-end experiments on synthetic (or ingested) datasets and the
//! word-reading simulation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::braille::{
    correct_word, letter_to_pattern, line_pattern, perturb_word, Axis, BrailleLetter, ContactPattern, DisplayGeometry,
    LetterConfusion, TaxelCoord, WordCorpus,
};
use crate::error::bail;
use crate::features::{FeatureConfig, FeatureExtractor, ReprKind};
use crate::learn::{
    default_grid, grid_search, per_axis_rate, rmse, taxel_error_map, train, ConfusionMatrix, DistanceMetric,
    GridSearchResult, KnnConfig, KnnTask, ModelConfig, ModelKind, SensorModel, SvmConfig, TaxelErrorMap,
};
use crate::signal::AudioConfig;
use crate::sim::{
    generate_dataset, mix_seed, Dataset, DatasetPlan, Label, LabelSchema, PlanItem, SimConfig, Simulator, Split,
    SplitRatio,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "UPPERCASE"))]
pub enum ExperimentKind {
    Xline,
    Yline,
    Pin1,
    Pin4,
    Letters,
    Reprbench,
    Words,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Xline,
        ExperimentKind::Yline,
        ExperimentKind::Pin1,
        ExperimentKind::Pin4,
        ExperimentKind::Letters,
        ExperimentKind::Reprbench,
        ExperimentKind::Words,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Xline => "XLINE",
            ExperimentKind::Yline => "YLINE",
            ExperimentKind::Pin1 => "PIN1",
            ExperimentKind::Pin4 => "PIN4",
            ExperimentKind::Letters => "LETTERS",
            ExperimentKind::Reprbench => "REPRBENCH",
            ExperimentKind::Words => "WORDS",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SampleCount {
    PerClass(usize),
    Total(usize),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub samples: SampleCount,
    pub split: SplitRatio,
    /// Used directly, or as the fallback description when `grid` is set.
    pub model: ModelConfig,
    /// Cross-validated search replaces `model` when present.
    pub grid: Option<Vec<ModelConfig>>,
    pub folds: usize,
    pub repr: ReprKind,
    pub seed: u64,
    /// Display cell holding the letter in LETTERS-type experiments.
    pub letter_cell: usize,
    pub n_words: usize,
    pub error_metric: DistanceMetric,
}

/// Cell used for single letters by default.
pub const DEFAULT_LETTER_CELL: usize = 0;

impl ExperimentSpec {
    pub fn default_for(kind: ExperimentKind) -> Self {
        let knn_regress = ModelConfig::Knn(KnnConfig { k: 5, task: KnnTask::Regress, ..Default::default() });
        let svc = ModelConfig::Svm(SvmConfig::default());
        let base = Self {
            kind,
            samples: SampleCount::PerClass(200),
            split: SplitRatio::new(3, 2),
            model: svc.clone(),
            grid: None,
            folds: 5,
            repr: ReprKind::SmoothedSpectrum,
            seed: 0,
            letter_cell: DEFAULT_LETTER_CELL,
            n_words: 100_000,
            error_metric: DistanceMetric::Euclidean,
        };
        match kind {
            ExperimentKind::Xline => Self { model: knn_regress, ..base },
            ExperimentKind::Yline => Self { samples: SampleCount::PerClass(125), model: knn_regress, ..base },
            ExperimentKind::Pin1 => Self { samples: SampleCount::Total(500), split: SplitRatio::new(2, 1), ..base },
            ExperimentKind::Pin4 => Self { samples: SampleCount::Total(2000), split: SplitRatio::new(2, 1), ..base },
            ExperimentKind::Letters | ExperimentKind::Words => {
                Self { grid: Some(default_grid(ModelKind::Svm, LabelSchema::Classification)), ..base }
            }
            ExperimentKind::Reprbench => Self {
                samples: SampleCount::PerClass(40),
                grid: Some(default_grid(ModelKind::Svm, LabelSchema::Classification)),
                ..base
            },
        }
    }

    pub fn label_schema(&self) -> LabelSchema {
        match self.kind {
            ExperimentKind::Xline | ExperimentKind::Yline => LabelSchema::RegressionMm,
            ExperimentKind::Pin1 | ExperimentKind::Pin4 => LabelSchema::Taxel2d,
            _ => LabelSchema::Classification,
        }
    }

    pub fn validate(&self, geo: &DisplayGeometry) -> Result<()> {
        let n = match self.samples {
            SampleCount::PerClass(n) | SampleCount::Total(n) => n,
        };
        if n == 0 {
            bail!(Config, "{} needs at least one sample", self.kind);
        }
        if self.split.train == 0 || self.split.test == 0 {
            bail!(Config, "split {}:{} must have both parts positive", self.split.train, self.split.test);
        }
        let schema = self.label_schema();
        self.model.validate(schema)?;
        if let Some(grid) = &self.grid {
            if grid.is_empty() {
                bail!(Config, "grid search over an empty grid");
            }
            for g in grid {
                g.validate(schema)?;
            }
        }
        if self.letter_cell >= geo.usable_cells() {
            bail!(Config, "letter cell {} is outside the {} usable cells", self.letter_cell, geo.usable_cells());
        }
        if self.kind == ExperimentKind::Words && self.n_words == 0 {
            bail!(Config, "WORDS needs at least one word draw");
        }
        Ok(())
    }

    /// The patterns, labels and groups to record.
    pub fn plan(&self, geo: &DisplayGeometry) -> Result<DatasetPlan> {
        self.validate(geo)?;
        let mut items = Vec::new();
        let repeat = |n: usize, count: &SampleCount| match *count {
            SampleCount::PerClass(k) => Ok(k),
            SampleCount::Total(t) if t % n == 0 => Ok(t / n),
            SampleCount::Total(t) => Err(Error::Config(format!("{t} samples do not divide into {n} classes"))),
        };
        let class_names: Vec<String> = match self.kind {
            ExperimentKind::Xline | ExperimentKind::Yline => {
                let (axis, n) =
                    if self.kind == ExperimentKind::Xline { (Axis::X, geo.usable_cols) } else { (Axis::Y, geo.n_rows) };
                let per = repeat(n, &self.samples)?;
                let mut names = Vec::new();
                for g in 0..n {
                    let (pattern, mm) = line_pattern(axis, g, geo)?;
                    names.push(format!("{mm:.2}mm"));
                    for _ in 0..per {
                        items.push(PlanItem { pattern: pattern.clone(), label: Label::Millimetres(mm), group: g });
                    }
                }
                names
            }
            ExperimentKind::Pin1 | ExperimentKind::Pin4 => {
                let patch = if self.kind == ExperimentKind::Pin1 { 1 } else { 2 };
                if patch > geo.usable_cols || patch > geo.n_rows {
                    bail!(Config, "a {patch}x{patch} patch does not fit the usable grid");
                }
                let total = match self.samples {
                    SampleCount::Total(t) => t,
                    SampleCount::PerClass(k) => k * (geo.usable_cols + 1 - patch) * (geo.n_rows + 1 - patch),
                };
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, 0x9a7c));
                for _ in 0..total {
                    let anchor = TaxelCoord::new(
                        rng.random_range(0..=geo.usable_cols - patch),
                        rng.random_range(0..=geo.n_rows - patch),
                    );
                    let mut pattern = ContactPattern::empty(geo);
                    for dc in 0..patch {
                        for dr in 0..patch {
                            pattern.set(anchor.col as usize + dc, anchor.row as usize + dr, true);
                        }
                    }
                    items.push(PlanItem { pattern, label: Label::Taxel(anchor), group: geo.taxel_index(anchor) });
                }
                (0..geo.n_taxels()).map(|i| geo.taxel_from_index(i).to_string()).collect()
            }
            ExperimentKind::Letters | ExperimentKind::Reprbench | ExperimentKind::Words => {
                let per = repeat(26, &self.samples)?;
                for l in BrailleLetter::alphabet() {
                    let pattern = letter_to_pattern(l, self.letter_cell, geo)?;
                    for _ in 0..per {
                        items.push(PlanItem {
                            pattern: pattern.clone(),
                            label: Label::Class(l.index()),
                            group: l.index(),
                        });
                    }
                }
                BrailleLetter::alphabet().map(|l| l.letter().to_string()).collect()
            }
        };
        Ok(DatasetPlan { items, label_schema: self.label_schema(), class_names, split: self.split, seed: self.seed })
    }
}

/// Channel, display and feature settings shared by all experiments.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Setup {
    pub audio: AudioConfig,
    pub sim: SimConfig,
    pub geometry: DisplayGeometry,
    pub features: FeatureConfig,
}

impl Setup {
    pub fn simulator(&self) -> Result<Simulator> {
        Simulator::new(self.audio.clone(), self.sim.clone(), self.geometry.clone())
    }

    pub fn extractor(&self) -> Result<FeatureExtractor> {
        FeatureExtractor::new(self.features, self.audio.sample_rate_hz)
    }

    /// Synthesizes and featurizes the dataset of `spec` in representation `repr`.
    pub fn dataset(&self, spec: &ExperimentSpec, repr: ReprKind) -> Result<Dataset> {
        let plan = spec.plan(&self.geometry)?;
        generate_dataset(&plan, &self.simulator()?, &self.extractor()?, repr)
    }
}

/// One held-out prediction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Prediction {
    pub sample: usize,
    pub truth: Label,
    pub predicted: Label,
    pub true_group: usize,
    /// `None` for regression.
    pub predicted_group: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Metrics {
    pub n_train: usize,
    pub n_test: usize,
    pub rmse_mm: Option<f64>,
    pub accuracy: Option<f64>,
    pub confusion: Option<ConfusionMatrix>,
    /// Exact column and row match rates of taxel predictions.
    pub axis_rates: Option<(f64, f64)>,
    pub taxel_error: Option<TaxelErrorMap>,
}

impl Metrics {
    pub fn from_predictions(
        preds: &[Prediction],
        schema: LabelSchema,
        class_names: &[String],
        geo: &DisplayGeometry,
        metric: DistanceMetric,
    ) -> Result<Self> {
        if preds.is_empty() {
            bail!(Validation, "no held-out predictions to score");
        }
        let mut m = Metrics { n_test: preds.len(), ..Default::default() };
        match schema {
            LabelSchema::RegressionMm => {
                let (p, t): (Vec<f64>, Vec<f64>) = preds
                    .iter()
                    .map(|r| match (r.predicted, r.truth) {
                        (Label::Millimetres(p), Label::Millimetres(t)) => Ok((p, t)),
                        _ => Err(Error::Validation("regression prediction without millimetre labels".into())),
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .unzip();
                m.rmse_mm = Some(rmse(&p, &t)?);
            }
            LabelSchema::Classification | LabelSchema::Taxel2d => {
                let truth: Vec<usize> = preds.iter().map(|r| r.true_group).collect();
                let pred: Vec<usize> = preds
                    .iter()
                    .map(|r| r.predicted_group.ok_or_else(|| Error::Validation("missing predicted class".into())))
                    .collect::<Result<_>>()?;
                let cm = ConfusionMatrix::from_pairs(class_names.to_vec(), &truth, &pred)?;
                m.accuracy = Some(crate::learn::classification_rate(&cm)?);
                m.confusion = Some(cm);
                if schema == LabelSchema::Taxel2d {
                    let coords = |l: Label| match l {
                        Label::Taxel(t) => Ok(t),
                        _ => Err(Error::Validation("taxel prediction without taxel labels".into())),
                    };
                    let p: Vec<TaxelCoord> = preds.iter().map(|r| coords(r.predicted)).collect::<Result<_>>()?;
                    let t: Vec<TaxelCoord> = preds.iter().map(|r| coords(r.truth)).collect::<Result<_>>()?;
                    m.axis_rates = Some(per_axis_rate(&p, &t)?);
                    m.taxel_error = Some(taxel_error_map(&p, &t, geo.usable_cols, geo.n_rows, metric)?);
                }
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReprRow {
    pub repr: ReprKind,
    pub accuracy: f64,
    pub config: ModelConfig,
    pub predictions: Vec<Prediction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WordOutcome {
    /// Every letter read correctly.
    ReadExact,
    /// Misread to a non-word that the corrector mapped back.
    CorrectedBack,
    /// Misread to another corpus word; correction cannot notice.
    MisreadExisting,
    /// Misread and corrected to the wrong word, or not correctable.
    Failed,
}

impl WordOutcome {
    pub fn name(self) -> &'static str {
        match self {
            WordOutcome::ReadExact => "read_exact",
            WordOutcome::CorrectedBack => "corrected_back",
            WordOutcome::MisreadExisting => "misread_existing",
            WordOutcome::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordRecord {
    pub truth: String,
    pub read: String,
    pub corrected: String,
    pub outcome: WordOutcome,
}

/// Integer tallies of the word-reading simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WordCounts {
    pub read_exact: u64,
    pub corrected_back: u64,
    pub misread_existing: u64,
    pub failed: u64,
}

impl WordCounts {
    pub fn total(&self) -> u64 {
        self.read_exact + self.corrected_back + self.misread_existing + self.failed
    }

    pub fn add(&mut self, o: WordOutcome) {
        match o {
            WordOutcome::ReadExact => self.read_exact += 1,
            WordOutcome::CorrectedBack => self.corrected_back += 1,
            WordOutcome::MisreadExisting => self.misread_existing += 1,
            WordOutcome::Failed => self.failed += 1,
        }
    }

    pub fn outcome(&self) -> WordReadingOutcome {
        let n = self.total() as f64;
        let misread = self.total() - self.read_exact;
        WordReadingOutcome {
            fraction_correct_after_correction: (self.read_exact + self.corrected_back) as f64 / n,
            fraction_misread_to_existing_word: self.misread_existing as f64 / n,
            fraction_heuristic_failed: self.failed as f64 / n,
            fraction_corrected_back: if misread == 0 { 0.0 } else { self.corrected_back as f64 / misread as f64 },
            fraction_correct_without_correction: self.read_exact as f64 / n,
        }
    }
}

/// Fractions of all draws, except `fraction_corrected_back`, which is the
/// share of misread words that the corrector restored.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WordReadingOutcome {
    pub fraction_correct_after_correction: f64,
    pub fraction_misread_to_existing_word: f64,
    pub fraction_heuristic_failed: f64,
    pub fraction_corrected_back: f64,
    pub fraction_correct_without_correction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordReading {
    pub counts: WordCounts,
    pub outcome: WordReadingOutcome,
    pub log: Vec<WordRecord>,
}

/// Classifies one perturbed reading.
pub fn judge_word(truth: &str, read: &str, corpus: &WordCorpus) -> (String, WordOutcome) {
    if read == truth {
        return (read.to_string(), WordOutcome::ReadExact);
    }
    if corpus.contains(read) {
        return (read.to_string(), WordOutcome::MisreadExisting);
    }
    let corrected = correct_word(read, corpus);
    let outcome = if corrected == truth { WordOutcome::CorrectedBack } else { WordOutcome::Failed };
    (corrected.to_string(), outcome)
}

/// Draws `n_words` words uniformly from the corpus, misreads each letter per
/// `confusion` and corrects with the Hamming heuristic.
pub fn simulate_reading(
    corpus: &WordCorpus,
    confusion: &LetterConfusion,
    n_words: usize,
    seed: u64,
) -> Result<WordReading> {
    if corpus.is_empty() {
        bail!(Validation, "word corpus is empty");
    }
    if n_words == 0 {
        bail!(Config, "n_words must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x30d5));
    let mut counts = WordCounts::default();
    let mut log = Vec::with_capacity(n_words);
    for _ in 0..n_words {
        let truth = &corpus.words()[rng.random_range(0..corpus.len())];
        let read = perturb_word(truth, confusion, &mut rng)?;
        let (corrected, outcome) = judge_word(truth, &read, corpus);
        counts.add(outcome);
        log.push(WordRecord { truth: truth.clone(), read, corrected, outcome });
    }
    Ok(WordReading { counts, outcome: counts.outcome(), log })
}

/// Per-dot tallies of letter misreadings: each off-diagonal count is added to
/// every dot where the true and predicted letters differ. Index 0 is dot 1.
pub fn misread_pin_histogram(cm: &ConfusionMatrix) -> Result<[u64; 6]> {
    if cm.n_classes() != 26 {
        bail!(Validation, "expected a 26-letter confusion matrix, got {} classes", cm.n_classes());
    }
    let mut hist = [0u64; 6];
    for t in 0..26 {
        for p in (0..26).filter(|&p| p != t) {
            let count = cm.get(t, p);
            let diff = BrailleLetter::from_index(t).mask() ^ BrailleLetter::from_index(p).mask();
            for (d, h) in hist.iter_mut().enumerate() {
                if diff & (1 << d) != 0 {
                    *h += count;
                }
            }
        }
    }
    Ok(hist)
}

/// Result of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub spec: ExperimentSpec,
    pub class_names: Vec<String>,
    pub model: Option<SensorModel>,
    pub grid: Option<GridSearchResult>,
    pub predictions: Vec<Prediction>,
    pub metrics: Metrics,
    pub repr_table: Vec<ReprRow>,
    pub words: Option<WordReading>,
}

/// Trains per `spec` on the train split of `ds` (grid search first when the
/// spec has a grid) and scores the held-out split.
pub fn evaluate(ds: &Dataset, spec: &ExperimentSpec, geo: &DisplayGeometry) -> Result<ExperimentOutcome> {
    let grid = match &spec.grid {
        Some(g) => Some(grid_search(ds, g, spec.folds, spec.seed)?),
        None => None,
    };
    let config = grid.as_ref().map_or_else(|| spec.model.clone(), |g| g.best.clone());
    let model = train(ds, &config)?;
    let test = ds.indices(Split::Test);
    let predictions = crate::par::map_range(test.len(), |t| {
        let i = test[t];
        let x = ds.row(i);
        let predicted = model.predict(x)?;
        let predicted_group = match model.classes {
            Some(_) => Some(model.predict_group(x)?),
            None => None,
        };
        Ok(Prediction { sample: i, truth: ds.label(i), predicted, true_group: ds.group(i), predicted_group })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut metrics =
        Metrics::from_predictions(&predictions, ds.label_schema, &ds.class_names, geo, spec.error_metric)?;
    metrics.n_train = ds.len() - test.len();
    Ok(ExperimentOutcome {
        spec: ExperimentSpec { model: config, ..spec.clone() },
        class_names: ds.class_names.clone(),
        model: Some(model),
        grid,
        predictions,
        metrics,
        repr_table: Vec::new(),
        words: None,
    })
}

/// Generates the dataset for `spec` and evaluates it. REPRBENCH fills the
/// representation table; WORDS needs [`run_words`].
pub fn run_experiment(spec: &ExperimentSpec, setup: &Setup) -> Result<ExperimentOutcome> {
    match spec.kind {
        ExperimentKind::Reprbench => {
            let table = compare_representations(spec, setup)?;
            let ds = setup.dataset(spec, spec.repr)?;
            let fixed = ExperimentSpec {
                grid: None,
                model: table.iter().find(|r| r.repr == spec.repr).expect("all kinds present").config.clone(),
                ..spec.clone()
            };
            let mut out = evaluate(&ds, &fixed, &setup.geometry)?;
            out.spec.grid = spec.grid.clone();
            out.repr_table = table;
            Ok(out)
        }
        ExperimentKind::Words => bail!(Config, "WORDS needs a corpus; use run_words"),
        _ => {
            let ds = setup.dataset(spec, spec.repr)?;
            evaluate(&ds, spec, &setup.geometry)
        }
    }
}

/// Test accuracy of the same model search on every representation of the
/// same recordings.
pub fn compare_representations(spec: &ExperimentSpec, setup: &Setup) -> Result<Vec<ReprRow>> {
    ReprKind::ALL
        .into_iter()
        .map(|repr| {
            let ds = setup.dataset(spec, repr)?;
            let out = evaluate(&ds, spec, &setup.geometry)?;
            Ok(ReprRow {
                repr,
                accuracy: out.metrics.accuracy.unwrap_or(0.0),
                config: out.spec.model,
                predictions: out.predictions,
            })
        })
        .collect()
}

/// Runs the word-reading simulation. Without a given confusion matrix the
/// LETTERS experiment of `spec` is run first and its test confusion used.
pub fn run_words(
    spec: &ExperimentSpec,
    setup: &Setup,
    corpus: &WordCorpus,
    confusion: Option<LetterConfusion>,
) -> Result<ExperimentOutcome> {
    let (confusion, mut out) = match confusion {
        Some(c) => (
            c,
            ExperimentOutcome {
                spec: spec.clone(),
                class_names: BrailleLetter::alphabet().map(|l| l.letter().to_string()).collect(),
                model: None,
                grid: None,
                predictions: Vec::new(),
                metrics: Metrics::default(),
                repr_table: Vec::new(),
                words: None,
            },
        ),
        None => {
            let letters = ExperimentSpec { kind: ExperimentKind::Letters, ..spec.clone() };
            let mut out = run_experiment(&letters, setup)?;
            out.spec.kind = ExperimentKind::Words;
            let cm = out.metrics.confusion.as_ref().expect("LETTERS is a classification run");
            (LetterConfusion::from_counts(cm.counts())?, out)
        }
    };
    out.words = Some(simulate_reading(corpus, &confusion, spec.n_words, spec.seed)?);
    Ok(out)
}
