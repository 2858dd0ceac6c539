//! Report artifacts: a `key = value` summary in `report.txt` and flat CSV
//! files that every summary metric can be recomputed from.

use std::fmt::Display;
use std::fs;
use std::path::Path;

use soundtaxel_core::braille::TaxelCoord;
use soundtaxel_core::experiment::{
    misread_pin_histogram, ExperimentKind, ExperimentOutcome, Prediction, ReprRow, WordReading,
};
use soundtaxel_core::learn::{ConfusionMatrix, GridSearchResult, TaxelErrorMap};
use soundtaxel_core::sim::Label;

use crate::error::{Error, IoContext, Result};

pub const REPORT: &str = "report.txt";
pub const PREDICTIONS: &str = "predictions.csv";
pub const CONFUSION: &str = "confusion.csv";
pub const TAXEL_ERROR: &str = "taxel_error.csv";
pub const ACCURACY: &str = "accuracy.csv";
pub const CV: &str = "cv.csv";
pub const WORDS: &str = "words.csv";
pub const PIN_ERRORS: &str = "pin_errors.csv";
/// The only line of `report.txt` allowed to differ between identical runs.
pub const WALL_TIME_KEY: &str = "wall_time_s";

/// Ordered `key = value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportText {
    pub entries: Vec<(String, String)>,
}

impl ReportText {
    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut out = Self::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| Error::format(path, format!("line {}", i + 1), "expected `key = value`"))?;
            out.push(k, v);
        }
        Ok(out)
    }
}

/// Label text used in prediction files: class name, millimetres, or
/// `col:row` for taxels.
pub fn label_text(label: Label, group: Option<usize>, class_names: &[String]) -> String {
    match (label, group) {
        (Label::Millimetres(mm), _) => mm.to_string(),
        (Label::Taxel(t), _) => format!("{}:{}", t.col, t.row),
        (Label::Class(_), Some(g)) => class_names[g].clone(),
        (Label::Class(c), None) => c.to_string(),
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    let file = fs::File::create(path).at(path)?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, "csv", format!("{other:?}")),
    }
}

fn write_rows<I, R>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).map_err(|e| csv_err(path, e))?;
    }
    w.flush().at(path)
}

fn strings(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn opt<T: Display>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub fn write_predictions(path: &Path, preds: &[Prediction], class_names: &[String]) -> Result<()> {
    write_rows(
        path,
        &strings(&["sample", "truth", "predicted", "true_group", "predicted_group"]),
        preds.iter().map(|p| {
            [
                p.sample.to_string(),
                label_text(p.truth, Some(p.true_group), class_names),
                label_text(p.predicted, p.predicted_group, class_names),
                p.true_group.to_string(),
                opt(p.predicted_group),
            ]
        }),
    )
}

pub fn write_confusion(path: &Path, cm: &ConfusionMatrix) -> Result<()> {
    let mut header = vec!["truth".to_string()];
    header.extend(cm.class_names.iter().cloned());
    write_rows(
        path,
        &header,
        (0..cm.n_classes()).map(|t| {
            std::iter::once(cm.class_names[t].clone()).chain(cm.row(t).iter().map(u64::to_string)).collect::<Vec<_>>()
        }),
    )
}

pub fn write_taxel_error(path: &Path, map: &TaxelErrorMap) -> Result<()> {
    let mut rows = Vec::new();
    for row in 0..map.n_rows {
        for col in 0..map.n_cols {
            rows.push([
                col.to_string(),
                row.to_string(),
                map.sample_count(col, row).to_string(),
                opt(map.mean_distance(col, row)),
            ]);
        }
    }
    write_rows(path, &strings(&["col", "row", "n_test", "mean_distance"]), rows)
}

pub fn write_cv(path: &Path, grid: &GridSearchResult) -> Result<()> {
    let mut header = vec!["config".to_string()];
    header.extend((1..=grid.folds).map(|f| format!("fold_{f}")));
    header.extend(strings(&["mean", "rejected"]));
    write_rows(
        path,
        &header,
        grid.table.iter().map(|r| {
            let mut row = vec![r.config.to_string()];
            row.extend((0..grid.folds).map(|f| opt(r.fold_scores.get(f))));
            row.push(opt(r.mean));
            row.push(r.rejected.clone().unwrap_or_default());
            row
        }),
    )
}

pub fn write_accuracy_table(path: &Path, table: &[ReprRow]) -> Result<()> {
    write_rows(
        path,
        &strings(&["repr", "accuracy", "model"]),
        table.iter().map(|r| [r.repr.name().to_string(), r.accuracy.to_string(), r.config.to_string()]),
    )
}

pub fn write_words(path: &Path, words: &WordReading) -> Result<()> {
    write_rows(
        path,
        &strings(&["truth", "read", "corrected", "outcome"]),
        words.log.iter().map(|r| [r.truth.clone(), r.read.clone(), r.corrected.clone(), r.outcome.name().to_string()]),
    )
}

pub fn write_pin_errors(path: &Path, hist: &[u64; 6]) -> Result<()> {
    write_rows(
        path,
        &strings(&["dot", "count"]),
        hist.iter().enumerate().map(|(d, c)| [(d + 1).to_string(), c.to_string()]),
    )
}

/// Physical-rig values measured on the original hardware, printed next to
/// the synthetic results for scale.
fn rig_reference(kind: ExperimentKind) -> &'static [(&'static str, f64)] {
    match kind {
        ExperimentKind::Xline => &[("rmse_mm", 1.67)],
        ExperimentKind::Yline => &[("rmse_mm", 0.0)],
        ExperimentKind::Pin1 => &[("col_rate", 0.76), ("row_rate", 0.79), ("taxel_error_mean", 0.80)],
        ExperimentKind::Pin4 => &[("col_rate", 0.85), ("row_rate", 0.94), ("taxel_error_mean", 0.39)],
        ExperimentKind::Letters => &[("accuracy", 0.88)],
        ExperimentKind::Reprbench => &[("accuracy_spectrum", 0.90), ("accuracy_smoothed_spectrum", 0.88)],
        ExperimentKind::Words => &[
            ("accuracy", 0.88),
            ("words_fraction_correct_after_correction", 0.95),
            ("words_fraction_misread_to_existing_word", 0.01),
            ("words_fraction_heuristic_failed", 0.05),
            ("words_fraction_corrected_back", 0.39),
        ],
    }
}

/// Metric lines shared by `xp` and `eval` reports.
pub fn metric_entries(report: &mut ReportText, metrics: &soundtaxel_core::experiment::Metrics) {
    report.push("n_train", metrics.n_train);
    report.push("n_test", metrics.n_test);
    if let Some(r) = metrics.rmse_mm {
        report.push("rmse_mm", r);
    }
    if let Some(a) = metrics.accuracy {
        report.push("accuracy", a);
    }
    if let Some((c, r)) = metrics.axis_rates {
        report.push("col_rate", c);
        report.push("row_rate", r);
    }
    if let Some(m) = metrics.taxel_error.as_ref().and_then(TaxelErrorMap::overall_mean) {
        report.push("taxel_error_mean", m);
    }
}

/// Writes every artifact of `out` into `dir`. `config_echo` lists the
/// settings that produced the run.
pub fn write_outcome(
    dir: &Path,
    out: &ExperimentOutcome,
    config_echo: &[(String, String)],
    wall_time_s: f64,
) -> Result<()> {
    fs::create_dir_all(dir).at(dir)?;
    let spec = &out.spec;
    let mut report = ReportText::default();
    report.push("kind", spec.kind.name());
    report.push("seed", spec.seed);
    report.push("repr", spec.repr.name());
    for (k, v) in config_echo {
        report.push(k.clone(), v);
    }
    let has_predictions = !out.predictions.is_empty();
    if has_predictions {
        report.push("model", &spec.model);
        if let Some(g) = &out.grid {
            report.push("grid_size", g.table.len());
            report.push("cv_folds", g.folds);
            report.push("cv_best_mean", opt(g.table[g.best_index].mean));
            write_cv(&dir.join(CV), g)?;
        }
        metric_entries(&mut report, &out.metrics);
        write_predictions(&dir.join(PREDICTIONS), &out.predictions, &out.class_names)?;
        if let Some(cm) = &out.metrics.confusion {
            write_confusion(&dir.join(CONFUSION), cm)?;
        }
        if let Some(map) = &out.metrics.taxel_error {
            write_taxel_error(&dir.join(TAXEL_ERROR), map)?;
        }
    }
    if matches!(spec.kind, ExperimentKind::Letters | ExperimentKind::Words) {
        if let Some(cm) = &out.metrics.confusion {
            let hist = misread_pin_histogram(cm)?;
            for (d, c) in hist.iter().enumerate() {
                report.push(format!("misread_dot{}", d + 1), c);
            }
            write_pin_errors(&dir.join(PIN_ERRORS), &hist)?;
        }
    }
    for row in &out.repr_table {
        report.push(format!("accuracy_{}", row.repr.name()), row.accuracy);
        write_predictions(
            &dir.join(format!("predictions_{}.csv", row.repr.name())),
            &row.predictions,
            &out.class_names,
        )?;
    }
    if !out.repr_table.is_empty() {
        write_accuracy_table(&dir.join(ACCURACY), &out.repr_table)?;
    }
    if let Some(words) = &out.words {
        let c = words.counts;
        report.push("words_n", c.total());
        report.push("words_read_exact", c.read_exact);
        report.push("words_corrected_back", c.corrected_back);
        report.push("words_misread_existing", c.misread_existing);
        report.push("words_failed", c.failed);
        let o = words.outcome;
        report.push("words_fraction_correct_without_correction", o.fraction_correct_without_correction);
        report.push("words_fraction_correct_after_correction", o.fraction_correct_after_correction);
        report.push("words_fraction_misread_to_existing_word", o.fraction_misread_to_existing_word);
        report.push("words_fraction_heuristic_failed", o.fraction_heuristic_failed);
        report.push("words_fraction_corrected_back", o.fraction_corrected_back);
        write_words(&dir.join(WORDS), words)?;
    }
    for (k, v) in rig_reference(spec.kind) {
        report.push(format!("rig_reference_{k}"), v);
    }
    report.push(WALL_TIME_KEY, format!("{wall_time_s:.3}"));
    let path = dir.join(REPORT);
    fs::write(&path, report.render()).at(&path)
}

/// Parses a `col:row` taxel label.
pub fn parse_taxel(text: &str) -> Option<TaxelCoord> {
    let (c, r) = text.split_once(':')?;
    Some(TaxelCoord::new(c.parse().ok()?, r.parse().ok()?))
}
