//! Experiment runs driven by files and flags.

use std::path::Path;
use std::time::Instant;

use soundtaxel_core::braille::{LetterConfusion, WordCorpus};
use soundtaxel_core::experiment::{
    run_experiment, run_words, ExperimentKind, ExperimentOutcome, ExperimentSpec, SampleCount, Setup,
};
use soundtaxel_core::features::ReprKind;
use soundtaxel_core::learn::{default_grid, ModelConfig, ModelKind};

use crate::config::Config;
use crate::error::{Error, IoContext, Result};
use crate::report::write_outcome;

/// Command-line overrides, applied after the configuration file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub repr: Option<ReprKind>,
    pub model: Option<ModelKind>,
    /// Per class or in total, whichever the experiment counts in.
    pub samples: Option<usize>,
    pub n_words: Option<usize>,
}

/// Defaults for `kind`, then the `[experiment]` section, then `over`.
pub fn experiment_spec(kind: ExperimentKind, config: &Config, over: &Overrides) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::default_for(kind);
    config.apply_experiment(&mut spec)?;
    if let Some(seed) = over.seed {
        spec.seed = seed;
    }
    if let Some(repr) = over.repr {
        spec.repr = repr;
    }
    if let Some(kind) = over.model.filter(|&k| k != spec.model.kind()) {
        let schema = spec.label_schema();
        spec.model = ModelConfig::default_for(kind, schema);
        if spec.grid.is_some() {
            spec.grid = Some(default_grid(kind, schema));
        }
        spec.model.validate(schema)?;
    }
    if let Some(n) = over.samples {
        spec.samples = match spec.samples {
            SampleCount::PerClass(_) => SampleCount::PerClass(n),
            SampleCount::Total(_) => SampleCount::Total(n),
        };
    }
    if let Some(n) = over.n_words {
        spec.n_words = n;
    }
    Ok(spec)
}

pub fn load_corpus(path: &Path) -> Result<WordCorpus> {
    let text = std::fs::read_to_string(path).at(path)?;
    WordCorpus::parse(&text).map_err(|e| Error::format(path, "corpus", e.to_string()))
}

/// Reads a 26-letter `confusion.csv` written by a LETTERS run.
pub fn load_letter_confusion(path: &Path) -> Result<LetterConfusion> {
    let text = std::fs::read_to_string(path).at(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut counts = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, format!("line {}", i + 2), e.to_string()))?;
        for v in rec.iter().skip(1) {
            counts.push(
                v.parse::<u64>()
                    .map_err(|_| Error::format(path, format!("line {}", i + 2), format!("bad count `{v}`")))?,
            );
        }
    }
    LetterConfusion::from_counts(&counts).map_err(|e| Error::format(path, "counts", e.to_string()))
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::Usage(format!("cannot echo configuration: {e}")))
}

/// Settings echoed into the report so a run can be repeated from it.
pub fn config_echo(spec: &ExperimentSpec, setup: &Setup) -> Result<Vec<(String, String)>> {
    Ok(vec![
        ("sim_seed".into(), setup.sim.seed.to_string()),
        ("snr_db".into(), setup.sim.snr_db.map_or_else(|| "inf".into(), |s| s.to_string())),
        ("error_metric".into(), format!("{:?}", spec.error_metric).to_lowercase()),
        ("spec".into(), json(spec)?),
        ("setup".into(), json(setup)?),
    ])
}

/// Runs `spec` and writes its artifacts into `out`. WORDS needs `corpus`
/// and uses `confusion` instead of a fresh LETTERS run when given.
pub fn run_xp(
    spec: &ExperimentSpec,
    setup: &Setup,
    corpus: Option<&WordCorpus>,
    confusion: Option<LetterConfusion>,
    out: &Path,
) -> Result<ExperimentOutcome> {
    let start = Instant::now();
    let outcome = match spec.kind {
        ExperimentKind::Words => {
            let corpus = corpus.ok_or_else(|| Error::Usage("WORDS needs a word list; pass --corpus <file>".into()))?;
            run_words(spec, setup, corpus, confusion)?
        }
        _ => run_experiment(spec, setup)?,
    };
    write_outcome(out, &outcome, &config_echo(spec, setup)?, start.elapsed().as_secs_f64())?;
    Ok(outcome)
}
