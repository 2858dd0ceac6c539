//! The `soundtaxel` command line.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use soundtaxel_core::braille::ContactPattern;
use soundtaxel_core::experiment::{ExperimentKind, ExperimentSpec, Metrics, Prediction};
use soundtaxel_core::features::ReprKind;
use soundtaxel_core::learn::{default_grid, fit, grid_search, ModelConfig, ModelKind, SensorModel};
use soundtaxel_core::sim::{Dataset, Split};

use crate::check::check_dir;
use crate::config::Config;
use crate::dataset::{load_dataset, save_dataset};
use crate::error::{Error, IoContext, Result};
use crate::model::{load_model, save_model, MODEL};
use crate::recordings::{featurize_recordings, synthesize_recordings};
use crate::report::{self, metric_entries, ReportText};
use crate::run::{experiment_spec, load_corpus, load_letter_confusion, run_xp, Overrides};
use crate::wav::{write_wav, WavEncoding};

#[derive(Debug, Parser)]
#[command(name = "soundtaxel", version, about = "Acoustic tactile sensing experiments on simulated or recorded sweeps")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Experiment seed (split, folds, sampling, words).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sound representation, e.g. smoothed_spectrum or mfcc.
    #[arg(long, global = true)]
    repr: Option<ReprKind>,
    /// Model family: knn, svm or mlp.
    #[arg(long, global = true)]
    model: Option<ModelKind>,
    /// TOML file overriding simulator, audio, feature and experiment settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "soundtaxel-out")]
    out: PathBuf,
    /// Word list, one lowercase word per line, most frequent first.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize an experiment's recordings, or one pattern with --pattern.
    Synth {
        /// Experiment whose dataset layout to record.
        kind: Option<ExperimentKind>,
        /// Pin rows of `#`/`.` joined by `/`; writes a single WAV.
        #[arg(long, conflicts_with = "kind")]
        pattern: Option<String>,
        /// Destination of the single recording (default OUT/recording.wav).
        #[arg(long, requires = "pattern")]
        wav: Option<PathBuf>,
        /// Samples per class or in total, as the experiment counts them.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Turn a recordings directory into a feature dataset.
    Featurize {
        /// Directory holding labels.json.
        #[arg(long)]
        input: PathBuf,
    },
    /// Train a model on the train split of a dataset.
    Train {
        /// Dataset directory holding manifest.json.
        #[arg(long)]
        input: PathBuf,
        /// Cross-validate the default grid of the model family first.
        #[arg(long)]
        grid: bool,
    },
    /// Score a saved model on the test split of a dataset.
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model_file: PathBuf,
    },
    /// Run an experiment end to end and write its report.
    Xp {
        kind: ExperimentKind,
        #[arg(long)]
        samples: Option<usize>,
        /// Number of simulated word readings (WORDS).
        #[arg(long)]
        n_words: Option<usize>,
        /// Letter confusion.csv to read words with instead of running LETTERS.
        #[arg(long)]
        confusion: Option<PathBuf>,
        /// Also save the generated dataset under OUT/dataset.
        #[arg(long)]
        save_dataset: bool,
    },
    /// Recompute a report from its CSV files and compare.
    Report {
        /// Directory holding report.txt.
        #[arg(long)]
        input: PathBuf,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Error::Usage(e.to_string().trim_end().to_string())),
    };
    let g = &cli.global;
    let config = match &g.config {
        Some(path) => Config::load(path)?,
        None => Config::empty(),
    };
    let setup = config.setup()?;
    let overrides = |samples, n_words| Overrides { seed: g.seed, repr: g.repr, model: g.model, samples, n_words };
    match cli.command {
        Command::Synth { kind: Some(kind), samples, .. } => {
            let spec = experiment_spec(kind, &config, &overrides(samples, None))?;
            let plan = spec.plan(&setup.geometry)?;
            let labels = synthesize_recordings(&plan, &setup.simulator()?, &g.out)?;
            println!("wrote {} recordings to {}", labels.recordings.len(), g.out.display());
        }
        Command::Synth { pattern: Some(text), wav, .. } => {
            let pattern = ContactPattern::from_text(&text)?;
            pattern.validate_label(&setup.geometry)?;
            let w = setup.simulator()?.synthesize(&pattern, g.seed.unwrap_or(0))?;
            let path = wav.unwrap_or_else(|| g.out.join("recording.wav"));
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).at(parent)?;
            }
            write_wav(&w, &path, WavEncoding::from_bit_depth(setup.audio.bit_depth)?)?;
            println!("wrote {}", path.display());
        }
        Command::Synth { .. } => return Err(Error::Usage("synth needs an experiment kind or --pattern".into())),
        Command::Featurize { input } => {
            let ds = featurize_recordings(&input, setup.features, g.repr.unwrap_or(ReprKind::SmoothedSpectrum))?;
            save_dataset(&ds, &g.out)?;
            println!("wrote {} samples of {} values to {}", ds.len(), ds.dim(), g.out.display());
        }
        Command::Train { input, grid } => {
            let ds = load_dataset(&input)?;
            let model = train_cmd(&ds, &config, g.model, g.seed, grid, &g.out)?;
            let path = g.out.join(MODEL);
            save_model(&model, &path)?;
            println!("wrote {} ({})", path.display(), model.config);
        }
        Command::Eval { input, model_file } => {
            let ds = load_dataset(&input)?;
            let model = load_model(&model_file)?;
            let metrics = eval_cmd(&ds, &model, &config, &setup, &g.out)?;
            println!("{}", summary_line(&metrics));
        }
        Command::Xp { kind, samples, n_words, confusion, save_dataset: save } => {
            let spec = experiment_spec(kind, &config, &overrides(samples, n_words))?;
            let corpus = g.corpus.as_deref().map(load_corpus).transpose()?;
            if kind == ExperimentKind::Words && corpus.is_none() {
                return Err(Error::Usage("WORDS needs a word list; pass --corpus <file>".into()));
            }
            let confusion = confusion.as_deref().map(load_letter_confusion).transpose()?;
            let out = run_xp(&spec, &setup, corpus.as_ref(), confusion, &g.out)?;
            if save && kind != ExperimentKind::Words {
                save_dataset(&setup.dataset(&spec, spec.repr)?, &g.out.join("dataset"))?;
            }
            println!("{} {}", kind.name(), summary_line(&out.metrics));
            if let Some(w) = &out.words {
                println!("words correct after correction {:.4}", w.outcome.fraction_correct_after_correction);
            }
        }
        Command::Report { input } => {
            let check = check_dir(&input)?;
            for l in &check.lines {
                println!(
                    "{} {} = {} (recomputed {})",
                    if l.ok { "ok  " } else { "FAIL" },
                    l.key,
                    l.reported,
                    l.recomputed
                );
            }
            if !check.passed() {
                let keys: Vec<_> = check.failures().map(|l| l.key.as_str()).collect();
                return Err(Error::Mismatch(if keys.is_empty() { "nothing to check".into() } else { keys.join(", ") }));
            }
        }
    }
    Ok(())
}

fn summary_line(m: &Metrics) -> String {
    let mut s = format!("n_test={}", m.n_test);
    if let Some(a) = m.accuracy {
        s += &format!(" accuracy={a:.4}");
    }
    if let Some(r) = m.rmse_mm {
        s += &format!(" rmse_mm={r:.4}");
    }
    s
}

fn train_cmd(
    ds: &Dataset,
    config: &Config,
    kind: Option<ModelKind>,
    seed: Option<u64>,
    grid: bool,
    out: &Path,
) -> Result<SensorModel> {
    let schema = ds.label_schema;
    let mut spec = ExperimentSpec {
        model: ModelConfig::default_for(ModelKind::Svm, schema),
        grid: None,
        ..ExperimentSpec::default_for(ExperimentKind::Letters)
    };
    if config.file.experiment.model.is_none() {
        let kind = kind.unwrap_or(if schema == soundtaxel_core::sim::LabelSchema::RegressionMm {
            ModelKind::Knn
        } else {
            ModelKind::Svm
        });
        spec.model = ModelConfig::default_for(kind, schema);
    }
    config.apply_experiment(&mut spec)?;
    let seed = seed.unwrap_or(spec.seed);
    let chosen = if grid {
        let candidates = spec.grid.clone().unwrap_or_else(|| default_grid(spec.model.kind(), schema));
        let result = grid_search(ds, &candidates, spec.folds, seed)?;
        std::fs::create_dir_all(out).at(out)?;
        report::write_cv(&out.join(report::CV), &result)?;
        result.best
    } else {
        spec.model.validate(schema)?;
        spec.model
    };
    std::fs::create_dir_all(out).at(out)?;
    Ok(fit(ds, &ds.indices(Split::Train), &chosen)?)
}

fn eval_cmd(
    ds: &Dataset,
    model: &SensorModel,
    config: &Config,
    setup: &soundtaxel_core::experiment::Setup,
    out: &Path,
) -> Result<Metrics> {
    if model.label_schema != ds.label_schema {
        return Err(Error::Usage(format!(
            "model predicts {:?} labels, dataset has {:?}",
            model.label_schema, ds.label_schema
        )));
    }
    let test = ds.indices(Split::Test);
    let predictions = test
        .iter()
        .map(|&i| {
            let x = ds.row(i);
            let predicted_group = model.classes.as_ref().map(|_| model.predict_group(x)).transpose()?;
            Ok(Prediction {
                sample: i,
                truth: ds.label(i),
                predicted: model.predict(x)?,
                true_group: ds.group(i),
                predicted_group,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let metric = config.file.experiment.error_metric.as_ref().map(|m| *m.get_ref()).unwrap_or_default();
    let mut metrics =
        Metrics::from_predictions(&predictions, ds.label_schema, &ds.class_names, &setup.geometry, metric)?;
    metrics.n_train = ds.len() - test.len();

    std::fs::create_dir_all(out).at(out)?;
    let mut text = ReportText::default();
    text.push("kind", "EVAL");
    text.push("repr", ds.repr_kind.name());
    text.push("error_metric", format!("{metric:?}").to_lowercase());
    text.push("model", &model.config);
    metric_entries(&mut text, &metrics);
    report::write_predictions(&out.join(report::PREDICTIONS), &predictions, &ds.class_names)?;
    if let Some(cm) = &metrics.confusion {
        report::write_confusion(&out.join(report::CONFUSION), cm)?;
    }
    if let Some(map) = &metrics.taxel_error {
        report::write_taxel_error(&out.join(report::TAXEL_ERROR), map)?;
    }
    let path = out.join(report::REPORT);
    std::fs::write(&path, text.render()).at(&path)?;
    Ok(metrics)
}
