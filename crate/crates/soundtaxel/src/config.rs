//! TOML configuration for the simulator, audio, features and experiments.
//!
//! Every key is optional and overrides the built-in default. Unknown keys
//! are errors, and every error names the line it comes from.

use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use soundtaxel_core::experiment::{ExperimentSpec, SampleCount, Setup};
use soundtaxel_core::features::ReprKind;
use soundtaxel_core::learn::{DistanceMetric, ModelConfig};
use soundtaxel_core::signal::{SweepShape, WindowFn};
use soundtaxel_core::sim::{NotchAssignment, Resonance, SplitRatio};
use toml::Spanned;

use crate::error::{Error, IoContext, Result};

type Field<T> = Option<Spanned<T>>;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub audio: AudioSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub features: FeatureSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AudioSection {
    pub sample_rate_hz: Field<u32>,
    pub bit_depth: Field<u16>,
    pub sweep_duration_s: Field<f64>,
    pub sweep_f_start_hz: Field<f64>,
    pub sweep_f_end_hz: Field<f64>,
    pub sweep_shape: Field<SweepShape>,
    pub fade_s: Field<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    /// `inf` disables the noise.
    pub snr_db: Field<f64>,
    pub gain_jitter_db: Field<f64>,
    pub mass_shift_per_pin: Field<f64>,
    pub notch_depth_db: Field<f64>,
    pub notch_q: Field<f64>,
    pub notch_base_hz: Field<f64>,
    pub notch_col_step_hz: Field<f64>,
    pub notch_row_step_hz: Field<f64>,
    /// Sends every pin to this one frequency; excludes the affine keys.
    pub notch_shared_hz: Field<f64>,
    pub output_gain_db: Field<f64>,
    pub seed: Field<u64>,
    /// Replaces the default resonances when present.
    pub resonance: Option<Spanned<Vec<Resonance>>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureSection {
    pub window_size: Field<usize>,
    pub hop_size: Field<usize>,
    pub window: Field<WindowFn>,
    pub n_mels: Field<usize>,
    pub f_min_hz: Field<f64>,
    pub f_max_hz: Field<f64>,
    pub n_mfcc: Field<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub samples_per_class: Field<usize>,
    pub total_samples: Field<usize>,
    /// `[train, test]`.
    pub split: Field<[usize; 2]>,
    pub folds: Field<usize>,
    pub seed: Field<u64>,
    pub letter_cell: Field<usize>,
    pub n_words: Field<usize>,
    pub error_metric: Field<DistanceMetric>,
    pub repr: Field<String>,
    /// `false` trains `model` directly instead of searching the grid.
    pub grid_search: Field<bool>,
    pub model: Option<Spanned<ModelConfig>>,
    pub grid: Option<Spanned<Vec<ModelConfig>>>,
}

/// Parsed configuration plus the text it came from, for error positions.
#[derive(Debug)]
pub struct Config {
    pub file: ConfigFile,
    path: PathBuf,
    source: String,
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

impl Config {
    pub fn parse(source: &str, path: &Path) -> Result<Self> {
        let file: ConfigFile = toml::from_str(source).map_err(|e| {
            let at = e.span().map_or_else(|| "file".to_string(), |s| format!("line {}", line_of(source, s.start)));
            Error::format(path, at, e.message().trim_end())
        })?;
        Ok(Self { file, path: path.to_owned(), source: source.to_owned() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).at(path)?;
        Self::parse(&text, path)
    }

    /// A configuration with no overrides.
    pub fn empty() -> Self {
        Self { file: ConfigFile::default(), path: PathBuf::from("<defaults>"), source: String::new() }
    }

    fn err(&self, span: Range<usize>, msg: impl Into<String>) -> Error {
        Error::format(&self.path, format!("line {}", line_of(&self.source, span.start)), msg)
    }

    fn header_err(&self, section: &str, msg: impl Into<String>) -> Error {
        let line = self.source.lines().position(|l| l.trim() == format!("[{section}]")).map_or(1, |i| i + 1);
        Error::format(&self.path, format!("line {line}"), msg)
    }

    /// Builds the simulator, audio and feature settings, validating each
    /// section against the lines that configured it.
    pub fn setup(&self) -> Result<Setup> {
        let mut setup = Setup::default();
        let a = &self.file.audio;
        let audio = &mut setup.audio;
        set(&mut audio.sample_rate_hz, &a.sample_rate_hz);
        set(&mut audio.bit_depth, &a.bit_depth);
        set(&mut audio.sweep_duration_s, &a.sweep_duration_s);
        set(&mut audio.sweep_f_start_hz, &a.sweep_f_start_hz);
        set(&mut audio.sweep_f_end_hz, &a.sweep_f_end_hz);
        set(&mut audio.sweep_shape, &a.sweep_shape);
        set(&mut audio.fade_s, &a.fade_s);
        audio.validate().map_err(|e| self.header_err("audio", e.to_string()))?;

        let s = &self.file.sim;
        let sim = &mut setup.sim;
        if let Some(snr) = &s.snr_db {
            let v = *snr.get_ref();
            sim.snr_db = match v {
                f64::INFINITY => None,
                v if v.is_finite() => Some(v),
                _ => return Err(self.err(snr.span(), "snr_db must be a finite number or inf")),
            };
        }
        set(&mut sim.gain_jitter_db, &s.gain_jitter_db);
        set(&mut sim.mass_shift_per_pin, &s.mass_shift_per_pin);
        set(&mut sim.notch_depth_db, &s.notch_depth_db);
        set(&mut sim.notch_q, &s.notch_q);
        set(&mut sim.output_gain_db, &s.output_gain_db);
        set(&mut sim.seed, &s.seed);
        for (name, field) in [
            ("gain_jitter_db", &s.gain_jitter_db),
            ("mass_shift_per_pin", &s.mass_shift_per_pin),
            ("notch_depth_db", &s.notch_depth_db),
            ("notch_q", &s.notch_q),
            ("output_gain_db", &s.output_gain_db),
        ] {
            if let Some(f) = field.as_ref().filter(|f| !f.get_ref().is_finite()) {
                return Err(self.err(f.span(), format!("{name} must be finite")));
            }
        }
        if let Some(f) = s.gain_jitter_db.as_ref().filter(|f| *f.get_ref() < 0.0) {
            return Err(self.err(f.span(), "gain_jitter_db is a standard deviation and cannot be negative"));
        }
        if let Some(f) = s.notch_q.as_ref().filter(|f| *f.get_ref() <= 0.0) {
            return Err(self.err(f.span(), "notch_q must be positive"));
        }
        let affine = [&s.notch_base_hz, &s.notch_col_step_hz, &s.notch_row_step_hz];
        match (&s.notch_shared_hz, affine.iter().find_map(|f| f.as_ref())) {
            (Some(shared), Some(_)) => {
                return Err(self.err(shared.span(), "notch_shared_hz cannot be combined with the affine notch keys"))
            }
            (Some(shared), None) => sim.notch_assignment = NotchAssignment::Shared { center_hz: *shared.get_ref() },
            (None, _) => {
                if let NotchAssignment::Affine { base_hz, col_step_hz, row_step_hz } = &mut sim.notch_assignment {
                    set(base_hz, &s.notch_base_hz);
                    set(col_step_hz, &s.notch_col_step_hz);
                    set(row_step_hz, &s.notch_row_step_hz);
                }
            }
        }
        if let Some(res) = &s.resonance {
            if let Some(bad) =
                res.get_ref().iter().position(|r| !(r.q > 0.0 && r.center_hz > 0.0 && r.gain_db.is_finite()))
            {
                return Err(self.err(res.span(), format!("resonance {} needs a positive center_hz and q", bad + 1)));
            }
            sim.base_resonances = res.get_ref().clone();
        }
        sim.validate(&setup.audio, &setup.geometry).map_err(|e| self.header_err("sim", e.to_string()))?;

        let f = &self.file.features;
        let feat = &mut setup.features;
        set(&mut feat.stft.window_size, &f.window_size);
        set(&mut feat.stft.hop_size, &f.hop_size);
        set(&mut feat.stft.window_fn, &f.window);
        set(&mut feat.mel.n_mels, &f.n_mels);
        set(&mut feat.mel.f_min_hz, &f.f_min_hz);
        set(&mut feat.mel.f_max_hz, &f.f_max_hz);
        set(&mut feat.mel.n_mfcc, &f.n_mfcc);
        setup.extractor().map_err(|e| self.header_err("features", e.to_string()))?;
        Ok(setup)
    }

    /// Applies the `[experiment]` overrides to `spec`.
    pub fn apply_experiment(&self, spec: &mut ExperimentSpec) -> Result<()> {
        let x = &self.file.experiment;
        match (&x.samples_per_class, &x.total_samples) {
            (Some(_), Some(t)) => {
                return Err(self.err(t.span(), "give samples_per_class or total_samples, not both"));
            }
            (Some(n), None) => spec.samples = SampleCount::PerClass(*n.get_ref()),
            (None, Some(n)) => spec.samples = SampleCount::Total(*n.get_ref()),
            (None, None) => {}
        }
        if let Some(split) = &x.split {
            let [train, test] = *split.get_ref();
            spec.split = SplitRatio::new(train, test);
        }
        set(&mut spec.folds, &x.folds);
        set(&mut spec.seed, &x.seed);
        set(&mut spec.letter_cell, &x.letter_cell);
        set(&mut spec.n_words, &x.n_words);
        set(&mut spec.error_metric, &x.error_metric);
        if let Some(r) = &x.repr {
            spec.repr = r.get_ref().parse::<ReprKind>().map_err(|e| self.err(r.span(), e.to_string()))?;
        }
        if let Some(m) = &x.model {
            m.get_ref().validate(spec.label_schema()).map_err(|e| self.err(m.span(), e.to_string()))?;
            spec.model = m.get_ref().clone();
        }
        if let Some(g) = &x.grid {
            if g.get_ref().is_empty() {
                return Err(self.err(g.span(), "grid must list at least one model"));
            }
            spec.grid = Some(g.get_ref().clone());
        }
        if let Some(on) = &x.grid_search {
            if !on.get_ref() {
                spec.grid = None;
            }
        }
        Ok(())
    }
}

fn set<T: Clone>(dst: &mut T, src: &Field<T>) {
    if let Some(v) = src {
        *dst = v.get_ref().clone();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use soundtaxel_core::experiment::ExperimentKind;
    use soundtaxel_core::sim::SimConfig;

    fn parse(text: &str) -> Result<Config> {
        Config::parse(text, Path::new("test.toml"))
    }

    fn line(e: Error) -> String {
        match e {
            Error::Format { at, .. } => at,
            other => panic!("expected a format error, got {other}"),
        }
    }

    #[test]
    fn empty_file_gives_defaults() {
        let setup = parse("").unwrap().setup().unwrap();
        assert_eq!(setup, Setup::default());
    }

    #[test]
    fn overrides_reach_the_simulator() {
        let cfg = parse(
            "[sim]\nsnr_db = inf\ngain_jitter_db = 0\nnotch_shared_hz = 1000\n\n[[sim.resonance]]\ncenter_hz = 500\nq = 2\ngain_db = 3\n",
        )
        .unwrap();
        let sim = cfg.setup().unwrap().sim;
        assert_eq!(sim.snr_db, None);
        assert_eq!(sim.gain_jitter_db, 0.0);
        assert_eq!(sim.notch_assignment, NotchAssignment::Shared { center_hz: 1000.0 });
        assert_eq!(sim.base_resonances, vec![Resonance { center_hz: 500.0, q: 2.0, gain_db: 3.0 }]);
        assert_eq!(sim.seed, SimConfig::default().seed);
    }

    #[test]
    fn errors_point_at_the_offending_line() {
        assert_eq!(line(parse("[sim]\nnotch_q = 12\nbogus = 1\n").unwrap_err()), "line 3");
        assert_eq!(line(parse("[sim]\n\nnotch_q = \"twelve\"\n").unwrap_err()), "line 3");
        assert_eq!(line(parse("[sim]\nsnr_db = 30\nnotch_q = -1\n").unwrap().setup().unwrap_err()), "line 3");
        assert_eq!(line(parse("[sim]\nsnr_db = nan\n").unwrap().setup().unwrap_err()), "line 2");
        let e = parse("# header\n[sim]\nnotch_row_step_hz = 0\n").unwrap().setup().unwrap_err();
        assert_eq!(line(e), "line 2", "collisions are reported at the section");
    }

    #[test]
    fn experiment_overrides() {
        let cfg = parse(
            "[experiment]\nsamples_per_class = 10\nsplit = [1, 1]\ngrid_search = false\nrepr = \"mfcc\"\n[experiment.model]\nkind = \"svm\"\nc = 10\nkernel = { type = \"rbf\", gamma = 0.001 }\n",
        )
        .unwrap();
        let mut spec = ExperimentSpec::default_for(ExperimentKind::Letters);
        cfg.apply_experiment(&mut spec).unwrap();
        assert_eq!(spec.samples, SampleCount::PerClass(10));
        assert_eq!(spec.split, SplitRatio::new(1, 1));
        assert_eq!(spec.grid, None);
        assert_eq!(spec.repr, ReprKind::Mfcc);
        match spec.model {
            ModelConfig::Svm(s) => assert_eq!((s.c, s.tol), (10.0, 1e-3)),
            other => panic!("{other:?}"),
        }
        let bad = parse("[experiment]\n[experiment.model]\nkind = \"svm\"\n").unwrap();
        let mut xline = ExperimentSpec::default_for(ExperimentKind::Xline);
        assert!(bad.apply_experiment(&mut xline).is_err(), "svm cannot regress");
    }
}
