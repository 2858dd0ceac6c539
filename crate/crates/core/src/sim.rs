//! Parametric forward model of the sensorized actuator and labeled dataset
//! generation.
//!
//! The channel is a cascade of second-order peaking sections. The contact-free
//! actuator is a set of broad resonances; every extended pin adds a narrow cut
//! at a frequency assigned to its taxel and loads the structure, pulling all
//! resonances down in frequency. Each recording then gets a random gain offset
//! (re-seating) and white sensor noise at a fixed SNR.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::braille::{ContactPattern, DisplayGeometry, TaxelCoord};
use crate::error::bail;
use crate::features::{FeatureExtractor, ReprKind};
use crate::signal::{generate_sweep, AudioConfig, Waveform};
use crate::{par, Error, Result};

/// Second-order IIR section, normalized so `a0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    /// Peaking equalizer (RBJ cookbook): gain `gain_db` at `center_hz`,
    /// bandwidth set by `q`, unity gain far from the center.
    pub fn peaking(center_hz: f64, q: f64, gain_db: f64, sample_rate_hz: f64) -> Self {
        let amp = libm::pow(10.0, gain_db / 40.0);
        let w0 = 2.0 * PI * center_hz / sample_rate_hz;
        let alpha = libm::sin(w0) / (2.0 * q);
        let cos_w0 = libm::cos(w0);
        let a0 = 1.0 + alpha / amp;
        Self {
            b: [(1.0 + alpha * amp) / a0, -2.0 * cos_w0 / a0, (1.0 - alpha * amp) / a0],
            a: [-2.0 * cos_w0 / a0, (1.0 - alpha / amp) / a0],
        }
    }

    /// Filters `x` in place (transposed direct form II, zero initial state).
    pub fn process(&self, x: &mut [f64]) {
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        let (mut s1, mut s2) = (0.0, 0.0);
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + s1;
            s1 = b1 * input - a1 * y + s2;
            s2 = b2 * input - a2 * y;
            *v = y;
        }
    }

    /// Both poles strictly inside the unit circle.
    pub fn is_stable(&self) -> bool {
        let [a1, a2] = self.a;
        a2.abs() < 1.0 && a1.abs() < 1.0 + a2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Resonance {
    pub center_hz: f64,
    pub q: f64,
    pub gain_db: f64,
}

/// Which frequency a pin cuts when it touches the actuator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum NotchAssignment {
    /// `base + col_step * col + row_step * row`.
    Affine { base_hz: f64, col_step_hz: f64, row_step_hz: f64 },
    /// Every pin cuts the same frequency. Carries no location information;
    /// used as a leakage control.
    Shared { center_hz: f64 },
}

impl NotchAssignment {
    pub fn center_hz(&self, t: TaxelCoord) -> f64 {
        match *self {
            NotchAssignment::Affine { base_hz, col_step_hz, row_step_hz } => {
                base_hz + col_step_hz * f64::from(t.col) + row_step_hz * f64::from(t.row)
            }
            NotchAssignment::Shared { center_hz } => center_hz,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    pub base_resonances: Vec<Resonance>,
    pub notch_assignment: NotchAssignment,
    pub notch_depth_db: f64,
    pub notch_q: f64,
    /// Relative downward shift of every resonance per extended pin.
    pub mass_shift_per_pin: f64,
    /// `None` disables the additive noise.
    pub snr_db: Option<f64>,
    /// Standard deviation of the per-recording gain offset.
    pub gain_jitter_db: f64,
    /// Fixed output gain keeping the recording inside [-1, 1].
    pub output_gain_db: f64,
    pub seed: u64,
}

/// Default base channel: 8 resonances log-spaced over 300-9000 Hz.
pub fn default_resonances() -> Vec<Resonance> {
    let (lo, hi) = (libm::log(300.0), libm::log(9000.0));
    (0..8).map(|i| Resonance { center_hz: libm::exp(lo + (hi - lo) * i as f64 / 7.0), q: 4.0, gain_db: 6.0 }).collect()
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            base_resonances: default_resonances(),
            notch_assignment: NotchAssignment::Affine { base_hz: 400.0, col_step_hz: 290.0, row_step_hz: 70.0 },
            notch_depth_db: 6.0,
            notch_q: 12.0,
            mass_shift_per_pin: 0.0015,
            snr_db: Some(30.0),
            gain_jitter_db: 0.2,
            output_gain_db: -12.0,
            seed: 0,
        }
    }
}

impl SimConfig {
    /// Noise, jitter and mass loading switched off.
    pub fn noiseless(mut self) -> Self {
        self.snr_db = None;
        self.gain_jitter_db = 0.0;
        self.mass_shift_per_pin = 0.0;
        self
    }

    pub fn validate(&self, audio: &AudioConfig, geo: &DisplayGeometry) -> Result<()> {
        let nyquist = f64::from(audio.sample_rate_hz) / 2.0;
        for (i, r) in self.base_resonances.iter().enumerate() {
            if !(r.center_hz > 0.0 && r.center_hz < nyquist && r.q > 0.0 && r.q.is_finite() && r.gain_db.is_finite()) {
                bail!(Config, "base resonance {i} ({} Hz, q {}, {} dB) is invalid", r.center_hz, r.q, r.gain_db);
            }
        }
        if !(self.notch_q > 0.0 && self.notch_q.is_finite()) {
            bail!(Config, "notch q {} must be positive", self.notch_q);
        }
        if !(self.notch_depth_db >= 0.0 && self.notch_depth_db.is_finite()) {
            bail!(Config, "notch depth {} dB must be non-negative", self.notch_depth_db);
        }
        let max_pins = (geo.n_rows * geo.n_cols) as f64;
        if !(self.mass_shift_per_pin >= 0.0 && self.mass_shift_per_pin * max_pins < 1.0) {
            bail!(Config, "mass shift {} per pin would push resonances to zero", self.mass_shift_per_pin);
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                bail!(Config, "snr_db must be finite; omit it for a noiseless channel");
            }
        }
        if !(self.gain_jitter_db >= 0.0 && self.gain_jitter_db.is_finite() && self.output_gain_db.is_finite()) {
            bail!(Config, "gain settings must be finite and jitter non-negative");
        }
        let mut centers: Vec<(f64, TaxelCoord)> = Vec::new();
        for row in 0..geo.n_rows {
            for col in 0..geo.n_cols {
                let t = TaxelCoord::new(col, row);
                let f = self.notch_assignment.center_hz(t);
                if !(f > 100.0 && f < 10_000.0) {
                    bail!(Config, "notch for pin {t} at {f} Hz is outside (100, 10000) Hz");
                }
                if col < geo.usable_cols {
                    centers.push((f, t));
                }
            }
        }
        if let NotchAssignment::Affine { .. } = self.notch_assignment {
            centers.sort_by(|a, b| a.0.total_cmp(&b.0));
            if let Some(w) = centers.windows(2).find(|w| w[0].0 == w[1].0) {
                bail!(Config, "pins {} and {} share the notch frequency {} Hz", w[0].1, w[1].1, w[0].0);
            }
        }
        Ok(())
    }
}

/// A validated channel with its excitation sweep precomputed. Immutable and
/// shareable between threads.
#[derive(Debug, Clone)]
pub struct Simulator {
    audio: AudioConfig,
    sim: SimConfig,
    geo: DisplayGeometry,
    sweep: Vec<f64>,
}

impl Simulator {
    pub fn new(audio: AudioConfig, sim: SimConfig, geo: DisplayGeometry) -> Result<Self> {
        geo.validate()?;
        sim.validate(&audio, &geo)?;
        let sweep = generate_sweep(&audio)?.into_samples();
        Ok(Self { audio, sim, geo, sweep })
    }

    pub fn audio(&self) -> &AudioConfig {
        &self.audio
    }

    pub fn config(&self) -> &SimConfig {
        &self.sim
    }

    pub fn geometry(&self) -> &DisplayGeometry {
        &self.geo
    }

    /// The filter sections applied for `pattern`, in processing order.
    pub fn sections(&self, pattern: &ContactPattern) -> Vec<Biquad> {
        let rate = f64::from(self.audio.sample_rate_hz);
        let shift = 1.0 - self.sim.mass_shift_per_pin * pattern.count() as f64;
        let mut sections: Vec<Biquad> = self
            .sim
            .base_resonances
            .iter()
            .map(|r| Biquad::peaking(r.center_hz * shift, r.q, r.gain_db, rate))
            .collect();
        sections.extend(pattern.extended().map(|t| {
            Biquad::peaking(self.sim.notch_assignment.center_hz(t), self.sim.notch_q, -self.sim.notch_depth_db, rate)
        }));
        sections
    }

    /// Recording of the sweep through the channel for `pattern`.
    /// Deterministic in `(pattern, sample_seed)`.
    pub fn synthesize(&self, pattern: &ContactPattern, sample_seed: u64) -> Result<Waveform> {
        if pattern.dims() != (self.geo.n_rows, self.geo.n_cols) {
            bail!(Validation, "pattern is {:?}, display is {}x{}", pattern.dims(), self.geo.n_rows, self.geo.n_cols);
        }
        let mut x = self.sweep.clone();
        for s in self.sections(pattern) {
            s.process(&mut x);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(sample_seed);
        let jitter_db = if self.sim.gain_jitter_db > 0.0 {
            self.sim.gain_jitter_db * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        let gain = libm::pow(10.0, (self.sim.output_gain_db + jitter_db) / 20.0);
        for v in &mut x {
            *v *= gain;
        }
        if let Some(snr) = self.sim.snr_db {
            let rms = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64);
            let sigma = rms / libm::pow(10.0, snr / 20.0);
            for v in &mut x {
                *v += sigma * rng.sample::<f64, _>(StandardNormal);
            }
        }
        Waveform::new(x, self.audio.sample_rate_hz)
    }
}

/// One-shot synthesis; build a [`Simulator`] when generating many recordings.
pub fn synthesize(
    pattern: &ContactPattern,
    audio: &AudioConfig,
    sim: &SimConfig,
    geo: &DisplayGeometry,
    sample_seed: u64,
) -> Result<Waveform> {
    Simulator::new(audio.clone(), sim.clone(), geo.clone())?.synthesize(pattern, sample_seed)
}

/// SplitMix64 finalizer, used to derive independent per-sample seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum LabelSchema {
    Classification,
    RegressionMm,
    Taxel2d,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Label {
    Class(usize),
    Millimetres(f64),
    Taxel(TaxelCoord),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Split {
    Train,
    Test,
}

/// Train/test proportion, e.g. 3:2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitRatio {
    pub train: usize,
    pub test: usize,
}

impl SplitRatio {
    pub const fn new(train: usize, test: usize) -> Self {
        Self { train, test }
    }
}

/// One planned recording.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanItem {
    pub pattern: ContactPattern,
    pub label: Label,
    /// Stratum for splitting and cross-validation: the class, taxel or line.
    pub group: usize,
}

/// Everything needed to produce a dataset except the recordings themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPlan {
    pub items: Vec<PlanItem>,
    pub label_schema: LabelSchema,
    /// Names of the groups (classes, taxels or lines), indexed by `group`.
    pub class_names: Vec<String>,
    pub split: SplitRatio,
    pub seed: u64,
}

impl DatasetPlan {
    /// Stratified train/test assignment. Samples are ordered by group, shuffled
    /// within each group, and the running position `p` goes to train when
    /// `floor((p + 1) r) > floor(p r)` for train fraction `r`. Every group gets
    /// its proportional share up to rounding and the total train count is
    /// exactly `floor(n r)`.
    pub fn assign_splits(&self) -> Result<Vec<Split>> {
        let SplitRatio { train, test } = self.split;
        if train == 0 || test == 0 {
            bail!(Config, "split ratio {train}:{test} must have both parts positive");
        }
        let n_groups = self.class_names.len();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_groups];
        for (i, item) in self.items.iter().enumerate() {
            if item.group >= n_groups {
                bail!(Validation, "sample {i} has group {} but only {n_groups} groups are named", item.group);
            }
            members[item.group].push(i);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, 0x5b11));
        let mut splits = vec![Split::Test; self.items.len()];
        let total = train + test;
        let mut p = 0usize;
        for group in &mut members {
            shuffle(group, &mut rng);
            for &i in group.iter() {
                if (p + 1) * train / total > p * train / total {
                    splits[i] = Split::Train;
                }
                p += 1;
            }
        }
        Ok(splits)
    }
}

/// Fisher-Yates shuffle with a caller-owned generator.
pub(crate) fn shuffle<T, R: Rng>(v: &mut [T], rng: &mut R) {
    for i in (1..v.len()).rev() {
        let j = rng.random_range(0..=i);
        v.swap(i, j);
    }
}

/// Labeled feature vectors stored as a row-major `f32` matrix, which is
/// also their on-disk layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub label_schema: LabelSchema,
    pub repr_kind: ReprKind,
    pub dims: Vec<usize>,
    pub class_names: Vec<String>,
    pub seed: u64,
    features: Vec<f32>,
    labels: Vec<Label>,
    groups: Vec<usize>,
    splits: Vec<Split>,
    patterns: Vec<ContactPattern>,
    sample_seeds: Vec<u64>,
}

/// Borrowed view of one sample.
#[derive(Debug, Clone, Copy)]
pub struct LabeledSample<'a> {
    pub features: &'a [f32],
    pub label: Label,
    pub group: usize,
    pub split: Split,
    pub pattern: &'a ContactPattern,
    pub sample_seed: u64,
}

/// Per-sample data for [`Dataset::from_parts`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMeta {
    pub label: Label,
    pub group: usize,
    pub split: Split,
    pub pattern: ContactPattern,
    pub sample_seed: u64,
}

impl Dataset {
    pub fn from_parts(
        label_schema: LabelSchema,
        repr_kind: ReprKind,
        dims: Vec<usize>,
        class_names: Vec<String>,
        seed: u64,
        features: Vec<f32>,
        meta: Vec<SampleMeta>,
    ) -> Result<Self> {
        let dim: usize = dims.iter().product();
        if dim == 0 {
            bail!(Validation, "feature dimension is zero");
        }
        if features.len() != dim * meta.len() {
            return Err(Error::Length { left: features.len(), right: dim * meta.len() });
        }
        let mut ds = Self {
            label_schema,
            repr_kind,
            dims,
            class_names,
            seed,
            features,
            labels: Vec::with_capacity(meta.len()),
            groups: Vec::with_capacity(meta.len()),
            splits: Vec::with_capacity(meta.len()),
            patterns: Vec::with_capacity(meta.len()),
            sample_seeds: Vec::with_capacity(meta.len()),
        };
        for (i, m) in meta.into_iter().enumerate() {
            let ok = matches!(
                (label_schema, m.label),
                (LabelSchema::Classification, Label::Class(_))
                    | (LabelSchema::RegressionMm, Label::Millimetres(_))
                    | (LabelSchema::Taxel2d, Label::Taxel(_))
            );
            if !ok {
                bail!(Validation, "sample {i} label {:?} does not match schema {:?}", m.label, label_schema);
            }
            if m.group >= ds.class_names.len() {
                bail!(Validation, "sample {i} group {} has no name", m.group);
            }
            ds.labels.push(m.label);
            ds.groups.push(m.group);
            ds.splits.push(m.split);
            ds.patterns.push(m.pattern);
            ds.sample_seeds.push(m.sample_seed);
        }
        Ok(ds)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn n_groups(&self) -> usize {
        self.class_names.len()
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn row(&self, i: usize) -> &[f32] {
        let d = self.dim();
        &self.features[i * d..(i + 1) * d]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn group(&self, i: usize) -> usize {
        self.groups[i]
    }

    pub fn split(&self, i: usize) -> Split {
        self.splits[i]
    }

    pub fn pattern(&self, i: usize) -> &ContactPattern {
        &self.patterns[i]
    }

    pub fn sample_seed(&self, i: usize) -> u64 {
        self.sample_seeds[i]
    }

    pub fn sample(&self, i: usize) -> LabeledSample<'_> {
        LabeledSample {
            features: self.row(i),
            label: self.labels[i],
            group: self.groups[i],
            split: self.splits[i],
            pattern: &self.patterns[i],
            sample_seed: self.sample_seeds[i],
        }
    }

    pub fn indices(&self, split: Split) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.splits[i] == split).collect()
    }

    /// Overwrites one feature row. Used to inject recordings or, in tests,
    /// to poison the held-out split.
    pub fn set_row(&mut self, i: usize, values: &[f32]) {
        let d = self.dim();
        self.features[i * d..(i + 1) * d].copy_from_slice(values);
    }
}

/// Records every plan item with `record(index, item)`, featurizes it and
/// assembles the split dataset. `record` must be deterministic in its inputs;
/// items may be processed in parallel.
pub fn featurize_plan<F>(plan: &DatasetPlan, extractor: &FeatureExtractor, kind: ReprKind, record: F) -> Result<Dataset>
where
    F: Fn(usize, &PlanItem) -> Result<(Waveform, u64)> + Sync + Send,
{
    if plan.items.is_empty() {
        bail!(Config, "dataset plan has no samples");
    }
    let splits = plan.assign_splits()?;
    // Features, their shape and the recording seed.
    type Row = (Vec<f32>, Vec<usize>, u64);
    let rows: Vec<Result<Row>> = par::map_range(plan.items.len(), |i| {
        let (w, seed) = record(i, &plan.items[i])?;
        let fv = extractor.extract(&w, kind)?;
        Ok((fv.values.iter().map(|&v| v as f32).collect(), fv.dims, seed))
    });
    let mut features = Vec::new();
    let mut dims: Option<Vec<usize>> = None;
    let mut meta = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        let (values, d, seed) = row?;
        match &dims {
            None => dims = Some(d),
            Some(expected) if *expected != d => {
                bail!(Validation, "sample {i} has feature shape {d:?}, expected {expected:?}")
            }
            _ => {}
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            bail!(Validation, "sample {i} feature {j} overflows f32");
        }
        features.extend_from_slice(&values);
        let item = &plan.items[i];
        meta.push(SampleMeta {
            label: item.label,
            group: item.group,
            split: splits[i],
            pattern: item.pattern.clone(),
            sample_seed: seed,
        });
    }
    Dataset::from_parts(
        plan.label_schema,
        kind,
        dims.unwrap_or_default(),
        plan.class_names.clone(),
        plan.seed,
        features,
        meta,
    )
}

/// Synthesizes and featurizes every plan item. Sample `i` uses the seed
/// `mix_seed(mix_seed(plan.seed, sim.seed), i)`, so serial and parallel runs
/// produce identical datasets.
pub fn generate_dataset(
    plan: &DatasetPlan,
    simulator: &Simulator,
    extractor: &FeatureExtractor,
    kind: ReprKind,
) -> Result<Dataset> {
    let stream = mix_seed(plan.seed, simulator.config().seed);
    featurize_plan(plan, extractor, kind, |i, item| {
        let seed = mix_seed(stream, i as u64);
        Ok((simulator.synthesize(&item.pattern, seed)?, seed))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braille::{letter_to_pattern, BrailleLetter};
    use crate::features::{FeatureConfig, FeatureExtractor};

    fn sim(cfg: SimConfig) -> Simulator {
        Simulator::new(AudioConfig::default(), cfg, DisplayGeometry::default()).unwrap()
    }

    #[test]
    fn default_config_is_valid_and_injective() {
        SimConfig::default().validate(&AudioConfig::default(), &DisplayGeometry::default()).unwrap();
    }

    #[test]
    fn colliding_notches_are_rejected() {
        let cfg = SimConfig {
            notch_assignment: NotchAssignment::Affine { base_hz: 400.0, col_step_hz: 140.0, row_step_hz: 70.0 },
            ..Default::default()
        };
        assert!(matches!(cfg.validate(&AudioConfig::default(), &DisplayGeometry::default()), Err(Error::Config(_))));
        let shared =
            SimConfig { notch_assignment: NotchAssignment::Shared { center_hz: 2000.0 }, ..Default::default() };
        shared.validate(&AudioConfig::default(), &DisplayGeometry::default()).unwrap();
    }

    #[test]
    fn out_of_band_notch_is_rejected() {
        let cfg = SimConfig {
            notch_assignment: NotchAssignment::Affine { base_hz: 50.0, col_step_hz: 290.0, row_step_hz: 70.0 },
            ..Default::default()
        };
        assert!(cfg.validate(&AudioConfig::default(), &DisplayGeometry::default()).is_err());
    }

    #[test]
    fn retracted_noiseless_equals_base_channel() {
        let cfg = SimConfig { snr_db: None, gain_jitter_db: 0.0, ..Default::default() };
        let s = sim(cfg.clone());
        let w = s.synthesize(&ContactPattern::empty(s.geometry()), 17).unwrap();
        let mut expected = generate_sweep(&AudioConfig::default()).unwrap().into_samples();
        for r in &cfg.base_resonances {
            Biquad::peaking(r.center_hz, r.q, r.gain_db, 48_000.0).process(&mut expected);
        }
        let g = libm::pow(10.0, cfg.output_gain_db / 20.0);
        for (a, b) in w.samples().iter().zip(&expected) {
            assert!((a - g * b).abs() <= 1e-12);
        }
    }

    #[test]
    fn synthesis_is_deterministic_and_seed_sensitive() {
        let s = sim(SimConfig::default());
        let p = letter_to_pattern(BrailleLetter::new('k').unwrap(), 4, s.geometry()).unwrap();
        assert_eq!(s.synthesize(&p, 5).unwrap(), s.synthesize(&p, 5).unwrap());
        assert_ne!(s.synthesize(&p, 5).unwrap(), s.synthesize(&p, 6).unwrap());
    }

    #[test]
    fn recordings_stay_in_range() {
        let s = sim(SimConfig::default());
        let mut p = ContactPattern::empty(s.geometry());
        p.set(3, 1, true);
        let w = s.synthesize(&p, 1).unwrap();
        assert!(w.samples().iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn single_pin_dips_its_notch_bin() {
        let cfg = SimConfig { snr_db: None, gain_jitter_db: 0.0, ..Default::default() };
        let s = sim(cfg.clone());
        let fx = FeatureExtractor::new(FeatureConfig::default(), 48_000).unwrap();
        let base = fx.smoothed_spectrum(&s.synthesize(&ContactPattern::empty(s.geometry()), 0).unwrap()).unwrap();
        for t in [TaxelCoord::new(0, 0), TaxelCoord::new(13, 2), TaxelCoord::new(28, 3)] {
            let mut p = ContactPattern::empty(s.geometry());
            p.set(t.col as usize, t.row as usize, true);
            let touched = fx.smoothed_spectrum(&s.synthesize(&p, 0).unwrap()).unwrap();
            let bin = libm::round(cfg.notch_assignment.center_hz(t) / (48_000.0 / 2048.0)) as usize;
            let dip_db = 20.0 * libm::log10(base.values[bin] / touched.values[bin]);
            assert!(dip_db >= 3.0, "taxel {t}: dip {dip_db} dB");
        }
    }

    #[test]
    fn sections_are_stable_and_decay() {
        let s = sim(SimConfig::default());
        let mut p = ContactPattern::empty(s.geometry());
        for col in 0..29 {
            p.set(col, col % 4, true);
        }
        let sections = s.sections(&p);
        assert!(sections.iter().all(Biquad::is_stable));
        let mut h = vec![0.0; 48_000];
        h[0] = 1.0;
        for sec in &sections {
            sec.process(&mut h);
        }
        let peak = h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tail = h[24_000..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(tail < 1e-6 * peak, "tail {tail} peak {peak}");
    }

    fn plan(groups: &[usize], split: SplitRatio) -> DatasetPlan {
        let geo = DisplayGeometry::default();
        let n_groups = groups.iter().max().map_or(0, |m| m + 1);
        DatasetPlan {
            items: groups
                .iter()
                .map(|&g| PlanItem { pattern: ContactPattern::empty(&geo), label: Label::Class(g), group: g })
                .collect(),
            label_schema: LabelSchema::Classification,
            class_names: (0..n_groups).map(|g| alloc::format!("c{g}")).collect(),
            split,
            seed: 3,
        }
    }

    #[test]
    fn split_is_exact_per_class_when_divisible() {
        let groups: Vec<usize> = (0..29).flat_map(|g| core::iter::repeat_n(g, 200)).collect();
        let splits = plan(&groups, SplitRatio::new(3, 2)).assign_splits().unwrap();
        assert_eq!(splits.iter().filter(|s| **s == Split::Train).count(), 3480);
        for g in 0..29 {
            let train = (0..groups.len()).filter(|&i| groups[i] == g && splits[i] == Split::Train).count();
            assert_eq!(train, 120);
        }
    }

    #[test]
    fn split_total_is_floor_of_ratio() {
        let groups: Vec<usize> = (0..500).map(|i| (i * 7919) % 116).collect();
        let splits = plan(&groups, SplitRatio::new(2, 1)).assign_splits().unwrap();
        assert_eq!(splits.iter().filter(|s| **s == Split::Train).count(), 333);
        assert_eq!(plan(&groups, SplitRatio::new(2, 1)).assign_splits().unwrap(), splits);
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        assert_eq!(mix_seed(1, 2), mix_seed(1, 2));
        assert_ne!(mix_seed(1, 2), mix_seed(1, 3));
        assert_ne!(mix_seed(1, 2), mix_seed(2, 2));
    }
}
