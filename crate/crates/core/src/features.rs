//! Sound representations used as sensor-model input.
//!
//! Every extractor is a pure function of the waveform and its configs and
//! returns a flat [`FeatureVector`]. Two-dimensional representations are
//! stored time-major (one row per STFT frame) with their shape in `dims`.
//! Values are raw; standardization happens inside the trained models.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::bail;
use crate::signal::{RealFft, Stft, StftConfig, Waveform};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ReprKind {
    Waveform,
    Spectrum,
    SmoothedSpectrum,
    Spectrogram,
    MelSpectrogram,
    Mfcc,
}

impl ReprKind {
    pub const ALL: [ReprKind; 6] = [
        ReprKind::Waveform,
        ReprKind::Spectrum,
        ReprKind::SmoothedSpectrum,
        ReprKind::Spectrogram,
        ReprKind::MelSpectrogram,
        ReprKind::Mfcc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReprKind::Waveform => "waveform",
            ReprKind::Spectrum => "spectrum",
            ReprKind::SmoothedSpectrum => "smoothed_spectrum",
            ReprKind::Spectrogram => "spectrogram",
            ReprKind::MelSpectrogram => "mel_spectrogram",
            ReprKind::Mfcc => "mfcc",
        }
    }
}

impl fmt::Display for ReprKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReprKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReprKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Validation(alloc::format!("unknown representation `{s}`")))
    }
}

/// A flattened representation together with its original shape.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub kind: ReprKind,
    pub dims: Vec<usize>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, kind: ReprKind, dims: Vec<usize>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if expected != values.len() {
            return Err(Error::Length { left: values.len(), right: expected });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            bail!(Validation, "feature {i} is not finite");
        }
        Ok(Self { values, kind, dims })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Row `i` of a two-dimensional representation.
    pub fn row(&self, i: usize) -> &[f64] {
        let cols = *self.dims.last().unwrap_or(&self.values.len());
        &self.values[i * cols..(i + 1) * cols]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MelConfig {
    pub n_mels: usize,
    pub f_min_hz: f64,
    pub f_max_hz: f64,
    pub n_mfcc: usize,
}

impl Default for MelConfig {
    fn default() -> Self {
        Self { n_mels: 64, f_min_hz: 100.0, f_max_hz: 10_000.0, n_mfcc: 20 }
    }
}

impl MelConfig {
    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if self.n_mels == 0 {
            bail!(Config, "n_mels must be positive");
        }
        if self.n_mfcc == 0 || self.n_mfcc > self.n_mels {
            bail!(Config, "n_mfcc {} must be in 1..={}", self.n_mfcc, self.n_mels);
        }
        if !(self.f_min_hz >= 0.0 && self.f_min_hz < self.f_max_hz) {
            bail!(Config, "mel range {}..{} Hz is empty", self.f_min_hz, self.f_max_hz);
        }
        if self.f_max_hz > sample_rate_hz / 2.0 {
            bail!(Config, "mel upper edge {} Hz exceeds Nyquist", self.f_max_hz);
        }
        Ok(())
    }
}

/// STFT and mel settings shared by all extractors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureConfig {
    pub stft: StftConfig,
    pub mel: MelConfig,
}

/// Mel value of a frequency: `2595 log10(1 + f / 700)`.
pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * libm::log10(1.0 + f / 700.0)
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (libm::pow(10.0, m / 2595.0) - 1.0)
}

/// Triangular mel filters over the bins of a one-sided spectrum, stored
/// row-major as `n_mels x n_bins`.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    pub n_mels: usize,
    pub n_bins: usize,
    pub weights: Vec<f64>,
    /// Center frequency of each filter in Hz.
    pub centers_hz: Vec<f64>,
}

impl MelFilterbank {
    pub fn row(&self, m: usize) -> &[f64] {
        &self.weights[m * self.n_bins..(m + 1) * self.n_bins]
    }

    /// Projects a power spectrum (length `n_bins`) onto the filters.
    pub fn apply_into(&self, power: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.weights.chunks_exact(self.n_bins)) {
            *o = row.iter().zip(power).map(|(w, p)| w * p).sum();
        }
    }
}

/// Builds the mel filterbank. Filter `m` rises from mel point `m` to a peak of
/// 1 at point `m + 1` and falls to zero at point `m + 2`, with `n_mels + 2`
/// points equally spaced in mel between `f_min` and `f_max`.
pub fn mel_filterbank(cfg: &MelConfig, n_fft_bins: usize, sample_rate_hz: f64) -> Result<MelFilterbank> {
    cfg.validate(sample_rate_hz)?;
    if n_fft_bins < 2 {
        bail!(Config, "need at least two spectrum bins");
    }
    let (lo, hi) = (hz_to_mel(cfg.f_min_hz), hz_to_mel(cfg.f_max_hz));
    let points: Vec<f64> =
        (0..cfg.n_mels + 2).map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (cfg.n_mels + 1) as f64)).collect();
    let bin_hz = sample_rate_hz / (2 * (n_fft_bins - 1)) as f64;
    let mut weights = vec![0.0; cfg.n_mels * n_fft_bins];
    for m in 0..cfg.n_mels {
        let (left, center, right) = (points[m], points[m + 1], points[m + 2]);
        let row = &mut weights[m * n_fft_bins..(m + 1) * n_fft_bins];
        for (k, w) in row.iter_mut().enumerate() {
            let f = k as f64 * bin_hz;
            *w = if f > left && f <= center {
                (f - left) / (center - left)
            } else if f > center && f < right {
                (right - f) / (right - center)
            } else {
                0.0
            };
        }
        if row.iter().all(|&w| w == 0.0) {
            bail!(
                Config,
                "mel filter {m} ({left:.1}..{right:.1} Hz) covers no spectrum bin; reduce n_mels or enlarge the window"
            );
        }
    }
    Ok(MelFilterbank { n_mels: cfg.n_mels, n_bins: n_fft_bins, weights, centers_hz: points[1..=cfg.n_mels].to_vec() })
}

/// Orthonormal DCT-II basis, row-major `n x n`: row `k` holds
/// `s_k cos(pi k (2j + 1) / 2n)` with `s_0 = sqrt(1/n)`, `s_k = sqrt(2/n)`.
pub fn dct_basis(n: usize) -> Vec<f64> {
    let mut b = vec![0.0; n * n];
    for k in 0..n {
        let s = if k == 0 { libm::sqrt(1.0 / n as f64) } else { libm::sqrt(2.0 / n as f64) };
        for j in 0..n {
            b[k * n + j] = s * libm::cos(PI * k as f64 * (2 * j + 1) as f64 / (2 * n) as f64);
        }
    }
    b
}

/// Inverse of the orthonormal DCT-II (its transpose), applied to `coeffs`.
pub fn inverse_dct(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let b = dct_basis(n);
    (0..n).map(|j| (0..n).map(|k| b[k * n + j] * coeffs[k]).sum()).collect()
}

/// Build-once extractor for one waveform length and sample rate. Holds the
/// FFT plans, the mel filterbank and the DCT basis; immutable and shareable.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    cfg: FeatureConfig,
    sample_rate_hz: u32,
    stft: Stft,
    filterbank: MelFilterbank,
    dct: Vec<f64>,
}

impl FeatureExtractor {
    pub fn new(cfg: FeatureConfig, sample_rate_hz: u32) -> Result<Self> {
        let stft = Stft::new(cfg.stft)?;
        let filterbank = mel_filterbank(&cfg.mel, cfg.stft.n_bins(), f64::from(sample_rate_hz))?;
        let dct = dct_basis(cfg.mel.n_mels);
        Ok(Self { cfg, sample_rate_hz, stft, filterbank, dct })
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.cfg
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    /// Shape of `kind` for a waveform of `n_samples` samples.
    pub fn output_dims(&self, kind: ReprKind, n_samples: usize) -> Result<Vec<usize>> {
        Ok(match kind {
            ReprKind::Waveform => vec![n_samples],
            ReprKind::Spectrum => {
                if n_samples < 2 {
                    bail!(Size, "spectrum needs at least two samples");
                }
                vec![n_samples.next_power_of_two() / 2 + 1]
            }
            ReprKind::SmoothedSpectrum => {
                self.cfg.stft.n_frames(n_samples)?;
                vec![self.cfg.stft.n_bins()]
            }
            ReprKind::Spectrogram => vec![self.cfg.stft.n_frames(n_samples)?, self.cfg.stft.n_bins()],
            ReprKind::MelSpectrogram => vec![self.cfg.stft.n_frames(n_samples)?, self.cfg.mel.n_mels],
            ReprKind::Mfcc => vec![self.cfg.stft.n_frames(n_samples)?, self.cfg.mel.n_mfcc],
        })
    }

    fn check_rate(&self, w: &Waveform) -> Result<()> {
        if w.sample_rate_hz() != self.sample_rate_hz {
            bail!(
                Config,
                "waveform sample rate {} Hz differs from extractor rate {} Hz",
                w.sample_rate_hz(),
                self.sample_rate_hz
            );
        }
        Ok(())
    }

    pub fn extract(&self, w: &Waveform, kind: ReprKind) -> Result<FeatureVector> {
        match kind {
            ReprKind::Waveform => FeatureVector::new(w.samples().to_vec(), kind, vec![w.len()]),
            ReprKind::Spectrum => spectrum(w),
            ReprKind::SmoothedSpectrum => self.smoothed_spectrum(w),
            ReprKind::Spectrogram => self.spectrogram(w),
            ReprKind::MelSpectrogram => self.mel_spectrogram(w),
            ReprKind::Mfcc => self.mfcc(w),
        }
    }

    pub fn smoothed_spectrum(&self, w: &Waveform) -> Result<FeatureVector> {
        self.check_rate(w)?;
        let mut sum = vec![0.0; self.cfg.stft.n_bins()];
        self.stft.for_each_frame(w.samples(), |_, bins| {
            for (s, c) in sum.iter_mut().zip(bins) {
                *s += c.norm();
            }
        })?;
        let n = sum.len();
        FeatureVector::new(sum, ReprKind::SmoothedSpectrum, vec![n])
    }

    pub fn spectrogram(&self, w: &Waveform) -> Result<FeatureVector> {
        self.check_rate(w)?;
        let n_bins = self.cfg.stft.n_bins();
        let mut values = Vec::new();
        let n_frames = self.stft.for_each_frame(w.samples(), |_, bins| values.extend(bins.iter().map(|c| c.norm())))?;
        FeatureVector::new(values, ReprKind::Spectrogram, vec![n_frames, n_bins])
    }

    /// Mel-projected power per frame before log compression, `frames x n_mels`.
    pub fn mel_power(&self, w: &Waveform) -> Result<Vec<f64>> {
        self.check_rate(w)?;
        let n_mels = self.cfg.mel.n_mels;
        let mut power = vec![0.0; self.cfg.stft.n_bins()];
        let mut out = Vec::new();
        self.stft.for_each_frame(w.samples(), |_, bins| {
            for (p, c) in power.iter_mut().zip(bins) {
                *p = c.norm_sqr();
            }
            let start = out.len();
            out.resize(start + n_mels, 0.0);
            self.filterbank.apply_into(&power, &mut out[start..]);
        })?;
        Ok(out)
    }

    /// `log(1 + mel power)` per frame and filter.
    pub fn mel_spectrogram(&self, w: &Waveform) -> Result<FeatureVector> {
        let mut values = self.mel_power(w)?;
        for v in &mut values {
            *v = libm::log1p(*v);
        }
        let n_frames = values.len() / self.cfg.mel.n_mels;
        FeatureVector::new(values, ReprKind::MelSpectrogram, vec![n_frames, self.cfg.mel.n_mels])
    }

    /// Orthonormal DCT-II of each log-mel frame, truncated to `n_mfcc`.
    pub fn mfcc(&self, w: &Waveform) -> Result<FeatureVector> {
        let mel = self.mel_spectrogram(w)?;
        let (n_mels, n_mfcc) = (self.cfg.mel.n_mels, self.cfg.mel.n_mfcc);
        let n_frames = mel.dims[0];
        let mut values = Vec::with_capacity(n_frames * n_mfcc);
        for frame in mel.values.chunks_exact(n_mels) {
            values.extend(dct_rows(&self.dct, n_mels, n_mfcc, frame));
        }
        FeatureVector::new(values, ReprKind::Mfcc, vec![n_frames, n_mfcc])
    }
}

fn dct_rows<'a>(basis: &'a [f64], n: usize, keep: usize, x: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
    basis.chunks_exact(n).take(keep).map(move |row| row.iter().zip(x).map(|(b, v)| b * v).sum())
}

/// Magnitude of the one-sided DFT of the whole recording, zero-padded to the
/// next power of two.
pub fn spectrum(w: &Waveform) -> Result<FeatureVector> {
    if w.len() < 2 {
        bail!(Size, "spectrum needs at least two samples, got {}", w.len());
    }
    let n = w.len().next_power_of_two();
    let mut padded = w.samples().to_vec();
    padded.resize(n, 0.0);
    let bins = RealFft::new(n)?.forward(&padded);
    let values: Vec<f64> = bins.iter().map(|c| c.norm()).collect();
    let len = values.len();
    FeatureVector::new(values, ReprKind::Spectrum, vec![len])
}

/// Per-bin sum of STFT frame magnitudes.
pub fn smoothed_spectrum(w: &Waveform, cfg: &StftConfig) -> Result<FeatureVector> {
    let stft = Stft::new(*cfg)?;
    let mut sum = vec![0.0; cfg.n_bins()];
    stft.for_each_frame(w.samples(), |_, bins| {
        for (s, c) in sum.iter_mut().zip(bins) {
            *s += c.norm();
        }
    })?;
    let n = sum.len();
    FeatureVector::new(sum, ReprKind::SmoothedSpectrum, vec![n])
}

/// Magnitude spectrogram, `frames x (window / 2 + 1)`, time-major.
pub fn spectrogram(w: &Waveform, cfg: &StftConfig) -> Result<FeatureVector> {
    let stft = Stft::new(*cfg)?;
    let mut values = Vec::new();
    let n_frames = stft.for_each_frame(w.samples(), |_, bins| values.extend(bins.iter().map(|c| c.norm())))?;
    FeatureVector::new(values, ReprKind::Spectrogram, vec![n_frames, cfg.n_bins()])
}

pub fn mel_spectrogram(w: &Waveform, stft: &StftConfig, mel: &MelConfig) -> Result<FeatureVector> {
    FeatureExtractor::new(FeatureConfig { stft: *stft, mel: *mel }, w.sample_rate_hz())?.mel_spectrogram(w)
}

pub fn mfcc(w: &Waveform, stft: &StftConfig, mel: &MelConfig) -> Result<FeatureVector> {
    FeatureExtractor::new(FeatureConfig { stft: *stft, mel: *mel }, w.sample_rate_hz())?.mfcc(w)
}

/// Dispatches to the extractor for `kind`.
pub fn extract(w: &Waveform, kind: ReprKind, cfg: &FeatureConfig) -> Result<FeatureVector> {
    match kind {
        ReprKind::Waveform => FeatureVector::new(w.samples().to_vec(), kind, vec![w.len()]),
        ReprKind::Spectrum => spectrum(w),
        ReprKind::SmoothedSpectrum => smoothed_spectrum(w, &cfg.stft),
        ReprKind::Spectrogram => spectrogram(w, &cfg.stft),
        ReprKind::MelSpectrogram => mel_spectrogram(w, &cfg.stft, &cfg.mel),
        ReprKind::Mfcc => mfcc(w, &cfg.stft, &cfg.mel),
    }
}
