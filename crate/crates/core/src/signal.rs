//! Excitation sweeps, windowing and Fourier transforms.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::bail;
use crate::Result;

/// Shape of the instantaneous-frequency trajectory of the excitation sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SweepShape {
    #[default]
    Linear,
    Logarithmic,
}

/// Audio interface and excitation settings.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AudioConfig {
    pub sample_rate_hz: u32,
    /// Recording precision. Metadata only; processing is in `f64`.
    pub bit_depth: u16,
    pub sweep_duration_s: f64,
    pub sweep_f_start_hz: f64,
    pub sweep_f_end_hz: f64,
    pub sweep_shape: SweepShape,
    /// Length of the raised-cosine fade at each end of the sweep. Zero gives a
    /// flat envelope; the default 5 ms keeps the edges from leaking energy
    /// outside the swept band.
    pub fade_s: f64,
}

impl Default for AudioConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: 48_000,
            bit_depth: 32,
            sweep_duration_s: 1.0,
            sweep_f_start_hz: 100.0,
            sweep_f_end_hz: 10_000.0,
            sweep_shape: SweepShape::Linear,
            fade_s: 0.005,
        }
    }
}

impl AudioConfig {
    /// Checks the configuration invariants. `f_start == f_end` is accepted and
    /// yields a pure tone.
    pub fn validate(&self) -> Result<()> {
        if self.sample_rate_hz == 0 {
            bail!(Config, "sample rate must be positive");
        }
        let nyquist = f64::from(self.sample_rate_hz) / 2.0;
        let (f0, f1) = (self.sweep_f_start_hz, self.sweep_f_end_hz);
        if !(f0.is_finite() && f0 > 0.0) {
            bail!(Config, "sweep start frequency {f0} Hz must be positive");
        }
        if !(f1.is_finite() && f1 >= f0) {
            bail!(Config, "sweep end frequency {f1} Hz is below start frequency {f0} Hz");
        }
        if f1 >= nyquist {
            bail!(Config, "sweep end frequency {f1} Hz is not below Nyquist ({nyquist} Hz)");
        }
        let d = self.sweep_duration_s;
        if !(d.is_finite() && d > 0.0) {
            bail!(Config, "sweep duration {d} s must be positive");
        }
        let n = d * f64::from(self.sample_rate_hz);
        if (n - libm::round(n)).abs() > 1e-9 * n.max(1.0) || n < 1.0 {
            bail!(Config, "sweep duration {d} s is not a whole number of samples");
        }
        if !(self.fade_s.is_finite() && self.fade_s >= 0.0 && 2.0 * self.fade_s <= d) {
            bail!(Config, "fade length {} s must be in 0..={} s", self.fade_s, d / 2.0);
        }
        Ok(())
    }

    /// Number of samples in one sweep recording.
    pub fn n_samples(&self) -> usize {
        libm::round(self.sweep_duration_s * f64::from(self.sample_rate_hz)) as usize
    }

    /// Instantaneous frequency of the sweep at time `t` seconds.
    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        let (f0, f1, d) = (self.sweep_f_start_hz, self.sweep_f_end_hz, self.sweep_duration_s);
        match self.sweep_shape {
            SweepShape::Linear => f0 + (f1 - f0) * t / d,
            SweepShape::Logarithmic => f0 * libm::pow(f1 / f0, t / d),
        }
    }

    fn phase(&self, t: f64) -> f64 {
        let (f0, f1, d) = (self.sweep_f_start_hz, self.sweep_f_end_hz, self.sweep_duration_s);
        match self.sweep_shape {
            SweepShape::Linear => 2.0 * PI * (f0 * t + (f1 - f0) * t * t / (2.0 * d)),
            SweepShape::Logarithmic if f1 == f0 => 2.0 * PI * f0 * t,
            SweepShape::Logarithmic => {
                let k = libm::log(f1 / f0) / d;
                2.0 * PI * f0 * libm::expm1(k * t) / k
            }
        }
    }
}

/// A mono recording.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl Waveform {
    /// Wraps samples, rejecting empty or non-finite data. Nominal amplitude
    /// range is [-1, 1]; WAV output clamps to it.
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self> {
        if samples.is_empty() {
            bail!(Size, "waveform is empty");
        }
        if sample_rate_hz == 0 {
            bail!(Config, "sample rate must be positive");
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            bail!(Validation, "sample {i} is not finite");
        }
        Ok(Self { samples, sample_rate_hz })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate_hz)
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Generates the unit-amplitude excitation sweep. Deterministic.
pub fn generate_sweep(config: &AudioConfig) -> Result<Waveform> {
    config.validate()?;
    let rate = f64::from(config.sample_rate_hz);
    let n = config.n_samples();
    let fade = (libm::round(config.fade_s * rate) as usize).min(n / 2);
    let samples = (0..n)
        .map(|i| {
            let edge = i.min(n - 1 - i);
            let gain = if edge < fade { 0.5 - 0.5 * libm::cos(PI * edge as f64 / fade as f64) } else { 1.0 };
            gain * libm::sin(config.phase(i as f64 / rate))
        })
        .collect();
    Waveform::new(samples, config.sample_rate_hz)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum WindowFn {
    Rectangular,
    #[default]
    Hann,
}

impl WindowFn {
    /// Window coefficients of length `n`. Hann is the periodic form
    /// `0.5 - 0.5 cos(2 pi k / n)`.
    pub fn coefficients(self, n: usize) -> Vec<f64> {
        match self {
            WindowFn::Rectangular => vec![1.0; n],
            WindowFn::Hann => (0..n).map(|k| 0.5 - 0.5 * libm::cos(2.0 * PI * k as f64 / n as f64)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StftConfig {
    pub window_size: usize,
    pub hop_size: usize,
    pub window_fn: WindowFn,
}

impl Default for StftConfig {
    fn default() -> Self {
        Self { window_size: 2048, hop_size: 512, window_fn: WindowFn::Hann }
    }
}

impl StftConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.window_size.is_power_of_two() {
            bail!(Config, "window size {} is not a power of two", self.window_size);
        }
        if self.hop_size == 0 || self.hop_size > self.window_size {
            bail!(Config, "hop size {} must be in 1..={}", self.hop_size, self.window_size);
        }
        Ok(())
    }

    pub fn n_bins(&self) -> usize {
        self.window_size / 2 + 1
    }

    /// Number of frames for a signal of `len` samples, or a size error when the
    /// signal is shorter than one window.
    pub fn n_frames(&self, len: usize) -> Result<usize> {
        self.validate()?;
        if len < self.window_size {
            bail!(Size, "signal of {len} samples is shorter than the {}-sample window", self.window_size);
        }
        Ok((len - self.window_size) / self.hop_size + 1)
    }
}

/// One-sided spectrum of a real frame: `window_size / 2 + 1` bins.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrumFrame {
    pub bins: Vec<Complex64>,
    pub bin_resolution_hz: f64,
}

impl ComplexSpectrumFrame {
    pub fn magnitudes(&self) -> impl Iterator<Item = f64> + '_ {
        self.bins.iter().map(|c| c.norm())
    }
}

/// Radix-2 complex FFT of a fixed size.
#[derive(Debug, Clone)]
struct ComplexFft {
    n: usize,
    twiddles: Vec<Complex64>,
    bit_reverse: Vec<usize>,
}

impl ComplexFft {
    fn new(n: usize) -> Self {
        debug_assert!(n.is_power_of_two());
        let twiddles = (0..n / 2).map(|k| unit_phasor(-2.0 * PI * k as f64 / n as f64)).collect();
        let bits = n.trailing_zeros();
        let bit_reverse =
            (0..n).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) }).collect();
        Self { n, twiddles, bit_reverse }
    }

    fn process(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.n);
        for (i, &j) in self.bit_reverse.iter().enumerate() {
            if i < j {
                data.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= self.n {
            let half = size / 2;
            let stride = self.n / size;
            for block in data.chunks_exact_mut(size) {
                let (lo, hi) = block.split_at_mut(half);
                for (k, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                    let t = *b * self.twiddles[k * stride];
                    *b = *a - t;
                    *a += t;
                }
            }
            size *= 2;
        }
    }
}

fn unit_phasor(theta: f64) -> Complex64 {
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

/// Reusable plan for the one-sided FFT of real frames of one power-of-two
/// length. Immutable once built, so it can be shared between threads.
#[derive(Debug, Clone)]
pub struct RealFft {
    n: usize,
    half: ComplexFft,
    post: Vec<Complex64>,
}

impl RealFft {
    pub fn new(n: usize) -> Result<Self> {
        if !n.is_power_of_two() {
            bail!(Size, "FFT length {n} is not a power of two");
        }
        let m = (n / 2).max(1);
        let post = (0..=n / 2).map(|k| unit_phasor(-2.0 * PI * k as f64 / n as f64)).collect();
        Ok(Self { n, half: ComplexFft::new(m), post })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// One-sided spectrum of `input` (length `n`), written into `out`
    /// (length `n / 2 + 1`). `scratch` must hold at least `n / 2` values.
    pub fn forward_into(&self, input: &[f64], out: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let n = self.n;
        debug_assert_eq!(input.len(), n);
        debug_assert_eq!(out.len(), n / 2 + 1);
        if n == 1 {
            out[0] = Complex64::new(input[0], 0.0);
            return;
        }
        let m = n / 2;
        scratch.clear();
        scratch.extend(input.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])));
        self.half.process(scratch);
        let z = &scratch[..];
        for k in 0..=m {
            let zk = z[k % m];
            let zc = z[(m - k) % m].conj();
            let even = (zk + zc) * 0.5;
            let odd = (zk - zc) * Complex64::new(0.0, -0.5);
            out[k] = even + self.post[k] * odd;
        }
    }

    pub fn forward(&self, input: &[f64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n / 2 + 1];
        let mut scratch = Vec::with_capacity(self.n / 2);
        self.forward_into(input, &mut out, &mut scratch);
        out
    }
}

/// One-sided DFT of a windowed real frame whose length is a power of two.
pub fn dft(frame: &[f64], window_fn: WindowFn, sample_rate_hz: f64) -> Result<ComplexSpectrumFrame> {
    let plan = RealFft::new(frame.len())?;
    if frame.is_empty() {
        bail!(Size, "empty frame");
    }
    let windowed: Vec<f64> = frame.iter().zip(window_fn.coefficients(frame.len())).map(|(x, w)| x * w).collect();
    Ok(ComplexSpectrumFrame { bins: plan.forward(&windowed), bin_resolution_hz: sample_rate_hz / frame.len() as f64 })
}

/// Sliding-window frame extraction plus FFT for a fixed [`StftConfig`].
#[derive(Debug, Clone)]
pub struct Stft {
    cfg: StftConfig,
    window: Vec<f64>,
    fft: RealFft,
}

impl Stft {
    pub fn new(cfg: StftConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, window: cfg.window_fn.coefficients(cfg.window_size), fft: RealFft::new(cfg.window_size)? })
    }

    pub fn config(&self) -> &StftConfig {
        &self.cfg
    }

    /// Windowed input block of frame `i`: samples `[i * hop, i * hop + window)`
    /// multiplied by the window.
    pub fn windowed_block(&self, samples: &[f64], i: usize) -> Vec<f64> {
        let start = i * self.cfg.hop_size;
        samples[start..start + self.cfg.window_size].iter().zip(&self.window).map(|(x, w)| x * w).collect()
    }

    /// Calls `visit(frame_index, bins)` for every frame in order.
    pub fn for_each_frame<F>(&self, samples: &[f64], mut visit: F) -> Result<usize>
    where
        F: FnMut(usize, &[Complex64]),
    {
        let n_frames = self.cfg.n_frames(samples.len())?;
        let mut block = vec![0.0; self.cfg.window_size];
        let mut bins = vec![Complex64::new(0.0, 0.0); self.cfg.n_bins()];
        let mut scratch = Vec::with_capacity(self.cfg.window_size / 2);
        for i in 0..n_frames {
            let start = i * self.cfg.hop_size;
            for ((b, x), w) in block.iter_mut().zip(&samples[start..]).zip(&self.window) {
                *b = x * w;
            }
            self.fft.forward_into(&block, &mut bins, &mut scratch);
            visit(i, &bins);
        }
        Ok(n_frames)
    }

    pub fn frames(&self, w: &Waveform) -> Result<Vec<ComplexSpectrumFrame>> {
        let resolution = f64::from(w.sample_rate_hz()) / self.cfg.window_size as f64;
        let mut frames = Vec::new();
        self.for_each_frame(w.samples(), |_, bins| {
            frames.push(ComplexSpectrumFrame { bins: bins.to_vec(), bin_resolution_hz: resolution })
        })?;
        Ok(frames)
    }
}

/// Short-time Fourier transform: frame `i` covers `[i * hop, i * hop + window)`.
pub fn stft(w: &Waveform, cfg: &StftConfig) -> Result<Vec<ComplexSpectrumFrame>> {
    Stft::new(*cfg)?.frames(w)
}
