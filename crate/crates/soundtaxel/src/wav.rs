//! Mono WAV ingestion and export.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use soundtaxel_core::signal::Waveform;

use crate::error::{Error, Result};

/// Sample encodings accepted by [`load_wav`] and produced by [`write_wav`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavEncoding {
    Int16,
    Int24,
    Int32,
    Float32,
}

impl WavEncoding {
    /// 16 and 24 bits are integer PCM; 32 bits is IEEE float, which stores
    /// the simulator's output without quantization.
    pub fn from_bit_depth(bits: u16) -> Result<Self> {
        match bits {
            16 => Ok(WavEncoding::Int16),
            24 => Ok(WavEncoding::Int24),
            32 => Ok(WavEncoding::Float32),
            _ => Err(Error::Usage(format!("unsupported WAV bit depth {bits}; use 16, 24 or 32"))),
        }
    }

    fn spec(self, sample_rate: u32) -> WavSpec {
        let (bits_per_sample, sample_format) = match self {
            WavEncoding::Int16 => (16, SampleFormat::Int),
            WavEncoding::Int24 => (24, SampleFormat::Int),
            WavEncoding::Int32 => (32, SampleFormat::Int),
            WavEncoding::Float32 => (32, SampleFormat::Float),
        };
        WavSpec { channels: 1, sample_rate, bits_per_sample, sample_format }
    }
}

fn wav_error(path: &Path, e: hound::Error) -> Error {
    match e {
        hound::Error::IoError(io) if io.kind() != std::io::ErrorKind::UnexpectedEof => Error::io(path, io),
        hound::Error::IoError(_) => Error::format(path, "data", "file ends inside a chunk"),
        other => Error::format(path, "header", other.to_string()),
    }
}

/// Reads a mono PCM (16/24/32-bit integer) or 32-bit float WAV file. Integer
/// samples are scaled by `2^-(bits-1)` into [-1, 1).
pub fn load_wav(path: &Path) -> Result<Waveform> {
    let mut reader = WavReader::open(path).map_err(|e| wav_error(path, e))?;
    let spec = reader.spec();
    if spec.channels != 1 {
        return Err(Error::format(
            path,
            "header",
            format!("{} channels; only mono recordings are accepted", spec.channels),
        ));
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()
            .map_err(|e| wav_error(path, e))?,
        (SampleFormat::Int, bits @ (16 | 24 | 32)) => {
            let scale = 1.0 / (1u64 << (bits - 1)) as f64;
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) * scale))
                .collect::<Result<_, _>>()
                .map_err(|e| wav_error(path, e))?
        }
        (format, bits) => {
            return Err(Error::format(path, "header", format!("unsupported sample format {format:?} with {bits} bits")))
        }
    };
    if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::format(path, format!("sample {i}"), "non-finite sample value"));
    }
    Waveform::new(samples, spec.sample_rate).map_err(|e| Error::format(path, "data", e.to_string()))
}

/// Writes `w` as a mono WAV file. Integer encodings scale by `2^(bits-1)`,
/// round, and clamp, so full-scale 1.0 becomes the largest code.
pub fn write_wav(w: &Waveform, path: &Path, encoding: WavEncoding) -> Result<()> {
    let mut writer = WavWriter::create(path, encoding.spec(w.sample_rate_hz())).map_err(|e| wav_error(path, e))?;
    let put = |writer: &mut WavWriter<_>, bits: u32| -> Result<(), hound::Error> {
        let full = (1i64 << (bits - 1)) as f64;
        for &x in w.samples() {
            let q = (x * full).round().clamp(-full, full - 1.0);
            writer.write_sample(q as i32)?;
        }
        Ok(())
    };
    match encoding {
        WavEncoding::Int16 => put(&mut writer, 16),
        WavEncoding::Int24 => put(&mut writer, 24),
        WavEncoding::Int32 => put(&mut writer, 32),
        WavEncoding::Float32 => w.samples().iter().try_for_each(|&x| writer.write_sample(x as f32)),
    }
    .map_err(|e| wav_error(path, e))?;
    writer.finalize().map_err(|e| wav_error(path, e))
}
