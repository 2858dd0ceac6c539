//! Dataset persistence: `manifest.json` describing every sample plus
//! `features.bin`, the feature matrix as little-endian `f32` rows in
//! manifest order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use soundtaxel_core::braille::ContactPattern;
use soundtaxel_core::features::ReprKind;
use soundtaxel_core::sim::{Dataset, Label, LabelSchema, SampleMeta, Split};

use crate::error::{Error, IoContext, Result};

pub const MANIFEST: &str = "manifest.json";
pub const FEATURES: &str = "features.bin";
const FORMAT: &str = "soundtaxel-dataset";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub label_schema: LabelSchema,
    pub repr: ReprKind,
    pub dims: Vec<usize>,
    /// Values per sample in `features.bin`.
    pub stride: usize,
    pub n_samples: usize,
    pub class_names: Vec<String>,
    pub seed: u64,
    pub samples: Vec<SampleEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleEntry {
    pub label: Label,
    pub group: usize,
    pub split: Split,
    /// Rows of `#` (extended) and `.` (retracted) joined by `/`.
    pub pattern: String,
    pub sample_seed: u64,
}

impl Manifest {
    pub fn of(ds: &Dataset) -> Self {
        Manifest {
            format: FORMAT.into(),
            version: VERSION,
            label_schema: ds.label_schema,
            repr: ds.repr_kind,
            dims: ds.dims.clone(),
            stride: ds.dim(),
            n_samples: ds.len(),
            class_names: ds.class_names.clone(),
            seed: ds.seed,
            samples: (0..ds.len())
                .map(|i| SampleEntry {
                    label: ds.label(i),
                    group: ds.group(i),
                    split: ds.split(i),
                    pattern: ds.pattern(i).to_text(),
                    sample_seed: ds.sample_seed(i),
                })
                .collect(),
        }
    }
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::format(path, "json", e.to_string()))?;
    text.push('\n');
    fs::write(path, text).at(path)
}

pub(crate) fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).at(path)?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, format!("line {}", e.line()), e.to_string()))
}

/// Writes `manifest.json` and `features.bin` into `dir`, creating it.
pub fn save_dataset(ds: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).at(dir)?;
    let bin: Vec<u8> = ds.features().iter().flat_map(|v| v.to_le_bytes()).collect();
    let path = dir.join(FEATURES);
    fs::write(&path, bin).at(&path)?;
    write_json(&dir.join(MANIFEST), &Manifest::of(ds))
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let mpath = dir.join(MANIFEST);
    let m: Manifest = read_json(&mpath)?;
    if m.format != FORMAT || m.version != VERSION {
        return Err(Error::format(&mpath, "format", format!("expected {FORMAT} version {VERSION}")));
    }
    if m.samples.len() != m.n_samples {
        return Err(Error::format(
            &mpath,
            "samples",
            format!("{} entries for n_samples = {}", m.samples.len(), m.n_samples),
        ));
    }
    if m.dims.iter().product::<usize>() != m.stride {
        return Err(Error::format(&mpath, "stride", format!("dims {:?} do not multiply to {}", m.dims, m.stride)));
    }
    let fpath = dir.join(FEATURES);
    let bin = fs::read(&fpath).at(&fpath)?;
    if bin.len() != m.n_samples * m.stride * 4 {
        return Err(Error::format(
            &fpath,
            format!("byte {}", bin.len()),
            format!("expected {} bytes for {} samples of {} values", m.n_samples * m.stride * 4, m.n_samples, m.stride),
        ));
    }
    let features = bin.chunks_exact(4).map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]])).collect();
    let meta = m
        .samples
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let pattern = ContactPattern::from_text(&s.pattern)
                .map_err(|e| Error::format(&mpath, format!("samples[{i}].pattern"), e.to_string()))?;
            Ok(SampleMeta { label: s.label, group: s.group, split: s.split, pattern, sample_seed: s.sample_seed })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::from_parts(m.label_schema, m.repr, m.dims, m.class_names, m.seed, features, meta)
        .map_err(|e| Error::format(&mpath, "samples", e.to_string()))
}
