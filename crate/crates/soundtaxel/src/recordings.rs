//! Directories of WAV recordings with a `labels.json` manifest. Synthesized
//! datasets are written in this layout, and recordings from a physical rig
//! in the same layout featurize through the same path.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use soundtaxel_core::braille::ContactPattern;
use soundtaxel_core::features::{FeatureConfig, FeatureExtractor, ReprKind};
use soundtaxel_core::sim::{
    featurize_plan, mix_seed, Dataset, DatasetPlan, Label, LabelSchema, PlanItem, Simulator, SplitRatio,
};

use crate::dataset::{read_json, write_json};
use crate::error::{Error, IoContext, Result};
use crate::wav::{load_wav, write_wav, WavEncoding};

pub const LABELS: &str = "labels.json";
const FORMAT: &str = "soundtaxel-recordings";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelsFile {
    pub format: String,
    pub version: u32,
    pub label_schema: LabelSchema,
    pub class_names: Vec<String>,
    pub split: SplitRatio,
    /// Seeds the train/test assignment.
    pub seed: u64,
    pub recordings: Vec<Recording>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recording {
    /// Relative to the directory holding `labels.json`.
    pub file: PathBuf,
    pub label: Label,
    pub group: usize,
    pub pattern: String,
    /// Synthesis seed; 0 for physical recordings.
    #[serde(default)]
    pub sample_seed: u64,
}

/// Synthesizes every item of `plan` into `dir/wav/NNNNN.wav` and writes the
/// labels manifest. Sample seeds follow the in-memory dataset generator.
pub fn synthesize_recordings(plan: &DatasetPlan, simulator: &Simulator, dir: &Path) -> Result<LabelsFile> {
    let wav_dir = dir.join("wav");
    fs::create_dir_all(&wav_dir).at(&wav_dir)?;
    let encoding = WavEncoding::from_bit_depth(simulator.audio().bit_depth)?;
    let stream = mix_seed(plan.seed, simulator.config().seed);
    let mut recordings = Vec::with_capacity(plan.items.len());
    for (i, item) in plan.items.iter().enumerate() {
        let seed = mix_seed(stream, i as u64);
        let w = simulator.synthesize(&item.pattern, seed)?;
        let file = PathBuf::from("wav").join(format!("{i:05}.wav"));
        write_wav(&w, &dir.join(&file), encoding)?;
        recordings.push(Recording {
            file,
            label: item.label,
            group: item.group,
            pattern: item.pattern.to_text(),
            sample_seed: seed,
        });
    }
    let labels = LabelsFile {
        format: FORMAT.into(),
        version: VERSION,
        label_schema: plan.label_schema,
        class_names: plan.class_names.clone(),
        split: plan.split,
        seed: plan.seed,
        recordings,
    };
    write_json(&dir.join(LABELS), &labels)?;
    Ok(labels)
}

/// Loads a recordings directory and featurizes it. The sample rate of the
/// first recording fixes the extractor; all others must match it.
pub fn featurize_recordings(dir: &Path, features: FeatureConfig, kind: ReprKind) -> Result<Dataset> {
    let lpath = dir.join(LABELS);
    let labels: LabelsFile = read_json(&lpath)?;
    if labels.format != FORMAT || labels.version != VERSION {
        return Err(Error::format(&lpath, "format", format!("expected {FORMAT} version {VERSION}")));
    }
    let Some(first) = labels.recordings.first() else {
        return Err(Error::format(&lpath, "recordings", "no recordings listed"));
    };
    let rate = load_wav(&dir.join(&first.file))?.sample_rate_hz();
    let items = labels
        .recordings
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let pattern = ContactPattern::from_text(&r.pattern)
                .map_err(|e| Error::format(&lpath, format!("recordings[{i}].pattern"), e.to_string()))?;
            if r.group >= labels.class_names.len() {
                return Err(Error::format(&lpath, format!("recordings[{i}].group"), "group has no class name"));
            }
            Ok(PlanItem { pattern, label: r.label, group: r.group })
        })
        .collect::<Result<Vec<_>>>()?;
    let plan = DatasetPlan {
        items,
        label_schema: labels.label_schema,
        class_names: labels.class_names.clone(),
        split: labels.split,
        seed: labels.seed,
    };
    let extractor = FeatureExtractor::new(features, rate)?;
    // Errors cross the core closure boundary as strings. The originals are
    // kept by index so the lowest failing sample is reported with its own
    // kind, whatever order the workers ran in.
    let failures = std::sync::Mutex::new(std::collections::BTreeMap::new());
    let result = featurize_plan(&plan, &extractor, kind, |i, _| {
        let r = &labels.recordings[i];
        let path = dir.join(&r.file);
        let outcome = load_wav(&path).and_then(|w| {
            if w.sample_rate_hz() != rate {
                Err(Error::format(&path, "header", format!("sample rate {} differs from {rate}", w.sample_rate_hz())))
            } else {
                Ok(w)
            }
        });
        match outcome {
            Ok(w) => Ok((w, r.sample_seed)),
            Err(e) => {
                let msg = e.to_string();
                failures.lock().unwrap().insert(i, e);
                Err(soundtaxel_core::Error::Validation(msg))
            }
        }
    });
    match (result, failures.into_inner().unwrap().pop_first()) {
        (Err(_), Some((_, e))) => Err(e),
        (r, _) => Ok(r?),
    }
}
