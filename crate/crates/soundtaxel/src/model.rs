//! `model.json`: a trained [`SensorModel`] with a format tag and version.
//! Floats are written in shortest round-trip form, so a loaded model
//! reproduces the saved one bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};
use soundtaxel_core::learn::SensorModel;

use crate::dataset::{read_json, write_json};
use crate::error::{Error, Result};

pub const MODEL: &str = "model.json";
const FORMAT: &str = "soundtaxel-model";
const VERSION: u32 = 1;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    format: String,
    version: u32,
    model: SensorModel,
}

#[derive(Serialize)]
struct ModelFileRef<'a> {
    format: &'a str,
    version: u32,
    model: &'a SensorModel,
}

pub fn save_model(model: &SensorModel, path: &Path) -> Result<()> {
    write_json(path, &ModelFileRef { format: FORMAT, version: VERSION, model })
}

pub fn load_model(path: &Path) -> Result<SensorModel> {
    let file: ModelFile = read_json(path)?;
    if file.format != FORMAT || file.version != VERSION {
        return Err(Error::format(path, "format", format!("expected {FORMAT} version {VERSION}")));
    }
    Ok(file.model)
}
