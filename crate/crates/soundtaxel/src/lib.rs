//! File formats, experiment runs and the command line on top of
//! `soundtaxel-core`.

pub mod check;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod error;
pub mod model;
pub mod recordings;
pub mod report;
pub mod run;
pub mod wav;

pub use error::{Error, Result};
