//! Acoustic tactile sensing on soft actuators.
//!
//! A speaker inside the actuator plays a frequency sweep, a microphone records
//! it after the structure has modulated it, and a learned sensor model maps the
//! recording to the contact state on the actuator surface. This crate holds the
//! allocation-only core of that pipeline:
//!
//! * [`signal`]: sweep excitation, FFT and STFT primitives.
//! * [`features`]: the sound representations used as model input.
//! * [`braille`]: Braille display geometry, the letter alphabet and the word
//!   corrector.
//! * [`sim`]: a parametric forward model of the sensorized actuator that turns
//!   contact patterns into recordings, plus labeled dataset generation.
//! * [`learn`]: KNN, SVM and MLP sensor models, grid search and metrics.
//! * [`experiment`]: the edge, pin, letter, representation and word-reading
//!   experiments, independent of any file IO.
//!
//! The crate is `no_std` when the default `std` feature is disabled. The
//! `parallel` feature enables rayon for dataset synthesis and SVM training.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod braille;
mod error;
pub mod experiment;
pub mod features;
pub mod learn;
mod par;
pub mod signal;
pub mod sim;

pub use error::{Error, Result};
