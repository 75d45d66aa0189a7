//! Multitask voice-conversion / text-to-speech sequence-to-sequence model
//! with a synthetic parallel corpus and an exact oracle recognizer.
//!
//! The numeric core (DSP, autodiff, model, training) is generic over the
//! scalar type via [`scalar::Scalar`]; f32 is the working precision for
//! training and corpus generation, f64 backs the finite-difference gradient
//! checks. Concrete aliases for the common case live at the crate root.

pub mod config;
pub mod corpus;
pub mod dsp;
pub mod error;
pub mod eval;
pub mod model;
pub mod nn;
pub mod scalar;
pub mod text;
pub mod train;

pub use scalar::Scalar;

/// Working precision used by the pipelines and the CLI.
pub type Real = f32;

pub type Waveform = dsp::Waveform<Real>;
pub type FeatureMatrix = dsp::FeatureMatrix<Real>;
pub type Model = model::Model<Real>;
pub type ModelF64 = model::Model<f64>;
