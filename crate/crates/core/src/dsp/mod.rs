//! Waveform / feature conversions: trimming, resampling, STFT, mel
//! filterbank, log compression, normalization, Griffin-Lim inversion, and
//! the binary feature-file format.

mod featfile;
mod features;
mod griffin_lim;
mod mel;
mod resample;
mod stft;
mod trim;
pub mod wav;

pub use featfile::{read_feature, write_feature};
pub use features::extract_features;
pub use griffin_lim::{griffin_lim, spectral_convergence};
pub use mel::{hz_to_mel, mel_filterbank, mel_to_hz};
pub use resample::resample;
pub use stft::{istft, stft_complex, stft_magnitude};
pub use trim::trim_silence;

use crate::error::DspError;
use crate::scalar::Scalar;
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Magnitude floor applied before any log compression.
pub const MAG_FLOOR: f64 = 1e-5;

/// Mono audio at a known sample rate; samples are nominally in [-1, 1].
#[derive(Clone, Debug)]
pub struct Waveform<T: Scalar> {
    pub samples: Vec<T>,
    pub sample_rate: u32,
}

impl<T: Scalar> Waveform<T> {
    pub fn new(samples: Vec<T>, sample_rate: u32) -> Self {
        assert!(sample_rate > 0, "sample_rate must be positive");
        debug_assert!(samples.iter().all(|s| s.is_finite()), "non-finite sample");
        Waveform { samples, sample_rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }
}

/// Spectrogram framing and normalization parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectroConfig {
    pub sample_rate: u32,
    /// Window length in seconds.
    pub win_length: f64,
    /// Hop length in seconds.
    pub hop_length: f64,
    pub nfft: usize,
    pub n_mels: usize,
    pub fmin: f64,
    pub fmax: f64,
    /// dB value mapped to 1.0 after normalization.
    pub ref_db: f64,
    /// dB span mapped onto [0, 1].
    pub dynamic_range_db: f64,
}

impl Default for SpectroConfig {
    fn default() -> Self {
        SpectroConfig {
            sample_rate: 16_000,
            win_length: 0.050,
            hop_length: 0.0125,
            nfft: 2048,
            n_mels: 80,
            fmin: 50.0,
            fmax: 8_000.0,
            ref_db: 20.0,
            dynamic_range_db: 100.0,
        }
    }
}

impl SpectroConfig {
    pub fn win_samples(&self) -> usize {
        (self.win_length * self.sample_rate as f64).round() as usize
    }

    pub fn hop_samples(&self) -> usize {
        (self.hop_length * self.sample_rate as f64).round() as usize
    }

    pub fn n_linear(&self) -> usize {
        self.nfft / 2 + 1
    }

    pub fn validate(&self) -> Result<(), DspError> {
        let win = self.win_samples();
        let hop = self.hop_samples();
        if win == 0 || hop == 0 {
            return Err(DspError::InvalidConfig("window and hop must be nonzero".into()));
        }
        if win > self.nfft {
            return Err(DspError::InvalidConfig(format!(
                "win_length*sample_rate = {win} exceeds nfft = {}",
                self.nfft
            )));
        }
        if hop > win {
            return Err(DspError::InvalidConfig(format!("hop {hop} exceeds window {win}")));
        }
        if self.n_mels >= self.n_linear() {
            return Err(DspError::InvalidConfig(format!(
                "n_mels {} must be < nfft/2+1 = {}",
                self.n_mels,
                self.n_linear()
            )));
        }
        let nyquist = self.sample_rate as f64 / 2.0;
        if !(self.fmin >= 0.0 && self.fmin < self.fmax && self.fmax <= nyquist) {
            return Err(DspError::InvalidConfig(format!(
                "need 0 <= fmin < fmax <= {nyquist}, got fmin {} fmax {}",
                self.fmin, self.fmax
            )));
        }
        if self.dynamic_range_db <= 0.0 {
            return Err(DspError::InvalidConfig("dynamic range must be positive".into()));
        }
        Ok(())
    }

    /// Affine dB -> [0,1] with clipping.
    pub fn normalize_db<T: Scalar>(&self, db: T) -> T {
        let lo = T::from_f64(self.ref_db - self.dynamic_range_db);
        let span = T::from_f64(self.dynamic_range_db);
        let v = (db - lo) / span;
        v.max(T::zero()).min(T::one())
    }

    /// Inverse of [`normalize_db`] (without the clipping, which is lossy).
    pub fn denormalize_db<T: Scalar>(&self, v: T) -> T {
        let lo = T::from_f64(self.ref_db - self.dynamic_range_db);
        let span = T::from_f64(self.dynamic_range_db);
        v * span + lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureKind {
    Mel,
    Linear,
}

impl FeatureKind {
    pub fn tag(self) -> u8 {
        match self {
            FeatureKind::Mel => 0,
            FeatureKind::Linear => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(FeatureKind::Mel),
            1 => Some(FeatureKind::Linear),
            _ => None,
        }
    }
}

/// Time-major feature matrix (T x F) with all entries in [0, 1].
#[derive(Clone, Debug)]
pub struct FeatureMatrix<T: Scalar> {
    pub values: Array2<T>,
    pub kind: FeatureKind,
    pub config: SpectroConfig,
}

impl<T: Scalar> FeatureMatrix<T> {
    pub fn new(values: Array2<T>, kind: FeatureKind, config: SpectroConfig) -> Self {
        debug_assert!(values.iter().all(|v| *v >= T::zero() && *v <= T::one()));
        FeatureMatrix { values, kind, config }
    }

    /// Construct from raw model output, clamping into [0, 1].
    pub fn from_unclamped(values: Array2<T>, kind: FeatureKind, config: SpectroConfig) -> Self {
        let values = values.mapv(|v| v.max(T::zero()).min(T::one()));
        FeatureMatrix { values, kind, config }
    }

    pub fn frames(&self) -> usize {
        self.values.nrows()
    }

    pub fn bins(&self) -> usize {
        self.values.ncols()
    }

    pub fn expected_bins(&self) -> usize {
        match self.kind {
            FeatureKind::Mel => self.config.n_mels,
            FeatureKind::Linear => self.config.n_linear(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> FeatureMatrix<U> {
        FeatureMatrix {
            values: self.values.mapv(|v| U::from_f64(v.to_f64())),
            kind: self.kind,
            config: self.config.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_frames_match_paper_setup() {
        let c = SpectroConfig::default();
        c.validate().unwrap();
        assert_eq!(c.win_samples(), 800);
        assert_eq!(c.hop_samples(), 200);
        assert_eq!(c.n_linear(), 1025);
    }

    #[test]
    fn normalize_maps_ref_db_to_one_and_floor_to_zero() {
        let c = SpectroConfig::default();
        assert!((c.normalize_db(c.ref_db) - 1.0).abs() < 1e-12);
        assert!((c.normalize_db(c.ref_db - c.dynamic_range_db)).abs() < 1e-12);
        assert_eq!(c.normalize_db(c.ref_db + 50.0), 1.0);
        assert_eq!(c.normalize_db(c.ref_db - 500.0), 0.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut c = SpectroConfig::default();
        c.nfft = 512; // win 800 > nfft
        assert!(c.validate().is_err());
        let mut c = SpectroConfig::default();
        c.n_mels = 1025;
        assert!(c.validate().is_err());
        let mut c = SpectroConfig::default();
        c.fmax = 9_000.0;
        assert!(c.validate().is_err());
    }
}
