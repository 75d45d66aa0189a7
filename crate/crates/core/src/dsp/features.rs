//! Waveform -> normalized log-spectrogram features.

use super::{
    mel_filterbank, stft_magnitude, FeatureKind, FeatureMatrix, SpectroConfig, Waveform, MAG_FLOOR,
};
use crate::error::DspError;
use crate::scalar::Scalar;
use ndarray::Array2;
use rustfft::FftNum;

fn to_db<T: Scalar>(mag: &Array2<T>) -> Array2<T> {
    let floor = T::from_f64(MAG_FLOOR);
    let twenty = T::from_f64(20.0);
    mag.mapv(|v| twenty * v.max(floor).log10())
}

/// Extract the normalized log-linear and log-mel spectrograms. The input is
/// expected to be trimmed and already at the configured sample rate.
pub fn extract_features<T: Scalar + FftNum>(
    w: &Waveform<T>,
    c: &SpectroConfig,
) -> Result<(FeatureMatrix<T>, FeatureMatrix<T>), DspError> {
    c.validate()?;
    assert_eq!(w.sample_rate, c.sample_rate, "resample before feature extraction");
    let mag = stft_magnitude(w, c)?; // T x F
    let fb = mel_filterbank::<T>(c); // M x F
    let mel_energy = mag.dot(&fb.t()); // T x M

    let linear_db = to_db(&mag);
    let mel_db = to_db(&mel_energy);
    let linear = linear_db.mapv(|v| c.normalize_db(v));
    let mel = mel_db.mapv(|v| c.normalize_db(v));
    Ok((
        FeatureMatrix::new(mel, FeatureKind::Mel, c.clone()),
        FeatureMatrix::new(linear, FeatureKind::Linear, c.clone()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_waveform_maps_to_zero_features() {
        let c = SpectroConfig::default();
        let w = Waveform::new(vec![0.0f64; 4000], 16_000);
        let (mel, linear) = extract_features(&w, &c).unwrap();
        assert!(mel.values.iter().all(|&v| v == 0.0));
        assert!(linear.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mel_and_linear_share_frame_count() {
        let c = SpectroConfig::default();
        let samples: Vec<f64> = (0..12_345)
            .map(|i| (2.0 * std::f64::consts::PI * 500.0 * i as f64 / 16_000.0).sin())
            .collect();
        let w = Waveform::new(samples, 16_000);
        let (mel, linear) = extract_features(&w, &c).unwrap();
        assert_eq!(mel.frames(), linear.frames());
        assert_eq!(mel.bins(), 80);
        assert_eq!(linear.bins(), 1025);
    }

    #[test]
    fn magnitude_at_ref_db_normalizes_to_one() {
        // a frame holding magnitude 10^(ref_db/20) in one bin must come out
        // as exactly 1.0 there; verified through the affine map inverse
        let c = SpectroConfig::default();
        let target_mag = 10f64.powf(c.ref_db / 20.0);
        let db = 20.0 * target_mag.log10();
        assert!((c.normalize_db(db) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn features_stay_in_unit_interval_for_loud_input() {
        let c = SpectroConfig::default();
        // amplitude far above ref level; clipping must cap at 1.0
        let samples: Vec<f64> = (0..4000)
            .map(|i| 50.0 * (2.0 * std::f64::consts::PI * 500.0 * i as f64 / 16_000.0).sin())
            .collect();
        let w = Waveform::new(samples, 16_000);
        let (mel, linear) = extract_features(&w, &c).unwrap();
        for v in mel.values.iter().chain(linear.values.iter()) {
            assert!(*v >= 0.0 && *v <= 1.0);
        }
    }
}
