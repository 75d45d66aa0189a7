//! Griffin-Lim phase reconstruction from a normalized log-linear spectrogram.

use super::{istft, stft_complex, FeatureKind, FeatureMatrix, Waveform};
use crate::error::DspError;
use crate::scalar::Scalar;
use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::FftNum;

/// Invert a LINEAR feature matrix to a waveform with `iters` phase-refinement
/// iterations (zero-phase start, deterministic).
pub fn griffin_lim<T: Scalar + FftNum>(
    linear: &FeatureMatrix<T>,
    iters: usize,
) -> Result<Waveform<T>, DspError> {
    if linear.kind != FeatureKind::Linear {
        return Err(DspError::WrongKind {
            expected: "LINEAR".into(),
            got: format!("{:?}", linear.kind),
        });
    }
    let c = &linear.config;
    c.validate()?;
    let twenty = T::from_f64(20.0);
    let magnitude = linear.values.mapv(|v| {
        let db = c.denormalize_db(v);
        T::from_f64(10.0).powf(db / twenty)
    });

    let mut estimate: Array2<Complex<T>> = magnitude.mapv(|m| Complex::new(m, T::zero()));
    for _ in 0..iters {
        let wave = istft(&estimate, c);
        let rebuilt = stft_complex(&wave, c).expect("istft output long enough");
        estimate = rebuilt.mapv(|z| {
            let n = z.norm();
            if n > T::zero() {
                z / n
            } else {
                Complex::new(T::one(), T::zero())
            }
        });
        estimate.zip_mut_with(&magnitude, |e, &m| *e = *e * m);
    }
    Ok(istft(&estimate, c))
}

/// Relative spectral-convergence error of a waveform against a target
/// magnitude spectrogram: ||,|STFT(x)| - M,||_F / ||M||_F.
pub fn spectral_convergence<T: Scalar + FftNum>(
    wave: &Waveform<T>,
    linear: &FeatureMatrix<T>,
) -> T {
    let c = &linear.config;
    let twenty = T::from_f64(20.0);
    let magnitude = linear.values.mapv(|v| {
        let db = c.denormalize_db(v);
        T::from_f64(10.0).powf(db / twenty)
    });
    let spec = stft_complex(wave, c).expect("waveform shorter than a window");
    let mut num = T::zero();
    let mut den = T::zero();
    for (z, &m) in spec.iter().zip(magnitude.iter()) {
        let d = z.norm() - m;
        num += d * d;
        den += m * m;
    }
    (num / den.max(T::from_f64(1e-30))).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::{extract_features, SpectroConfig};

    fn sine_wave(freq: f64, secs: f64, sr: u32) -> Waveform<f64> {
        let n = (secs * sr as f64) as usize;
        Waveform::new(
            (0..n)
                .map(|i| 0.5 * (2.0 * std::f64::consts::PI * freq * i as f64 / sr as f64).sin())
                .collect(),
            sr,
        )
    }

    #[test]
    fn zero_spectrogram_gives_near_zero_waveform() {
        let c = SpectroConfig::default();
        let zeros = Array2::zeros((10, c.n_linear()));
        let fm = FeatureMatrix::new(zeros, FeatureKind::Linear, c);
        let w = griffin_lim(&fm, 5).unwrap();
        let peak = w.samples.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(peak < 1e-3, "peak {peak}");
    }

    #[test]
    fn zero_iterations_still_yields_overlap_add_length() {
        let c = SpectroConfig::default();
        let frames = 9;
        let zeros = Array2::zeros((frames, c.n_linear()));
        let fm = FeatureMatrix::new(zeros, FeatureKind::Linear, c.clone());
        let w = griffin_lim(&fm, 0).unwrap();
        assert_eq!(w.len(), (frames - 1) * c.hop_samples() + c.win_samples());
    }

    #[test]
    fn mel_input_is_rejected() {
        let c = SpectroConfig::default();
        let zeros = Array2::zeros((4, c.n_mels));
        let fm = FeatureMatrix::new(zeros, FeatureKind::Mel, c);
        assert!(matches!(griffin_lim(&fm, 1), Err(DspError::WrongKind { .. })));
    }

    #[test]
    fn sine_reconstruction_correlates_with_reference() {
        let c = SpectroConfig::default();
        let wave = sine_wave(440.0, 1.0, c.sample_rate);
        let (_, linear) = extract_features(&wave, &c).unwrap();
        let rec = griffin_lim(&linear, 60).unwrap();

        // compare against analytic sines over a lag grid: Griffin-Lim fixes
        // magnitude only, so the phase offset is arbitrary
        let sr = c.sample_rate as f64;
        let period = (sr / 440.0).ceil() as usize + 1;
        let inner = &rec.samples[c.win_samples()..rec.len() - c.win_samples()];
        let mut best = 0.0f64;
        for lag in 0..period {
            let reference: Vec<f64> = (0..inner.len())
                .map(|i| (2.0 * std::f64::consts::PI * 440.0 * (i + lag) as f64 / sr).sin())
                .collect();
            let dot: f64 = inner.iter().zip(&reference).map(|(a, b)| a * b).sum();
            let na: f64 = inner.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = reference.iter().map(|x| x * x).sum::<f64>().sqrt();
            best = best.max((dot / (na * nb)).abs());
        }
        assert!(best > 0.9, "best |correlation| {best}");
    }

    #[test]
    fn spectral_convergence_not_worse_at_final_iteration() {
        let c = SpectroConfig::default();
        let wave = sine_wave(523.25, 0.6, c.sample_rate);
        let (_, linear) = extract_features(&wave, &c).unwrap();
        let w1 = griffin_lim(&linear, 1).unwrap();
        let w60 = griffin_lim(&linear, 60).unwrap();
        let e1 = spectral_convergence(&w1, &linear);
        let e60 = spectral_convergence(&w60, &linear);
        assert!(e60 <= e1 + 1e-9, "e1={e1} e60={e60}");
    }
}
