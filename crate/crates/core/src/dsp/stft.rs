//! Short-time Fourier transform, without center padding: frame count is
//! `1 + floor((N - win) / hop)`.

use super::{SpectroConfig, Waveform};
use crate::error::DspError;
use crate::scalar::Scalar;
use ndarray::Array2;
use rustfft::num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

/// Periodic Hann window of length `n`.
pub fn hann_window<T: Scalar>(n: usize) -> Vec<T> {
    (0..n)
        .map(|i| {
            let x = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            T::from_f64(0.5 * (1.0 - x.cos()))
        })
        .collect()
}

pub fn frame_count(n_samples: usize, win: usize, hop: usize) -> Option<usize> {
    if n_samples < win {
        None
    } else {
        Some(1 + (n_samples - win) / hop)
    }
}

/// Complex STFT, T x (nfft/2+1).
pub fn stft_complex<T: Scalar + FftNum>(
    w: &Waveform<T>,
    c: &SpectroConfig,
) -> Result<Array2<Complex<T>>, DspError> {
    let win = c.win_samples();
    let hop = c.hop_samples();
    let n = w.len();
    let frames = frame_count(n, win, hop).ok_or(DspError::TooShort { got: n, need: win })?;
    let bins = c.n_linear();
    let window = hann_window::<T>(win);

    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft_forward(c.nfft);
    let mut out = Array2::zeros((frames, bins));
    let mut buf = vec![Complex::new(T::zero(), T::zero()); c.nfft];
    for t in 0..frames {
        let start = t * hop;
        for i in 0..c.nfft {
            buf[i] = if i < win {
                Complex::new(w.samples[start + i] * window[i], T::zero())
            } else {
                Complex::new(T::zero(), T::zero())
            };
        }
        fft.process(&mut buf);
        for (b, v) in buf.iter().take(bins).enumerate() {
            out[(t, b)] = *v;
        }
    }
    Ok(out)
}

/// Magnitude spectrogram, T x (nfft/2+1).
pub fn stft_magnitude<T: Scalar + FftNum>(
    w: &Waveform<T>,
    c: &SpectroConfig,
) -> Result<Array2<T>, DspError> {
    Ok(stft_complex(w, c)?.mapv(|z| z.norm()))
}

/// Inverse STFT by windowed overlap-add with squared-window normalization.
/// Output length is `(T-1)*hop + win`.
pub fn istft<T: Scalar + FftNum>(spec: &Array2<Complex<T>>, c: &SpectroConfig) -> Waveform<T> {
    let win = c.win_samples();
    let hop = c.hop_samples();
    let frames = spec.nrows();
    let bins = c.n_linear();
    assert_eq!(spec.ncols(), bins, "spectrogram bin count mismatch");
    let window = hann_window::<T>(win);
    let out_len = if frames == 0 { 0 } else { (frames - 1) * hop + win };

    let mut planner = FftPlanner::<T>::new();
    let ifft = planner.plan_fft_inverse(c.nfft);
    let mut out = vec![T::zero(); out_len];
    let mut norm = vec![T::zero(); out_len];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); c.nfft];
    let nfft_t = T::from_usize(c.nfft);

    for t in 0..frames {
        // rebuild the full Hermitian spectrum from the half-plane
        for b in 0..bins {
            buf[b] = spec[(t, b)];
        }
        for b in bins..c.nfft {
            buf[b] = spec[(t, c.nfft - b)].conj();
        }
        ifft.process(&mut buf);
        let start = t * hop;
        for i in 0..win {
            let sample = buf[i].re / nfft_t;
            out[start + i] = out[start + i] + sample * window[i];
            norm[start + i] = norm[start + i] + window[i] * window[i];
        }
    }
    let floor = T::from_f64(1e-9);
    for (o, n) in out.iter_mut().zip(norm.iter()) {
        *o = *o / n.max(floor);
    }
    Waveform::new(out, c.sample_rate)
}
