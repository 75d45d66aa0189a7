//! Band-limited resampling with a Hann-windowed sinc kernel.

use super::Waveform;
use crate::scalar::Scalar;

/// Half-width of the sinc kernel in output-side samples.
const BASE_HALF_WIDTH: f64 = 24.0;

pub fn resample<T: Scalar>(w: &Waveform<T>, target_rate: u32) -> Waveform<T> {
    assert!(target_rate > 0, "target rate must be positive");
    if target_rate == w.sample_rate {
        return w.clone();
    }
    let src = w.sample_rate as f64;
    let dst = target_rate as f64;
    let ratio = dst / src;
    let out_len = ((w.len() as f64) * ratio).round() as usize;
    // anti-aliasing cutoff at the narrower of the two Nyquist bands
    let fc = 0.5 * ratio.min(1.0);
    // stretch the kernel when downsampling so it stays band-limited
    let half_width = BASE_HALF_WIDTH / ratio.min(1.0);

    let mut out = Vec::with_capacity(out_len);
    for i in 0..out_len {
        let center = i as f64 / ratio;
        let lo = ((center - half_width).ceil() as isize).max(0) as usize;
        let hi = ((center + half_width).floor() as isize).min(w.len() as isize - 1);
        let mut acc = 0.0f64;
        let mut norm = 0.0f64;
        if hi >= 0 {
            for j in lo..=hi as usize {
                let t = j as f64 - center;
                let k = sinc(2.0 * fc * t) * hann_taper(t / half_width);
                acc += w.samples[j].to_f64() * k;
                norm += k;
            }
        }
        // normalizing by the kernel sum preserves DC exactly, edges included
        out.push(T::from_f64(if norm.abs() > 1e-12 { acc / norm } else { 0.0 }));
    }
    Waveform::new(out, target_rate)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

fn hann_taper(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * u).cos())
    }
}
