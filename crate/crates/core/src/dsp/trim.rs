//! Leading/trailing silence removal by windowed RMS thresholding.

use super::Waveform;
use crate::error::DspError;
use crate::scalar::Scalar;

/// Analysis window for the energy detector.
const TRIM_WINDOW_SECONDS: f64 = 0.030;

/// Remove leading and trailing windows whose RMS energy falls below
/// `threshold_db` relative to the loudest window. The kept span must cover at
/// least `min_voiced` seconds or the whole signal counts as silent.
pub fn trim_silence<T: Scalar>(
    w: &Waveform<T>,
    threshold_db: f64,
    min_voiced: f64,
) -> Result<Waveform<T>, DspError> {
    assert!(!w.is_empty(), "trim_silence: empty waveform");
    let win = ((TRIM_WINDOW_SECONDS * w.sample_rate as f64).round() as usize).max(1);
    let n_windows = w.len().div_ceil(win);

    let mut rms = Vec::with_capacity(n_windows);
    for i in 0..n_windows {
        let start = i * win;
        let end = (start + win).min(w.len());
        let mut acc = 0.0f64;
        for s in &w.samples[start..end] {
            let v = s.to_f64();
            acc += v * v;
        }
        rms.push((acc / (end - start) as f64).sqrt());
    }

    let peak = rms.iter().cloned().fold(0.0f64, f64::max);
    let gate = peak * 10f64.powf(threshold_db / 20.0);
    // strict inequality: an all-zero signal has peak 0 and no window passes
    let voiced: Vec<usize> = (0..n_windows).filter(|&i| rms[i] > gate && rms[i] > 0.0).collect();

    let (first, last) = match (voiced.first(), voiced.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(DspError::AllSilent),
    };

    let start = first * win;
    let end = ((last + 1) * win).min(w.len());
    if (end - start) as f64 / w.sample_rate as f64 + 1e-9 < min_voiced {
        return Err(DspError::AllSilent);
    }
    Ok(Waveform::new(w.samples[start..end].to_vec(), w.sample_rate))
}
