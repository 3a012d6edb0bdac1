//! Spectral analysis of sampled time series.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Angular frequency of the strongest oscillation in `samples` taken every
/// `dt`. The mean is removed, a Hann window applied and the series padded
/// 16-fold; the peak bin is refined by parabolic interpolation.
pub fn dominant_angular_frequency(samples: &[f64], dt: f64) -> Option<f64> {
    let n = samples.len();
    if n < 8 || dt.is_nan() || dt <= 0.0 {
        return None;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let m = n.next_power_of_two() * 16;
    let mut buf = vec![Complex::new(0.0, 0.0); m];
    for (i, (b, s)) in buf.iter_mut().zip(samples).enumerate() {
        let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
        *b = Complex::new((s - mean) * w, 0.0);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let mag: Vec<f64> = buf[..m / 2].iter().map(|c| c.norm()).collect();
    let (peak, &top) = mag.iter().enumerate().skip(1).max_by(|a, b| a.1.total_cmp(b.1))?;
    if top == 0.0 || peak + 1 >= mag.len() {
        return None;
    }
    let (a, b, c) = (mag[peak - 1], top, mag[peak + 1]);
    let curvature = a - 2.0 * b + c;
    let shift = if curvature != 0.0 { 0.5 * (a - c) / curvature } else { 0.0 };
    Some(2.0 * PI * (peak as f64 + shift) / (m as f64 * dt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_pure_tone() {
        let dt = 0.01;
        let samples: Vec<f64> = (0..4001).map(|i| 0.3 + (3.4641 * i as f64 * dt).sin().powi(2)).collect();
        // sin^2(w t) oscillates at 2w.
        let w = dominant_angular_frequency(&samples, dt).unwrap();
        assert!((w - 2.0 * 3.4641).abs() < 1e-3 * w, "{w}");
    }

    #[test]
    fn rejects_degenerate_input() {
        assert_eq!(dominant_angular_frequency(&[1.0; 4], 0.1), None);
        assert_eq!(dominant_angular_frequency(&[1.0; 64], 0.1), None);
        assert_eq!(dominant_angular_frequency(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0], 0.0), None);
    }
}
