use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Dominant angular frequency of a uniformly sampled probe signal.
///
/// Upward mean-crossings are located to sub-sample accuracy on the cubic
/// through the four surrounding samples; the period is the average spacing
/// of those crossings, which is insensitive to a constant offset. With only
/// two crossings the peak of the Hann-windowed spectrum is refined by a
/// parabola through the neighbouring bins.
pub fn measure_frequency(series: &[f64], dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "sampling interval must be > 0"));
    }
    if series.len() < 8 {
        return Err(Error::invalid("series", "need at least 8 samples"));
    }
    if let Some(i) = series.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            field: "probe",
            node: i,
        });
    }
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let s: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let spread = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if spread <= 1e-14 * mean.abs() || spread == 0.0 {
        return Err(Error::NoOscillation);
    }

    let crossings: Vec<f64> = (0..s.len() - 1)
        .filter(|&i| s[i] < 0.0 && s[i + 1] >= 0.0)
        .map(|i| dt * refine_crossing(&s, i))
        .collect();
    match crossings.len() {
        0 | 1 => Err(Error::NoOscillation),
        2 => spectral_peak(&s, dt),
        c => Ok(2.0 * PI * (c - 1) as f64 / (crossings[c - 1] - crossings[0])),
    }
}

/// Fractional sample index of the zero between samples `i` and `i + 1`.
fn refine_crossing(s: &[f64], i: usize) -> f64 {
    let lo = i.saturating_sub(1).min(s.len().saturating_sub(4));
    let xs: Vec<f64> = (lo..lo + 4).map(|j| j as f64).collect();
    let ys = &s[lo..lo + 4];
    let cubic = |x: f64| -> f64 {
        (0..4)
            .map(|a| {
                let basis: f64 = (0..4)
                    .filter(|&b| b != a)
                    .map(|b| (x - xs[b]) / (xs[a] - xs[b]))
                    .product();
                ys[a] * basis
            })
            .sum()
    };
    let (mut a, mut b) = (i as f64, (i + 1) as f64);
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if cubic(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

fn spectral_peak(s: &[f64], dt: f64) -> Result<f64> {
    let n = s.len();
    let mut buf: Vec<Complex64> = s
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = 0.5 - 0.5 * (2.0 * PI * i as f64 / (n - 1) as f64).cos();
            Complex64::new(v * w, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mag: Vec<f64> = buf[..n / 2 + 1].iter().map(|c| c.norm()).collect();
    let (peak, _) = mag
        .iter()
        .enumerate()
        .skip(1)
        .fold((0, 0.0), |best, (i, &m)| if m > best.1 { (i, m) } else { best });
    if peak <= 1 || peak + 1 >= mag.len() {
        return Err(Error::NoOscillation);
    }
    let (a, b, c) = (mag[peak - 1], mag[peak], mag[peak + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom != 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    Ok(2.0 * PI * (peak as f64 + shift) / (n as f64 * dt))
}
