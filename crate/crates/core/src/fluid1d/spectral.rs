//! Periodic derivative operators and the spectral Poisson inverse.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// How spatial derivatives are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DerivativeScheme {
    /// Fourier differentiation.
    #[default]
    Spectral,
    /// 6th-order central differences.
    FiniteDifference6,
}

/// Fourier machinery for a periodic grid of `n` points on `[0, length)`.
#[derive(Clone)]
pub(crate) struct SpectralOps {
    n: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Per-index mode retention for the smoothing projection.
    keep: Vec<bool>,
}

impl SpectralOps {
    pub fn new(n: usize, length: f64, dealias: bool, cutoff: Option<usize>) -> Self {
        let mut planner = FftPlanner::new();
        let keep = (0..n)
            .map(|j| {
                let m = mode_number(j, n).unsigned_abs() as usize;
                (!dealias || 3 * m <= n) && cutoff.is_none_or(|c| m <= c)
            })
            .collect();
        Self {
            n,
            length,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            keep,
        }
    }

    /// Largest retained mode number.
    pub fn max_mode(&self) -> usize {
        (0..self.n)
            .filter(|&j| self.keep[j] && 2 * j != self.n)
            .map(|j| mode_number(j, self.n).unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Whether the projection removes anything.
    pub fn filters(&self) -> bool {
        self.keep.iter().any(|k| !k)
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * std::f64::consts::PI * mode_number(j, self.n) as f64 / self.length
    }

    fn transform(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    fn back(&self, mut buf: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// First derivative restricted to the retained modes. The Nyquist mode
    /// is dropped so the operator stays real and antisymmetric.
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        let mut hat = self.transform(f);
        for (j, c) in hat.iter_mut().enumerate() {
            let nyquist = 2 * j == self.n;
            if nyquist || !self.keep[j] {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c *= Complex64::new(0.0, self.wavenumber(j));
            }
        }
        self.back(hat)
    }

    /// Projection onto the retained modes.
    pub fn project(&self, f: &[f64]) -> Vec<f64> {
        let mut hat = self.transform(f);
        for (j, c) in hat.iter_mut().enumerate() {
            if !self.keep[j] {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.back(hat)
    }

    /// Zero-mean solution of `φ'' = coef · s` for zero-mean `s`.
    pub fn inverse_laplacian(&self, s: &[f64], coef: f64) -> Vec<f64> {
        let mut hat = self.transform(s);
        hat[0] = Complex64::new(0.0, 0.0);
        for (j, c) in hat.iter_mut().enumerate().skip(1) {
            let k = self.wavenumber(j);
            *c *= -coef / (k * k);
        }
        self.back(hat)
    }
}

/// Signed mode number of FFT index `j`.
pub(crate) fn mode_number(j: usize, n: usize) -> i64 {
    if 2 * j <= n {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// 6th-order central first derivative on a periodic grid.
pub(crate) fn fd6_derivative(f: &[f64], dx: f64) -> Vec<f64> {
    const C: [f64; 3] = [45.0, -9.0, 1.0];
    let n = f.len();
    (0..n)
        .map(|i| {
            let mut acc = 0.0;
            for (s, c) in C.iter().enumerate() {
                let off = s + 1;
                acc += c * (f[(i + off) % n] - f[(i + n - off % n) % n]);
            }
            acc / (60.0 * dx)
        })
        .collect()
}
