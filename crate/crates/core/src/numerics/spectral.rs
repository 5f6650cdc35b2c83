use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Fourier differentiation on a uniform periodic grid.
pub(crate) struct Spectral {
    n: usize,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(n: usize, length: f64) -> Self {
        let mut planner = FftPlanner::new();
        let scale = 2.0 * PI / length;
        let wavenumbers = (0..n)
            .map(|j| {
                let j = j as i64;
                let signed = if j <= n as i64 / 2 { j } else { j - n as i64 };
                signed as f64 * scale
            })
            .collect();
        Spectral {
            n,
            wavenumbers,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn transform(&self, u: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = u.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform, keeping the real part.
    pub fn back(&self, hat: &[Complex64]) -> Vec<f64> {
        let mut buf = hat.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Multiplies by `(ik)^m`; the Nyquist mode is dropped for odd `m`.
    pub fn symbol_power(&self, hat: &[Complex64], m: u32) -> Vec<Complex64> {
        let nyquist = self.n / 2;
        hat.iter()
            .zip(&self.wavenumbers)
            .enumerate()
            .map(|(j, (c, &k))| {
                if m % 2 == 1 && j == nyquist {
                    return Complex64::new(0.0, 0.0);
                }
                c * Complex64::new(0.0, k).powu(m)
            })
            .collect()
    }

    pub fn derivative(&self, hat: &[Complex64], m: u32) -> Vec<f64> {
        if m == 0 {
            return self.back(hat);
        }
        self.back(&self.symbol_power(hat, m))
    }
}
