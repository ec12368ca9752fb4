//! Spectral window features from the one-sided power spectrum of the
//! mean-removed window, `P[k] = |X[k]|² / L` for `k = 0..=L/2`.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::stats::{mean, variance, CONSTANT_VARIANCE};

/// Floor added before taking the log spectrum for cepstral coefficients.
pub const LOG_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpectralFeatures {
    pub max_frequency: f64,
    pub median_frequency: f64,
    pub cepstral: Vec<f64>,
    pub max_power: f64,
    pub power_bandwidth: f64,
    pub fundamental_frequency: f64,
}

/// Forward and inverse FFT plans for one window length.
#[derive(Clone)]
pub struct SpectralAnalyzer {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralAnalyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralAnalyzer").field("len", &self.len).finish()
    }
}

impl SpectralAnalyzer {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Two-sided power `|X[k]|² / L` for `k = 0..L` of the mean-removed sequence.
    pub fn two_sided_power(&self, seq: &[f64]) -> Vec<f64> {
        assert_eq!(seq.len(), self.len, "sequence length differs from plan");
        let m = mean(seq);
        let mut buf: Vec<Complex<f64>> = seq.iter().map(|v| Complex::new(v - m, 0.0)).collect();
        self.forward.process(&mut buf);
        let l = self.len as f64;
        buf.iter().map(|c| c.norm_sqr() / l).collect()
    }

    /// One-sided power for `k = 0..=L/2`.
    pub fn power_spectrum(&self, seq: &[f64]) -> Vec<f64> {
        let mut p = self.two_sided_power(seq);
        p.truncate(self.len / 2 + 1);
        p
    }

    /// First `count` real cepstral coefficients: inverse DFT of the log
    /// two-sided power spectrum.
    fn cepstrum(&self, two_sided: &[f64], count: usize) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = two_sided
            .iter()
            .map(|p| Complex::new((p + LOG_FLOOR).ln(), 0.0))
            .collect();
        self.inverse.process(&mut buf);
        let l = self.len as f64;
        buf.iter().take(count).map(|c| c.re / l).collect()
    }

    pub fn features(&self, seq: &[f64], fs: f64, n_cepstral: usize) -> SpectralFeatures {
        if variance(seq) < CONSTANT_VARIANCE {
            return SpectralFeatures {
                cepstral: vec![0.0; n_cepstral],
                ..Default::default()
            };
        }
        let two_sided = self.two_sided_power(seq);
        let half = &two_sided[..self.len / 2 + 1];
        let bin_hz = fs / self.len as f64;

        let total: f64 = half.iter().sum();
        let mut cum = Vec::with_capacity(half.len());
        let mut acc = 0.0;
        for p in half {
            acc += p;
            cum.push(acc);
        }
        let crossing = |frac: f64| {
            let target = frac * total;
            cum.iter().position(|&c| c >= target).unwrap_or(half.len() - 1) as f64 * bin_hz
        };

        let max_power = half.iter().copied().fold(0.0, f64::max);
        // first maximum among k >= 1
        let mut fund_k = 1;
        for k in 2..half.len() {
            if half[k] > half[fund_k] {
                fund_k = k;
            }
        }

        SpectralFeatures {
            max_frequency: crossing(0.95),
            median_frequency: crossing(0.5),
            cepstral: self.cepstrum(&two_sided, n_cepstral),
            max_power,
            power_bandwidth: crossing(0.975) - crossing(0.025),
            fundamental_frequency: fund_k as f64 * bin_hz,
        }
    }
}

/// Convenience wrapper planning a fresh FFT for `seq.len()`.
pub fn spectral_features(seq: &[f64], fs: f64, n_cepstral: usize) -> SpectralFeatures {
    SpectralAnalyzer::new(seq.len()).features(seq, fs, n_cepstral)
}
