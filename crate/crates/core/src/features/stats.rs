//! Statistical window features. All moments use the population divisor `n`.

/// Variance below which a channel counts as constant.
pub const CONSTANT_VARIANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StatFeatures {
    pub kurtosis: f64,
    pub skewness: f64,
    pub mean: f64,
    pub std: f64,
    pub interquartile_range: f64,
    pub rms: f64,
    pub median_absolute_deviation: f64,
}

impl StatFeatures {
    pub const NAMES: [&'static str; 7] = [
        "kurtosis",
        "skewness",
        "mean",
        "std",
        "interquartile_range",
        "rms",
        "median_absolute_deviation",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.kurtosis,
            self.skewness,
            self.mean,
            self.std,
            self.interquartile_range,
            self.rms,
            self.median_absolute_deviation,
        ]
    }
}

pub fn mean(seq: &[f64]) -> f64 {
    seq.iter().sum::<f64>() / seq.len() as f64
}

/// Population variance.
pub fn variance(seq: &[f64]) -> f64 {
    let m = mean(seq);
    seq.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / seq.len() as f64
}

fn sorted(seq: &[f64]) -> Vec<f64> {
    let mut s = seq.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

fn median_sorted(s: &[f64]) -> f64 {
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn median(seq: &[f64]) -> f64 {
    median_sorted(&sorted(seq))
}

/// Exclusive-method quantile: linear interpolation at 1-based rank
/// `p * (n + 1)`, clamped to the first and last order statistics.
pub fn quantile_exclusive(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (p * (n + 1) as f64).clamp(1.0, n as f64);
    let lo = h.floor();
    let i = lo as usize - 1;
    if i + 1 >= n {
        return sorted[n - 1];
    }
    sorted[i] + (h - lo) * (sorted[i + 1] - sorted[i])
}

pub fn stat_features(seq: &[f64]) -> StatFeatures {
    let n = seq.len() as f64;
    let m = mean(seq);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in seq {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let (kurtosis, skewness) = if m2 < CONSTANT_VARIANCE {
        (0.0, 0.0)
    } else {
        (m4 / (m2 * m2) - 3.0, m3 / m2.powf(1.5))
    };
    let s = sorted(seq);
    let med = median_sorted(&s);
    let abs_dev: Vec<f64> = seq.iter().map(|v| (v - med).abs()).collect();
    StatFeatures {
        kurtosis,
        skewness,
        mean: m,
        std: m2.sqrt(),
        interquartile_range: quantile_exclusive(&s, 0.75) - quantile_exclusive(&s, 0.25),
        rms: (seq.iter().map(|v| v * v).sum::<f64>() / n).sqrt(),
        median_absolute_deviation: median(&abs_dev),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_series() {
        let f = stat_features(&[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(
            f,
            StatFeatures {
                kurtosis: 0.0,
                skewness: 0.0,
                mean: 1.0,
                std: 0.0,
                interquartile_range: 0.0,
                rms: 1.0,
                median_absolute_deviation: 0.0,
            }
        );
    }

    #[test]
    fn one_to_four() {
        // m2 = 1.25, m4 = 2.5625, 2.5625 / 1.5625 - 3 = -1.36
        let f = stat_features(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(f.mean, 2.5);
        assert!((f.kurtosis + 1.36).abs() < 1e-12);
        assert!(f.skewness.abs() < 1e-12);
        assert!((f.std - 1.25f64.sqrt()).abs() < 1e-12);
        // ranks 1.25 and 3.75
        assert!((f.interquartile_range - 2.5).abs() < 1e-12);
        // |v - 2.5| = 1.5, 0.5, 0.5, 1.5
        assert_eq!(f.median_absolute_deviation, 1.0);
    }

    #[test]
    fn rms_pair() {
        assert!((stat_features(&[3.0, 4.0]).rms - 3.5355339).abs() < 1e-7);
    }

    #[test]
    fn skewed_series_sign() {
        assert!(stat_features(&[0.0, 0.0, 0.0, 0.0, 10.0]).skewness > 0.0);
        assert!(stat_features(&[0.0, 10.0, 10.0, 10.0, 10.0]).skewness < 0.0);
    }

    #[test]
    fn quantile_clamps_at_ends() {
        let s = [1.0, 2.0];
        assert_eq!(quantile_exclusive(&s, 0.25), 1.0);
        assert_eq!(quantile_exclusive(&s, 0.75), 2.0);
        assert_eq!(quantile_exclusive(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0], 0.25), 2.0);
    }
}
