//! Temporal window features.

use super::stats::{mean, CONSTANT_VARIANCE};

/// Sign changes of the mean-centred sequence. A value exactly at the mean
/// keeps the previous sign; leading values at the mean carry no sign.
pub fn zero_crossings(seq: &[f64]) -> usize {
    let m = mean(seq);
    let mut prev: Option<bool> = None;
    let mut count = 0;
    for v in seq {
        let d = v - m;
        if d == 0.0 {
            continue;
        }
        let pos = d > 0.0;
        if prev.is_some_and(|p| p != pos) {
            count += 1;
        }
        prev = Some(pos);
    }
    count
}

/// Pearson correlation; zero when either input is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa / n < CONSTANT_VARIANCE || sbb / n < CONSTANT_VARIANCE {
        return 0.0;
    }
    (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0)
}

/// Lag-1 autocorrelation as the Pearson correlation of `seq[..n-1]` with `seq[1..]`.
pub fn autocorr_lag1(seq: &[f64]) -> f64 {
    if seq.len() < 3 {
        return 0.0;
    }
    pearson(&seq[..seq.len() - 1], &seq[1..])
}
