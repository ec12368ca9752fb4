use serde::{Deserialize, Serialize};

use super::NaiveBayesParams;

/// Gaussian naive Bayes with per-class, per-feature means and variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub variances: Vec<Vec<f64>>,
}

impl GaussianNb {
    /// `x` rows are assumed normalized; `y` holds class indices below `n_classes`.
    pub fn fit(
        x: &[Vec<f64>],
        y: &[usize],
        n_classes: usize,
        params: &NaiveBayesParams,
        balanced_priors: bool,
    ) -> Self {
        let d = x[0].len();
        let n = x.len() as f64;

        // smoothing scales with the widest column
        let mut col_mean = vec![0.0; d];
        for row in x {
            for (m, v) in col_mean.iter_mut().zip(row) {
                *m += v / n;
            }
        }
        let mut max_var: f64 = 0.0;
        for j in 0..d {
            let v = x.iter().map(|r| (r[j] - col_mean[j]).powi(2)).sum::<f64>() / n;
            max_var = max_var.max(v);
        }
        let mut eps = params.var_smoothing * max_var;
        if eps <= 0.0 {
            eps = params.var_smoothing.max(f64::MIN_POSITIVE);
        }

        let mut counts = vec![0usize; n_classes];
        let mut means = vec![vec![0.0; d]; n_classes];
        for (row, &c) in x.iter().zip(y) {
            counts[c] += 1;
            for (m, v) in means[c].iter_mut().zip(row) {
                *m += v;
            }
        }
        for (m, &cnt) in means.iter_mut().zip(&counts) {
            m.iter_mut().for_each(|v| *v /= cnt.max(1) as f64);
        }
        let mut variances = vec![vec![0.0; d]; n_classes];
        for (row, &c) in x.iter().zip(y) {
            for ((s, v), m) in variances[c].iter_mut().zip(row).zip(&means[c]) {
                *s += (v - m) * (v - m);
            }
        }
        for (var, &cnt) in variances.iter_mut().zip(&counts) {
            var.iter_mut().for_each(|v| *v = *v / cnt.max(1) as f64 + eps);
        }
        let priors = if balanced_priors {
            vec![1.0 / n_classes as f64; n_classes]
        } else {
            counts.iter().map(|&c| c as f64 / n).collect()
        };
        Self {
            priors,
            means,
            variances,
        }
    }

    pub fn joint_log_likelihood(&self, x: &[f64]) -> Vec<f64> {
        let ln_2pi = (2.0 * std::f64::consts::PI).ln();
        self.priors
            .iter()
            .zip(self.means.iter().zip(&self.variances))
            .map(|(&prior, (mu, var))| {
                let ll: f64 = x
                    .iter()
                    .zip(mu.iter().zip(var))
                    .map(|(v, (m, s))| -0.5 * (ln_2pi + s.ln() + (v - m) * (v - m) / s))
                    .sum();
                prior.ln() + ll
            })
            .collect()
    }

    /// Class posteriors via log-sum-exp.
    pub fn posteriors(&self, x: &[f64]) -> Vec<f64> {
        let jll = self.joint_log_likelihood(x);
        let max = jll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = jll.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = exps.iter().sum();
        exps.into_iter().map(|e| e / z).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_one_dimensional_posterior() {
        let nb = GaussianNb {
            priors: vec![0.5, 0.5],
            means: vec![vec![-1.0], vec![1.0]],
            variances: vec![vec![1.0], vec![1.0]],
        };
        let p = nb.posteriors(&[1.0]);
        // likelihood ratio e^{(0 - (-2))}: 1 / (1 + e^-2)
        let expected = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((p[1] - expected).abs() < 1e-15);
        assert!((p[1] - 0.8808).abs() < 1e-4);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fit_recovers_class_statistics() {
        let x = vec![vec![0.0], vec![2.0], vec![10.0], vec![12.0]];
        let nb = GaussianNb::fit(&x, &[0, 0, 1, 1], 2, &NaiveBayesParams::default(), false);
        assert_eq!(nb.means, vec![vec![1.0], vec![11.0]]);
        // class variance 1 plus 1e-9 of the column variance 26
        assert!((nb.variances[0][0] - (1.0 + 26e-9)).abs() < 1e-15);
        assert_eq!(nb.priors, vec![0.5, 0.5]);
    }

    #[test]
    fn balanced_priors_ignore_frequencies() {
        let x = vec![vec![0.0], vec![0.1], vec![0.2], vec![5.0]];
        let nb = GaussianNb::fit(&x, &[0, 0, 0, 1], 2, &NaiveBayesParams::default(), true);
        assert_eq!(nb.priors, vec![0.5, 0.5]);
    }
}
