//! Diagonal Gaussian action-chunk distribution.

use rand_distr::{Distribution, StandardNormal};

use crate::rng::RandomStream;
use crate::types::{Action, ACTION_DIM};

const LN_2PI: f64 = 1.8378770664093453;

/// A diagonal Gaussian over a flattened action chunk of length `3 * h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl ActionDistribution {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    /// Raw (pre-clamp) sample `mean + std .* eps`.
    pub fn sample(&self, rng: &mut RandomStream) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.std)
            .map(|(&m, &s)| m + s * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect()
    }

    /// Log density of a raw chunk under the distribution.
    pub fn log_prob(&self, raw: &[f64]) -> f64 {
        assert_eq!(raw.len(), self.dim(), "chunk length mismatch");
        let mut lp = 0.0;
        for ((&x, &m), &s) in raw.iter().zip(&self.mean).zip(&self.std) {
            let z = (x - m) / s;
            lp += -0.5 * z * z - s.ln() - 0.5 * LN_2PI;
        }
        lp
    }

    /// Differential entropy (independent of the mean).
    pub fn entropy(&self) -> f64 {
        self.std
            .iter()
            .map(|s| s.ln() + 0.5 * (LN_2PI + 1.0))
            .sum()
    }

    /// Gradient of `log_prob(raw)` with respect to the mean and the log std.
    pub fn log_prob_grads(&self, raw: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut d_mean = vec![0.0; self.dim()];
        let mut d_log_std = vec![0.0; self.dim()];
        for j in 0..self.dim() {
            let z = (raw[j] - self.mean[j]) / self.std[j];
            d_mean[j] = z / self.std[j];
            d_log_std[j] = z * z - 1.0;
        }
        (d_mean, d_log_std)
    }
}

/// Splits a raw chunk into per-step actions (clamped at execution time by
/// the environment).
pub fn chunk_to_actions(raw: &[f64]) -> Vec<Action> {
    assert!(raw.len() % ACTION_DIM == 0, "chunk length must be 3*h");
    raw.chunks_exact(ACTION_DIM)
        .map(|c| Action::new(c[0], c[1], c[2]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn log_prob_at_mode() {
        let d = ActionDistribution {
            mean: vec![0.1, -0.2, 0.3],
            std: vec![0.5, 0.25, 1.0],
        };
        let lp = d.log_prob(&d.mean.clone());
        let expect: f64 = d
            .std
            .iter()
            .map(|s| -(s * (2.0 * std::f64::consts::PI).sqrt()).ln())
            .sum();
        assert!((lp - expect).abs() < 1e-12);
    }

    #[test]
    fn zero_std_limit_sample_is_mean() {
        let d = ActionDistribution {
            mean: vec![0.02, -0.03, 0.9],
            std: vec![0.0, 0.0, 0.0],
        };
        let mut rng = substream(0, "gauss", 0);
        assert_eq!(d.sample(&mut rng), d.mean);
    }

    #[test]
    fn same_rng_state_same_sample() {
        let d = ActionDistribution {
            mean: vec![0.0; 6],
            std: vec![0.1; 6],
        };
        let mut a = substream(1, "gauss", 0);
        let mut b = substream(1, "gauss", 0);
        assert_eq!(d.sample(&mut a), d.sample(&mut b));
    }

    #[test]
    fn log_prob_grads_match_finite_differences() {
        let mut d = ActionDistribution {
            mean: vec![0.05, -0.1],
            std: vec![0.3, 0.7],
        };
        let raw = [0.2, -0.4];
        let (dm, dls) = d.log_prob_grads(&raw);
        let eps = 1e-6;
        for j in 0..2 {
            let orig = d.mean[j];
            d.mean[j] = orig + eps;
            let lp = d.log_prob(&raw);
            d.mean[j] = orig - eps;
            let lm = d.log_prob(&raw);
            d.mean[j] = orig;
            assert!(((lp - lm) / (2.0 * eps) - dm[j]).abs() < 1e-8);

            let s = d.std[j];
            d.std[j] = (s.ln() + eps).exp();
            let lp = d.log_prob(&raw);
            d.std[j] = (s.ln() - eps).exp();
            let lm = d.log_prob(&raw);
            d.std[j] = s;
            assert!(((lp - lm) / (2.0 * eps) - dls[j]).abs() < 1e-6);
        }
    }

    #[test]
    fn monte_carlo_density_integrates_to_one() {
        // 1-D marginal: E_q[p(x)/q(x)] with q = the same Gaussian must be 1
        // within 3 sigma over 1e5 samples.
        let d = ActionDistribution {
            mean: vec![0.0],
            std: vec![0.4],
        };
        let mut rng = substream(2, "gauss-mc", 0);
        let n = 100_000;
        // Importance-sample the density over a wide uniform proposal.
        let (lo, hi) = (-3.0, 3.0);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let x = lo + (hi - lo) * rand::Rng::gen::<f64>(&mut rng);
            let p = d.log_prob(&[x]).exp() * (hi - lo);
            sum += p;
            sum_sq += p * p;
        }
        let mean = sum / n as f64;
        let var = (sum_sq / n as f64 - mean * mean).max(0.0);
        let sigma = (var / n as f64).sqrt();
        assert!(
            (mean - 1.0).abs() <= 3.0 * sigma,
            "integral {mean} not within 3 sigma ({sigma}) of 1"
        );
    }
}
