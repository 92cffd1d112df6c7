//! Finite-difference gradient verification.

use rand::seq::SliceRandom;

use crate::rng::RandomStream;

/// Compares `analytic` against central differences of `loss_fn` on a random
/// subset of parameters (5% by default, at least 30) and returns the maximum
/// relative error.
///
/// Relative error uses a small denominator floor so near-zero coordinates
/// are compared on an absolute scale commensurate with the losses involved.
pub fn grad_check<F>(
    mut loss_fn: F,
    params: &[f64],
    analytic: &[f64],
    step: f64,
    subset_frac: f64,
    rng: &mut RandomStream,
) -> f64
where
    F: FnMut(&[f64]) -> f64,
{
    assert_eq!(params.len(), analytic.len(), "gradient length mismatch");
    let n = params.len();
    let take = ((n as f64 * subset_frac).ceil() as usize).clamp(30.min(n), n);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.truncate(take);

    let mut probe = params.to_vec();
    let mut max_rel: f64 = 0.0;
    for &i in &idx {
        let orig = probe[i];
        probe[i] = orig + step;
        let lp = loss_fn(&probe);
        probe[i] = orig - step;
        let lm = loss_fn(&probe);
        probe[i] = orig;
        let numeric = (lp - lm) / (2.0 * step);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-3);
        max_rel = max_rel.max((analytic[i] - numeric).abs() / denom);
    }
    max_rel
}
