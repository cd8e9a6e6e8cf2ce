use rand_distr::{Distribution, Gamma};

use super::NoiseConfig;
use crate::game::LegalActionMask;
use crate::seed::Rng;

/// Mixes Dirichlet noise into root priors over the legal actions:
/// `p' = (1 - weight) p + weight * Dir(alpha)`, renormalised.
///
/// Returns `priors` unchanged when noise is disabled or the weight is zero.
pub fn apply_root_noise(
    priors: &[f64],
    legal: &LegalActionMask,
    noise: &NoiseConfig,
    rng: &mut Rng,
) -> Vec<f64> {
    if !noise.enabled || noise.weight == 0.0 || legal.count() == 0 {
        return priors.to_vec();
    }
    let gamma = Gamma::new(noise.alpha, 1.0).expect("dirichlet alpha must be positive");
    let mut sample = vec![0.0; priors.len()];
    let mut total = 0.0;
    for a in legal.actions() {
        let g: f64 = gamma.sample(rng);
        sample[a.0] = g;
        total += g;
    }
    if total <= 0.0 {
        // every gamma draw underflowed (tiny alpha): fall back to uniform
        let k = legal.count() as f64;
        for a in legal.actions() {
            sample[a.0] = 1.0 / k;
        }
        total = 1.0;
    }

    let eps = noise.weight;
    let mut out: Vec<f64> = priors
        .iter()
        .zip(&sample)
        .zip(legal.bits())
        .map(|((&p, &d), &ok)| {
            if ok {
                (1.0 - eps) * p + eps * d / total
            } else {
                0.0
            }
        })
        .collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= sum);
    out
}
