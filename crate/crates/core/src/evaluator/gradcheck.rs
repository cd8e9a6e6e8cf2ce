use super::{check_batch, loss_and_gradient, NetworkParams, TrainingExample};
use crate::error::Result;

/// Weights checked when the network is too large to check every one.
const MAX_CHECKED: usize = 10_000;

const ABSOLUTE_FLOOR: f64 = 1e-6;

/// Maximum relative error between the analytic gradient and central finite
/// differences `(l(w + e) - l(w - e)) / 2e`, both in `f64`.
///
/// Components smaller than 1e-6 in magnitude are compared absolutely, since
/// finite-difference roundoff alone is around 1e-10 at `epsilon = 1e-5`.
///
/// Networks with more than 10 000 weights are checked on an evenly strided
/// subset of 10 000 of them.
pub fn gradient_check(
    params: &NetworkParams,
    batch: &[&TrainingExample],
    c: f64,
    epsilon: f64,
) -> Result<f64> {
    check_batch(params, batch)?;
    let arch = &params.architecture;
    let mask = arch.bias_mask();
    let mut weights: Vec<f64> = params.weights.iter().map(|&w| f64::from(w)).collect();
    let mut analytic = vec![0.0; weights.len()];
    loss_and_gradient(arch, &weights, &mask, batch, c, Some(&mut analytic));

    let n = weights.len();
    let stride = n.div_ceil(MAX_CHECKED).max(1);
    let mut worst: f64 = 0.0;
    for i in (0..n).step_by(stride) {
        let original = weights[i];
        weights[i] = original + epsilon;
        let plus = loss_and_gradient(arch, &weights, &mask, batch, c, None);
        weights[i] = original - epsilon;
        let minus = loss_and_gradient(arch, &weights, &mask, batch, c, None);
        weights[i] = original;

        let numeric = (plus - minus) / (2.0 * epsilon);
        let diff = (analytic[i] - numeric).abs();
        let scale = analytic[i].abs().max(numeric.abs());
        let err = if scale < ABSOLUTE_FLOOR { diff } else { diff / scale };
        worst = worst.max(err);
    }
    Ok(worst)
}
