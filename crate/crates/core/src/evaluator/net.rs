//! Forward and backward passes, generic over the float type so the same code
//! trains in `f32` and is gradient-checked in `f64`.

use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::Float;

use super::arch::{Architecture, Layer, Layout};

pub trait Scalar:
    Float + AddAssign + SubAssign + MulAssign + Send + Sync + std::fmt::Debug + 'static
{
    fn of(x: f64) -> Self {
        Self::from(x).expect("representable constant")
    }
}

impl<T> Scalar for T where
    T: Float + AddAssign + SubAssign + MulAssign + Send + Sync + std::fmt::Debug + 'static
{
}

/// Cross-entropy log guard.
pub const LOG_EPSILON: f64 = 1e-10;

/// Scratch buffers for one example. Reused across a batch.
pub(crate) struct Trace<T> {
    input: Vec<T>,
    cols: Vec<Vec<T>>,
    outs: Vec<Vec<T>>,
    pub logits: Vec<T>,
    pub value_pre: T,
    // backward scratch
    grad_out: Vec<Vec<T>>,
    dcol: Vec<T>,
}

impl<T: Scalar> Trace<T> {
    pub fn new(arch: &Architecture, layout: &Layout) -> Self {
        let cells = arch.size * arch.size;
        let cols = arch
            .layers
            .iter()
            .zip(&layout.hidden)
            .map(|(layer, block)| match layer {
                Layer::Conv { .. } => vec![T::zero(); block.fan_in * cells],
                Layer::Dense { .. } => Vec::new(),
            })
            .collect();
        let max_col = layout
            .hidden
            .iter()
            .zip(&arch.layers)
            .filter(|(_, l)| matches!(l, Layer::Conv { .. }))
            .map(|(b, _)| b.fan_in * cells)
            .max()
            .unwrap_or(0);
        Trace {
            input: vec![T::zero(); arch.input_len()],
            cols,
            outs: layout.widths.iter().map(|&w| vec![T::zero(); w]).collect(),
            logits: vec![T::zero(); arch.actions],
            value_pre: T::zero(),
            grad_out: layout.widths.iter().map(|&w| vec![T::zero(); w]).collect(),
            dcol: vec![T::zero(); max_col],
        }
    }

    fn features(&self) -> &[T] {
        self.outs.last().unwrap_or(&self.input)
    }
}

fn im2col<T: Scalar>(input: &[T], channels: usize, n: usize, col: &mut [T]) {
    let p = n * n;
    for ic in 0..channels {
        let src = &input[ic * p..(ic + 1) * p];
        for ky in 0..3 {
            for kx in 0..3 {
                let row = &mut col[(ic * 9 + ky * 3 + kx) * p..][..p];
                for y in 0..n {
                    let sy = y + ky;
                    for x in 0..n {
                        let sx = x + kx;
                        row[y * n + x] = if sy >= 1 && sy <= n && sx >= 1 && sx <= n {
                            src[(sy - 1) * n + (sx - 1)]
                        } else {
                            T::zero()
                        };
                    }
                }
            }
        }
    }
}

fn col2im_add<T: Scalar>(col: &[T], channels: usize, n: usize, out: &mut [T]) {
    let p = n * n;
    for ic in 0..channels {
        let dst = &mut out[ic * p..(ic + 1) * p];
        for ky in 0..3 {
            for kx in 0..3 {
                let row = &col[(ic * 9 + ky * 3 + kx) * p..][..p];
                for y in 0..n {
                    let sy = y + ky;
                    if sy < 1 || sy > n {
                        continue;
                    }
                    for x in 0..n {
                        let sx = x + kx;
                        if sx >= 1 && sx <= n {
                            dst[(sy - 1) * n + (sx - 1)] += row[y * n + x];
                        }
                    }
                }
            }
        }
    }
}

#[inline]
fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[inline]
fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Runs the network on `input`, filling `trace` with every intermediate
/// needed by [`backward`].
pub(crate) fn forward<T: Scalar>(
    arch: &Architecture,
    layout: &Layout,
    w: &[T],
    input: &[T],
    trace: &mut Trace<T>,
) {
    let n = arch.size;
    let cells = n * n;
    trace.input.copy_from_slice(input);
    let mut channels = arch.planes;

    for (l, (layer, block)) in arch.layers.iter().zip(&layout.hidden).enumerate() {
        let (before, after) = trace.outs.split_at_mut(l);
        let x: &[T] = if l == 0 { &trace.input } else { &before[l - 1] };
        let out = &mut after[0];
        match *layer {
            Layer::Conv { filters } => {
                let col = &mut trace.cols[l];
                im2col(x, channels, n, col);
                let k = block.fan_in;
                for oc in 0..filters {
                    let row = &mut out[oc * cells..(oc + 1) * cells];
                    row.fill(w[block.bias + oc]);
                    let wrow = &w[block.weights + oc * k..][..k];
                    for (kk, &wk) in wrow.iter().enumerate() {
                        axpy(wk, &col[kk * cells..(kk + 1) * cells], row);
                    }
                }
                if arch.residual && channels == filters {
                    for (o, &xi) in out.iter_mut().zip(x) {
                        *o += xi;
                    }
                }
                channels = filters;
            }
            Layer::Dense { units } => {
                let k = block.fan_in;
                for j in 0..units {
                    out[j] = w[block.bias + j] + dot(&w[block.weights + j * k..][..k], x);
                }
            }
        }
        for o in out.iter_mut() {
            if *o < T::zero() {
                *o = T::zero();
            }
        }
    }

    let k = layout.policy.fan_in;
    let mut logits = std::mem::take(&mut trace.logits);
    let f = trace.features();
    for (a, logit) in logits.iter_mut().enumerate() {
        *logit = w[layout.policy.bias + a] + dot(&w[layout.policy.weights + a * k..][..k], f);
    }
    let value_pre = w[layout.value.bias] + dot(&w[layout.value.weights..][..k], f);
    trace.value_pre = value_pre;
    trace.logits = logits;
}

/// Accumulates parameter gradients into `grad` given the loss gradient with
/// respect to the policy logits and the pre-tanh value.
pub(crate) fn backward<T: Scalar>(
    arch: &Architecture,
    layout: &Layout,
    w: &[T],
    trace: &mut Trace<T>,
    dlogits: &[T],
    dvalue_pre: T,
    grad: &mut [T],
) {
    let n = arch.size;
    let cells = n * n;
    let depth = arch.layers.len();
    let k = layout.policy.fan_in;

    // heads
    {
        let f = trace.features();
        for (a, &d) in dlogits.iter().enumerate() {
            grad[layout.policy.bias + a] += d;
            axpy(d, f, &mut grad[layout.policy.weights + a * k..][..k]);
        }
        grad[layout.value.bias] += dvalue_pre;
        axpy(dvalue_pre, f, &mut grad[layout.value.weights..][..k]);
    }
    if depth == 0 {
        return;
    }
    {
        let df = &mut trace.grad_out[depth - 1];
        df.fill(T::zero());
        for (a, &d) in dlogits.iter().enumerate() {
            axpy(d, &w[layout.policy.weights + a * k..][..k], df);
        }
        axpy(dvalue_pre, &w[layout.value.weights..][..k], df);
    }

    let channels_in = |l: usize| -> usize {
        if l == 0 {
            arch.planes
        } else {
            match arch.layers[l - 1] {
                Layer::Conv { filters } => filters,
                Layer::Dense { .. } => 0,
            }
        }
    };

    for l in (0..depth).rev() {
        let block = layout.hidden[l];
        let (grads_before, grads_rest) = trace.grad_out.split_at_mut(l);
        let dout = &mut grads_rest[0];
        // through the ReLU
        for (d, &o) in dout.iter_mut().zip(&trace.outs[l]) {
            if o <= T::zero() {
                *d = T::zero();
            }
        }
        let x: &[T] = if l == 0 { &trace.input } else { &trace.outs[l - 1] };
        let need_dx = l > 0;
        match arch.layers[l] {
            Layer::Conv { filters } => {
                let kk = block.fan_in;
                let col = &trace.cols[l];
                for oc in 0..filters {
                    let d = &dout[oc * cells..(oc + 1) * cells];
                    let mut bsum = T::zero();
                    for &v in d {
                        bsum += v;
                    }
                    grad[block.bias + oc] += bsum;
                    let grow = &mut grad[block.weights + oc * kk..][..kk];
                    for (j, g) in grow.iter_mut().enumerate() {
                        *g += dot(d, &col[j * cells..(j + 1) * cells]);
                    }
                }
                if need_dx {
                    let cin = channels_in(l);
                    let dcol = &mut trace.dcol[..kk * cells];
                    dcol.fill(T::zero());
                    for oc in 0..filters {
                        let d = &dout[oc * cells..(oc + 1) * cells];
                        let wrow = &w[block.weights + oc * kk..][..kk];
                        for (j, &wj) in wrow.iter().enumerate() {
                            axpy(wj, d, &mut dcol[j * cells..(j + 1) * cells]);
                        }
                    }
                    let dx = &mut grads_before[l - 1];
                    dx.fill(T::zero());
                    col2im_add(dcol, cin, n, dx);
                    if arch.residual && cin == filters {
                        for (g, &d) in dx.iter_mut().zip(dout.iter()) {
                            *g += d;
                        }
                    }
                }
            }
            Layer::Dense { units } => {
                let kk = block.fan_in;
                for (j, &d) in dout.iter().enumerate().take(units) {
                    grad[block.bias + j] += d;
                    axpy(d, x, &mut grad[block.weights + j * kk..][..kk]);
                }
                if need_dx {
                    let dx = &mut grads_before[l - 1];
                    dx.fill(T::zero());
                    for (j, &d) in dout.iter().enumerate().take(units) {
                        axpy(d, &w[block.weights + j * kk..][..kk], dx);
                    }
                }
            }
        }
    }
}

/// Numerically stable softmax.
pub(crate) fn softmax<T: Scalar>(logits: &[T], out: &mut [T]) {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let mut sum = T::zero();
    for (o, &l) in out.iter_mut().zip(logits) {
        *o = (l - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o = *o / sum;
    }
}

/// Per-example loss `(z - v)^2 - pi . log(p + eps)` and its gradient with
/// respect to the logits and the pre-tanh value, each scaled by `scale`.
pub(crate) fn example_loss<T: Scalar>(
    logits: &[T],
    value_pre: T,
    target_policy: &[f64],
    target_value: f64,
    scale: T,
    probs: &mut [T],
    dlogits: &mut [T],
) -> (T, T) {
    softmax(logits, probs);
    let eps = T::of(LOG_EPSILON);
    let v = value_pre.tanh();
    let z = T::of(target_value);
    let value_loss = (z - v) * (z - v);
    let mut policy_loss = T::zero();
    let mut weighted = T::zero();
    for ((&p, &pi), d) in probs.iter().zip(target_policy).zip(dlogits.iter_mut()) {
        let pi = T::of(pi);
        policy_loss -= pi * (p + eps).ln();
        // w_i = pi_i p_i / (p_i + eps)
        let wi = pi * p / (p + eps);
        *d = -wi;
        weighted += wi;
    }
    for (d, &p) in dlogits.iter_mut().zip(probs.iter()) {
        *d = (*d + p * weighted) * scale;
    }
    let dvalue = -T::of(2.0) * (z - v) * (T::one() - v * v) * scale;
    (value_loss + policy_loss, dvalue)
}
