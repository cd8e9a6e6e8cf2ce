//! Policy/value network and its trainer.
//!
//! The network maps a [`StateTensor`] to a policy over the action space and a
//! scalar value in `[-1, 1]`. Training minimises, averaged over a batch,
//!
//! ```text
//! (z - v)^2 - pi . log(p + 1e-10)
//! ```
//!
//! plus `c * ||theta||^2` added once per batch over all non-bias weights.
//! Gradients are computed by hand-written backpropagation; [`gradient_check`]
//! verifies them against central finite differences.

mod arch;
mod checkpoint;
mod gradcheck;
mod net;

use rand_distr::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::game::StateTensor;
use crate::seed;

pub use arch::{Architecture, Layer};
pub use checkpoint::{load_params, save_params, CHECKPOINT_FORMAT_VERSION, CHECKPOINT_MAGIC};
pub use gradcheck::gradient_check;
pub use net::LOG_EPSILON;

use net::{backward, example_loss, forward, softmax, Scalar, Trace};

/// Network weights plus the descriptor that gives them shape.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    pub architecture: Architecture,
    pub weights: Vec<f32>,
    /// Incremented by every optimiser update.
    pub version: u64,
}

/// One training target: `{s, pi(s), z(s)}`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrainingExample {
    pub state: StateTensor,
    pub policy: Vec<f64>,
    pub value: f64,
}

/// Scale of the output-head init relative to the hidden layers.
const HEAD_INIT_SCALE: f64 = 0.1;

/// He-uniform hidden layers, small heads, zero biases. Deterministic in `seed`.
pub fn init_params(architecture: &Architecture, seed: u64) -> Result<NetworkParams> {
    architecture.validate()?;
    let layout = architecture.layout();
    let mut rng = seed::rng(seed, "init", 0);
    let mut weights = vec![0.0f32; layout.total];
    let heads = [(layout.policy, HEAD_INIT_SCALE), (layout.value, HEAD_INIT_SCALE)];
    let blocks = layout.hidden.iter().map(|&b| (b, 1.0)).chain(heads);
    for (block, scale) in blocks {
        let bound = scale * (6.0 / block.fan_in as f64).sqrt();
        let dist = Uniform::new_inclusive(-bound, bound);
        for w in &mut weights[block.weight_range()] {
            *w = dist.sample(&mut rng) as f32;
        }
    }
    Ok(NetworkParams {
        architecture: architecture.clone(),
        weights,
        version: 0,
    })
}

impl NetworkParams {
    pub fn parameter_count(&self) -> usize {
        self.weights.len()
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }

    /// Squared L2 norm of the non-bias weights.
    pub fn l2_norm_sq(&self) -> f64 {
        self.weights
            .iter()
            .zip(self.architecture.bias_mask())
            .filter(|(_, bias)| !bias)
            .map(|(&w, _)| f64::from(w) * f64::from(w))
            .sum()
    }

    /// Zeroes the policy head so the network outputs a uniform policy.
    pub fn zero_policy_head(&mut self) {
        let layout = self.architecture.layout();
        self.weights[layout.policy.weight_range()].fill(0.0);
        self.weights[layout.policy.bias_range()].fill(0.0);
    }

    /// Zeroes the value head so the network outputs `v = 0`.
    pub fn zero_value_head(&mut self) {
        let layout = self.architecture.layout();
        self.weights[layout.value.weight_range()].fill(0.0);
        self.weights[layout.value.bias_range()].fill(0.0);
    }

    #[cfg(test)]
    pub(crate) fn policy_bias_range(&self) -> std::ops::Range<usize> {
        self.architecture.layout().policy.bias_range()
    }

    fn check_input(&self, state: &StateTensor) -> Result<()> {
        let expected = self.architecture.input_len();
        if state.planes.len() != expected || state.size != self.architecture.size {
            return Err(Error::Shape {
                expected,
                actual: state.planes.len(),
            });
        }
        Ok(())
    }
}

/// Inference-only evaluator holding reusable scratch space.
pub struct Inference<'a> {
    params: &'a NetworkParams,
    layout: arch::Layout,
    trace: Trace<f32>,
}

impl<'a> Inference<'a> {
    pub fn new(params: &'a NetworkParams) -> Self {
        let layout = params.architecture.layout();
        let trace = Trace::new(&params.architecture, &layout);
        Inference {
            params,
            layout,
            trace,
        }
    }

    pub fn params(&self) -> &NetworkParams {
        self.params
    }

    /// Policy (normalised in `f64`) and value in `[-1, 1]`.
    pub fn infer(&mut self, state: &StateTensor) -> Result<(Vec<f64>, f64)> {
        self.params.check_input(state)?;
        forward(
            &self.params.architecture,
            &self.layout,
            &self.params.weights,
            &state.planes,
            &mut self.trace,
        );
        let logits: Vec<f64> = self.trace.logits.iter().map(|&l| f64::from(l)).collect();
        let mut probs = vec![0.0; logits.len()];
        softmax(&logits, &mut probs);
        let value = f64::from(self.trace.value_pre).tanh();
        Ok((probs, value))
    }
}

/// One-shot inference. Prefer [`Inference`] in loops.
pub fn infer(params: &NetworkParams, state: &StateTensor) -> Result<(Vec<f64>, f64)> {
    Inference::new(params).infer(state)
}

fn check_batch(params: &NetworkParams, batch: &[&TrainingExample]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::Config("training batch is empty".into()));
    }
    for ex in batch {
        params.check_input(&ex.state)?;
        if ex.policy.len() != params.architecture.actions {
            return Err(Error::Shape {
                expected: params.architecture.actions,
                actual: ex.policy.len(),
            });
        }
    }
    Ok(())
}

/// Batch loss and its gradient, computed in precision `T`.
pub(crate) fn loss_and_gradient<T: Scalar>(
    architecture: &Architecture,
    weights: &[T],
    bias_mask: &[bool],
    batch: &[&TrainingExample],
    l2: f64,
    grad: Option<&mut [T]>,
) -> T {
    let layout = architecture.layout();
    let mut trace = Trace::new(architecture, &layout);
    let m = architecture.actions;
    let mut probs = vec![T::zero(); m];
    let mut dlogits = vec![T::zero(); m];
    let scale = T::one() / T::of(batch.len() as f64);
    let mut input = vec![T::zero(); architecture.input_len()];
    let mut data_loss = T::zero();

    let mut grad = grad;
    if let Some(g) = grad.as_deref_mut() {
        g.fill(T::zero());
    }
    for ex in batch {
        for (i, &x) in input.iter_mut().zip(&ex.state.planes) {
            *i = T::of(f64::from(x));
        }
        forward(architecture, &layout, weights, &input, &mut trace);
        let logits = std::mem::take(&mut trace.logits);
        let (l, dvalue) = example_loss(
            &logits,
            trace.value_pre,
            &ex.policy,
            ex.value,
            scale,
            &mut probs,
            &mut dlogits,
        );
        trace.logits = logits;
        data_loss += l;
        if let Some(g) = grad.as_deref_mut() {
            backward(architecture, &layout, weights, &mut trace, &dlogits, dvalue, g);
        }
    }

    let c = T::of(l2);
    let mut norm = T::zero();
    for (i, (&w, &bias)) in weights.iter().zip(bias_mask).enumerate() {
        if bias {
            continue;
        }
        norm += w * w;
        if let Some(g) = grad.as_deref_mut() {
            g[i] += T::of(2.0) * c * w;
        }
    }
    data_loss * scale + c * norm
}

/// Mean batch loss plus `c * ||theta||^2`, evaluated in `f64`.
pub fn loss(params: &NetworkParams, batch: &[&TrainingExample], c: f64) -> Result<f64> {
    check_batch(params, batch)?;
    let weights: Vec<f64> = params.weights.iter().map(|&w| f64::from(w)).collect();
    let mask = params.architecture.bias_mask();
    Ok(loss_and_gradient(
        &params.architecture,
        &weights,
        &mask,
        batch,
        c,
        None,
    ))
}

/// Plain gradient descent: one update on one batch. Returns the updated
/// parameters and the loss before the update.
pub fn train_step(
    params: &NetworkParams,
    batch: &[&TrainingExample],
    learning_rate: f64,
    c: f64,
) -> Result<(NetworkParams, f64)> {
    let mut sgd = Sgd::new(learning_rate, 0.0, c);
    let mut next = params.clone();
    let loss = sgd.step(&mut next, batch)?;
    Ok((next, loss))
}

/// SGD with classical momentum: `v <- mu v + g`, `theta <- theta - lr v`.
#[derive(Debug, Clone)]
pub struct Sgd {
    pub learning_rate: f64,
    pub momentum: f64,
    pub l2: f64,
    velocity: Vec<f32>,
    grad: Vec<f32>,
    bias_mask: Vec<bool>,
}

impl Sgd {
    pub fn new(learning_rate: f64, momentum: f64, l2: f64) -> Self {
        Sgd {
            learning_rate,
            momentum,
            l2,
            velocity: Vec::new(),
            grad: Vec::new(),
            bias_mask: Vec::new(),
        }
    }

    /// Applies one update in place and returns the pre-update batch loss.
    pub fn step(&mut self, params: &mut NetworkParams, batch: &[&TrainingExample]) -> Result<f64> {
        check_batch(params, batch)?;
        let n = params.weights.len();
        if self.velocity.len() != n {
            self.velocity = vec![0.0; n];
            self.grad = vec![0.0; n];
            self.bias_mask = params.architecture.bias_mask();
        }
        let loss = loss_and_gradient(
            &params.architecture,
            &params.weights,
            &self.bias_mask,
            batch,
            self.l2,
            Some(&mut self.grad),
        );
        if !loss.is_finite() {
            return Err(Error::NonFinite {
                what: "loss",
                detail: format!("batch of {} gave loss {loss}", batch.len()),
            });
        }
        if let Some(i) = self.grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite {
                what: "gradient",
                detail: format!("component {i} is {}", self.grad[i]),
            });
        }
        let lr = self.learning_rate as f32;
        let mu = self.momentum as f32;
        for ((w, v), &g) in params
            .weights
            .iter_mut()
            .zip(self.velocity.iter_mut())
            .zip(&self.grad)
        {
            *v = mu * *v + g;
            *w -= lr * *v;
        }
        params.version += 1;
        Ok(f64::from(loss))
    }
}

/// A random but well-formed policy target over `m` actions.
pub fn random_policy(rng: &mut impl rand::Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / sum).collect()
}
