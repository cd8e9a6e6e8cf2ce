use rand::seq::SliceRandom;

use super::buffer::ExperienceBuffer;
use crate::error::{Error, Result};
use crate::evaluator::{NetworkParams, Sgd, TrainingExample};
use crate::seed::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimiseConfig {
    pub epochs: u32,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub l2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimiseReport {
    pub steps: u64,
    /// Mean pre-update batch loss over the last epoch.
    pub final_epoch_loss: f64,
}

/// Steps taken by [`optimise`]: `epochs * ceil(experiences / batch_size)`.
pub fn steps_for(epochs: u32, experiences: usize, batch_size: usize) -> u64 {
    u64::from(epochs) * experiences.div_ceil(batch_size) as u64
}

/// Runs `epochs` passes over the buffer. Each epoch reshuffles every
/// buffered experience and presents it exactly once; the last batch of an
/// epoch may be short. Momentum starts from zero on every call.
pub fn optimise(
    params: &mut NetworkParams,
    buffer: &ExperienceBuffer,
    config: &OptimiseConfig,
    rng: &mut Rng,
) -> Result<OptimiseReport> {
    if buffer.is_empty() {
        return Err(Error::EmptyBuffer);
    }
    if config.batch_size == 0 {
        return Err(Error::Config("batch_size must be positive".into()));
    }
    let mut sgd = Sgd::new(config.learning_rate, config.momentum, config.l2);
    let mut order: Vec<&TrainingExample> = buffer.experiences().map(|e| &e.example).collect();
    let mut steps = 0;
    let mut final_epoch_loss = 0.0;
    for _ in 0..config.epochs {
        order.shuffle(rng);
        let mut total = 0.0;
        let mut batches = 0;
        for batch in order.chunks(config.batch_size) {
            total += sgd.step(params, batch)?;
            batches += 1;
            steps += 1;
        }
        final_epoch_loss = total / f64::from(batches);
    }
    Ok(OptimiseReport {
        steps,
        final_epoch_loss,
    })
}
