//! Stochastic subgradient averaging of time series under DTW.

use rand::seq::SliceRandom;
use serde::Serialize;

use super::{cost_j, grad_dtw_sq, loss_gradient, GradientRule, Loss, TiePolicy};
use crate::random::rng_from_seed;
use crate::{Error, Result, TimeSeries, Tolerance};

/// Step size per epoch `t = 1, 2, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "eta")]
pub enum StepSchedule {
    Constant(f64),
    /// `eta / t`
    InverseEpoch(f64),
}

impl StepSchedule {
    pub fn at(&self, epoch: usize) -> f64 {
        match *self {
            StepSchedule::Constant(eta) => eta,
            StepSchedule::InverseEpoch(eta) => eta / epoch as f64,
        }
    }

    fn base(&self) -> f64 {
        match *self {
            StepSchedule::Constant(eta) | StepSchedule::InverseEpoch(eta) => eta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SsgConfig {
    pub epochs: usize,
    pub schedule: StepSchedule,
    pub seed: u64,
    pub tie_policy: TiePolicy,
    pub rule: GradientRule,
    pub tolerance: Tolerance,
}

impl Default for SsgConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            schedule: StepSchedule::Constant(0.05),
            seed: 0,
            tie_policy: TiePolicy::RandomAmongOptimal,
            rule: GradientRule::Printed,
            tolerance: Tolerance::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragingResult {
    pub mean: TimeSeries,
    /// `J` at the initial point.
    pub initial_cost: f64,
    /// `J` after each epoch.
    pub trace: Vec<f64>,
    /// Updates taken at points with more than one optimal path.
    pub nonunique_updates: usize,
}

/// The sample element minimizing `J` (lowest index on ties), resampled to
/// length `n` by uniform index mapping.
pub fn medoid_init(sample: &[TimeSeries], n: usize, loss: Loss) -> Result<TimeSeries> {
    let mut best: Option<(usize, f64)> = None;
    for (k, candidate) in sample.iter().enumerate() {
        let j = cost_j(sample, candidate, loss)?;
        if best.is_none_or(|(_, b)| j < b) {
            best = Some((k, j));
        }
    }
    let (k, _) = best.ok_or(Error::EmptySample)?;
    sample[k].resample(n)
}

/// Minimizes `J(z) = (1/N) sum_k l(delta(x_k, z))` over series `z` of
/// length `n` by stochastic subgradient steps
/// `z <- z - eta_t * direction(x_k, z)`, visiting the sample in a fresh
/// seeded order each epoch.
pub fn ssg_average(
    sample: &[TimeSeries],
    n: usize,
    loss: Loss,
    config: &SsgConfig,
) -> Result<AveragingResult> {
    let first = sample.first().ok_or(Error::EmptySample)?;
    for x in sample {
        first.check_same_dim(x)?;
    }
    if config.epochs == 0 {
        return Err(Error::InvalidArgument("epochs must be >= 1".into()));
    }
    let eta = config.schedule.base();
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step size must be > 0, got {eta}"
        )));
    }

    let mut rng = rng_from_seed(config.seed);
    let mut z = medoid_init(sample, n, loss)?;
    let initial_cost = cost_j(sample, &z, loss)?;
    let mut order: Vec<usize> = (0..sample.len()).collect();
    let mut trace = Vec::with_capacity(config.epochs);
    let mut nonunique_updates = 0;

    for epoch in 1..=config.epochs {
        let eta = config.schedule.at(epoch);
        order.shuffle(&mut rng);
        for &k in &order {
            let step = grad_dtw_sq(
                &sample[k],
                &z,
                &config.tolerance,
                config.tie_policy,
                &mut rng,
            )?;
            if !step.was_unique {
                nonunique_updates += 1;
            }
            let direction = loss_gradient(&step, loss, config.rule)?;
            let updated = z
                .as_flat()
                .iter()
                .zip(direction.as_flat())
                .map(|(zv, g)| zv - eta * g)
                .collect();
            z = TimeSeries::from_flat(z.len(), z.dim(), updated)?;
        }
        trace.push(cost_j(sample, &z, loss)?);
    }

    Ok(AveragingResult {
        mean: z,
        initial_cost,
        trace,
        nonunique_updates,
    })
}
