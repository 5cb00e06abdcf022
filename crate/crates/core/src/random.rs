//! Seeded series generation.
//!
//! Every experiment derives the generator for trial `t` from `seed ^ t`, so
//! results do not depend on the order in which trials are executed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::{Error, Result, TimeSeries};

pub type SeriesRng = ChaCha8Rng;

/// Seed for trial `trial` of an experiment seeded with `seed`.
#[inline]
pub fn derive_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial
}

pub fn rng_from_seed(seed: u64) -> SeriesRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Value distribution for generated series entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ValueDistribution {
    StandardNormal,
    /// Uniform on `[0, 1)`.
    Uniform,
    /// Uniform over the integers `0..levels`.
    Quantized {
        levels: u32,
    },
}

impl ValueDistribution {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Quantized { levels } if *levels < 1 => Err(Error::InvalidArgument(
                "quantized distribution needs at least one level".into(),
            )),
            _ => Ok(()),
        }
    }

    pub fn is_integer_valued(&self) -> bool {
        matches!(self, Self::Quantized { .. })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::StandardNormal => rng.sample(StandardNormal),
            Self::Uniform => rng.random::<f64>(),
            Self::Quantized { levels } => rng.random_range(0..levels) as f64,
        }
    }

    /// Draws `len * dim` i.i.d. entries from `rng`.
    pub fn sample_series<R: Rng + ?Sized>(
        &self,
        len: usize,
        dim: usize,
        rng: &mut R,
    ) -> Result<TimeSeries> {
        let values = (0..len * dim).map(|_| self.sample(rng)).collect();
        TimeSeries::from_flat(len, dim, values)
    }
}

/// A series of i.i.d. standard-normal entries, identical for identical
/// `(length, dim, seed)`.
pub fn random_series(length: usize, dim: usize, seed: u64) -> Result<TimeSeries> {
    ValueDistribution::StandardNormal.sample_series(length, dim, &mut rng_from_seed(seed))
}
