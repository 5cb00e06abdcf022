//! Cost comparison policy used for tie detection.

use serde::Serialize;

use crate::{Error, Result, TimeSeries};

/// Largest integer below which every `f64` integer is exact.
const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0; // 2^53

/// Decides when two alignment costs are considered equal.
///
/// With `exact_mode` off, `a` and `b` tie iff
/// `|a - b| <= tie_epsilon * max(1, |a|, |b|)`. With `exact_mode` on, costs
/// must come from integer-valued inputs and are compared with `==`; see
/// [`Tolerance::check_inputs`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerance {
    pub tie_epsilon: f64,
    pub exact_mode: bool,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            tie_epsilon: 1e-9,
            exact_mode: false,
        }
    }
}

impl Tolerance {
    pub fn relative(tie_epsilon: f64) -> Self {
        Self {
            tie_epsilon,
            exact_mode: false,
        }
    }

    pub fn exact() -> Self {
        Self {
            tie_epsilon: 0.0,
            exact_mode: true,
        }
    }

    #[inline]
    pub fn ties(&self, a: f64, b: f64) -> bool {
        if self.exact_mode {
            a == b
        } else {
            (a - b).abs() <= self.tie_epsilon * 1f64.max(a.abs()).max(b.abs())
        }
    }

    /// Validates inputs for exact comparison.
    ///
    /// Integer-valued inputs produce integer local costs and integer path
    /// sums; those sums are computed exactly in `f64` as long as they stay
    /// below 2^53, which is checked here against the worst case
    /// `(m + n - 1) * d * (2 * max|v|)^2`. A no-op when `exact_mode` is off.
    pub fn check_inputs(&self, x: &TimeSeries, y: &TimeSeries) -> Result<()> {
        if !self.exact_mode {
            return Ok(());
        }
        if !(x.is_integer_valued() && y.is_integer_valued()) {
            return Err(Error::NotIntegerValued);
        }
        let span = 2.0 * x.max_abs().max(y.max_abs());
        let worst = (x.len() + y.len() - 1) as f64 * x.dim() as f64 * span * span;
        if worst >= EXACT_LIMIT {
            return Err(Error::ExactOverflow);
        }
        Ok(())
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.tie_epsilon >= 0.0 && self.tie_epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tie epsilon must lie in [0, 1), got {}",
                self.tie_epsilon
            )));
        }
        Ok(())
    }
}
