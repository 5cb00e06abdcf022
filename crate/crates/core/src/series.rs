//! Finite sequences of `d`-dimensional real vectors.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A time series of `len` elements, each a vector in `R^dim`.
///
/// Values are stored row-major: element `i` occupies
/// `values[i * dim..(i + 1) * dim]`. Univariate series are the `dim == 1`
/// case of the same type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct TimeSeries {
    len: usize,
    dim: usize,
    values: Vec<f64>,
}

impl TimeSeries {
    /// Builds a series from one row per time step.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidSeries("series must have at least one element".into()))?;
        if dim == 0 {
            return Err(Error::InvalidSeries(
                "elements must have dimension >= 1".into(),
            ));
        }
        let len = rows.len();
        let mut values = Vec::with_capacity(len * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidSeries(format!(
                    "element {} has dimension {}, expected {}",
                    i + 1,
                    row.len(),
                    dim
                )));
            }
            values.extend(row);
        }
        Self::from_flat(len, dim, values)
    }

    /// Builds a series from row-major values.
    pub fn from_flat(len: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if len == 0 || dim == 0 {
            return Err(Error::InvalidSeries(format!(
                "length and dimension must be >= 1 (got {len}x{dim})"
            )));
        }
        if values.len() != len * dim {
            return Err(Error::LengthMismatch {
                expected: len * dim,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSeries(format!(
                "non-finite value at element {}",
                pos / dim + 1
            )));
        }
        Ok(Self { len, dim, values })
    }

    /// A univariate series.
    pub fn univariate(values: &[f64]) -> Result<Self> {
        Self::from_flat(values.len(), 1, values.to_vec())
    }

    /// A series of `len` copies of `value` in every coordinate.
    pub fn constant(len: usize, dim: usize, value: f64) -> Result<Self> {
        Self::from_flat(len, dim, vec![value; len * dim])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false; a series has at least one element.
    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Element at 0-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.values
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    /// The `k`-th component series (0-based), as used by the componentwise
    /// multivariate reduction.
    pub fn component(&self, k: usize) -> Vec<f64> {
        self.values
            .iter()
            .skip(k)
            .step_by(self.dim)
            .copied()
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.iter().map(<[f64]>::to_vec).collect()
    }

    /// True when every value is an integer.
    pub fn is_integer_valued(&self) -> bool {
        self.values.iter().all(|v| v.fract() == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Resamples to `n` elements by uniform index mapping: element `j`
    /// takes the value of element `floor(j * len / n)`.
    pub fn resample(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("target length must be >= 1".into()));
        }
        let mut values = Vec::with_capacity(n * self.dim);
        for j in 0..n {
            values.extend_from_slice(self.get(j * self.len / n));
        }
        Self::from_flat(n, self.dim, values)
    }

    pub(crate) fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

/// Squared Euclidean distance between two elements.
#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

impl TryFrom<Vec<Vec<f64>>> for TimeSeries {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<TimeSeries> for Vec<Vec<f64>> {
    fn from(series: TimeSeries) -> Self {
        series.rows()
    }
}
