//! Exhaustive warping-path enumeration and exact path counting.
//!
//! The number of warping paths on the `[m] x [n]` lattice is the Delannoy
//! number of `(m - 1, n - 1)`; [`count_paths`] is indexed by lattice size so
//! that `count_paths(2, 2) == 3`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::dtw::path_cost;
use crate::path::LatticeWalk;
use crate::{Error, Result, TimeSeries, Tolerance, WarpingPath};

/// Maximum number of paths [`enumerate_paths`] will materialize.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// Path counts for every lattice up to `max_m x max_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCountTable {
    max_m: usize,
    max_n: usize,
    counts: Vec<BigUint>,
}

impl PathCountTable {
    /// Fills the table with the three-term recurrence
    /// `D(m, n) = D(m-1, n) + D(m, n-1) + D(m-1, n-1)`, `D(1, n) = D(m, 1) = 1`.
    pub fn build(max_m: usize, max_n: usize) -> Self {
        let mut counts: Vec<BigUint> = Vec::with_capacity(max_m * max_n);
        for r in 0..max_m {
            for c in 0..max_n {
                let value = if r == 0 || c == 0 {
                    BigUint::one()
                } else {
                    &counts[(r - 1) * max_n + c]
                        + &counts[r * max_n + c - 1]
                        + &counts[(r - 1) * max_n + c - 1]
                };
                counts.push(value);
            }
        }
        Self {
            max_m,
            max_n,
            counts,
        }
    }

    pub fn max_m(&self) -> usize {
        self.max_m
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Count for the `(m x n)` lattice, 1-based. `None` outside the table.
    pub fn get(&self, m: usize, n: usize) -> Option<&BigUint> {
        if m == 0 || n == 0 || m > self.max_m || n > self.max_n {
            return None;
        }
        Some(&self.counts[(m - 1) * self.max_n + (n - 1)])
    }

    /// Rows of the table, `m = 1..=max_m`.
    pub fn rows(&self) -> impl Iterator<Item = &[BigUint]> + '_ {
        self.counts.chunks(self.max_n.max(1)).take(self.max_m)
    }
}

/// Number of warping paths on the `(m x n)` lattice. Zero for an empty
/// lattice.
pub fn count_paths(m: usize, n: usize) -> BigUint {
    if m == 0 || n == 0 {
        return BigUint::zero();
    }
    // two rolling rows are enough for a single entry
    let mut prev = vec![BigUint::one(); n];
    for _ in 1..m {
        let mut row = Vec::with_capacity(n);
        row.push(BigUint::one());
        for c in 1..n {
            let value = &prev[c] + &row[c - 1] + &prev[c - 1];
            row.push(value);
        }
        prev = row;
    }
    prev.pop().expect("n >= 1")
}

/// Number of unordered pairs of distinct warping paths, `D (D - 1) / 2`.
pub fn pair_count(m: usize, n: usize) -> BigUint {
    let d = count_paths(m, n);
    if d.is_zero() {
        return d;
    }
    let d_minus_one = &d - 1u32;
    d * d_minus_one / 2u32
}

/// Lazily yields every warping path on the `(m x n)` lattice in
/// lexicographic order. No budget is applied.
pub fn paths(m: usize, n: usize) -> impl Iterator<Item = WarpingPath> {
    let empty = m == 0 || n == 0;
    LatticeWalk::new(m.max(1), n.max(1), |_, _, _| true).filter(move |_| !empty)
}

/// Fails when the `(m x n)` lattice holds more than [`ENUMERATION_BUDGET`]
/// paths.
pub fn check_budget(m: usize, n: usize) -> Result<()> {
    let count = count_paths(m, n);
    match count.to_u64() {
        Some(c) if c <= ENUMERATION_BUDGET => Ok(()),
        _ => Err(Error::BudgetExceeded {
            m,
            n,
            count: count.to_string(),
            budget: ENUMERATION_BUDGET,
        }),
    }
}

/// Every warping path on the `(m x n)` lattice, exactly once, in
/// lexicographic order.
pub fn enumerate_paths(m: usize, n: usize) -> Result<Vec<WarpingPath>> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("empty lattice {m}x{n}")));
    }
    check_budget(m, n)?;
    Ok(paths(m, n).collect())
}

/// Exhaustive DTW: evaluates every path and returns the minimal cost
/// together with all paths whose cost ties it under `tol`.
pub fn brute_force_dtw(
    x: &TimeSeries,
    y: &TimeSeries,
    tol: &Tolerance,
) -> Result<(f64, Vec<WarpingPath>)> {
    x.check_same_dim(y)?;
    tol.validate()?;
    tol.check_inputs(x, y)?;
    check_budget(x.len(), y.len())?;
    let scored = paths(x.len(), y.len())
        .map(|p| path_cost(x, y, &p).map(|cost| (cost, p)))
        .collect::<Result<Vec<_>>>()?;
    let min = scored
        .iter()
        .map(|(cost, _)| *cost)
        .fold(f64::INFINITY, f64::min);
    let argmin = scored
        .into_iter()
        .filter(|(cost, _)| tol.ties(*cost, min))
        .map(|(_, p)| p)
        .collect();
    Ok((min, argmin))
}
