//! Multi-path and multi optimal-path sets.
//!
//! A pair `(x, y)` lies in the multi-path set when two different warping
//! paths (optimal or not) have equal cost, and in the multi optimal-path set
//! when it has more than one optimal path. The second set is contained in
//! the first. Both sets are unions of zero sets of the quadratic forms
//! `z^T A^(ij) z`, which [`zero_set_scan`] traces on 2-D slices.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{quad_form_matrix, QuadFormMatrix};
use crate::dtw::{all_optimal_paths, DEFAULT_PATH_CAP};
use crate::enumeration::{check_budget, enumerate_paths, pair_count, paths};
use crate::random::{derive_seed, rng_from_seed, ValueDistribution};
use crate::{Error, Result, TimeSeries, Tolerance, WarpingPath};

/// Result of the membership tests for one pair of series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiPathReport {
    pub pair_id: String,
    /// Squared DTW distance.
    pub optimal_cost: f64,
    /// Number of optimal paths found, at most [`DEFAULT_PATH_CAP`].
    pub num_optimal: usize,
    /// True when `num_optimal` hit the cap.
    pub optimal_truncated: bool,
    pub in_multi_optimal_set: bool,
    /// `None` when the lattice is too large for the exhaustive test.
    pub in_multi_path_set: Option<bool>,
    /// Two distinct paths with tying costs, when one was found.
    pub tie_witness: Option<(WarpingPath, WarpingPath)>,
    pub epsilon_used: f64,
    pub exact_mode: bool,
}

/// Decides membership of `(x, y)` in both sets.
///
/// The multi optimal-path part comes from [`all_optimal_paths`]. The
/// multi-path part evaluates every path, sorts the costs and looks for a
/// tying neighbour: for non-negative costs, `a <= b <= c` and a tie between
/// `a` and `c` imply a tie between `a` and `b`, so neighbours suffice. If
/// the lattice exceeds the enumeration budget, `in_multi_path_set` is `None`
/// and only the optimal-path part is reported.
pub fn multipath_membership(
    x: &TimeSeries,
    y: &TimeSeries,
    tol: &Tolerance,
    pair_id: &str,
) -> Result<MultiPathReport> {
    let optimal = all_optimal_paths(x, y, tol, DEFAULT_PATH_CAP)?;
    let in_multi_optimal_set = optimal.paths.len() > 1;

    let (in_multi_path_set, mut tie_witness) = match check_budget(x.len(), y.len()) {
        Ok(()) => {
            let witness = exhaustive_tie(x, y, tol);
            (Some(witness.is_some()), witness)
        }
        Err(Error::BudgetExceeded { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    if tie_witness.is_none() && in_multi_optimal_set {
        tie_witness = Some((optimal.paths[0].clone(), optimal.paths[1].clone()));
    }

    Ok(MultiPathReport {
        pair_id: pair_id.to_string(),
        optimal_cost: optimal.optimal_cost,
        num_optimal: optimal.paths.len(),
        optimal_truncated: optimal.truncated,
        in_multi_optimal_set,
        in_multi_path_set,
        tie_witness,
        epsilon_used: tol.tie_epsilon,
        exact_mode: tol.exact_mode,
    })
}

fn exhaustive_tie(
    x: &TimeSeries,
    y: &TimeSeries,
    tol: &Tolerance,
) -> Option<(WarpingPath, WarpingPath)> {
    let mut scored: Vec<(f64, usize)> = paths(x.len(), y.len())
        .enumerate()
        .map(|(k, p)| (path_cost_unchecked(x, y, &p), k))
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let (a, b) = scored
        .windows(2)
        .find(|w| tol.ties(w[0].0, w[1].0))
        .map(|w| (w[0].1.min(w[1].1), w[0].1.max(w[1].1)))?;
    let mut all = paths(x.len(), y.len());
    let first = all.nth(a)?;
    let second = all.nth(b - a - 1)?;
    Some((first, second))
}

fn path_cost_unchecked(x: &TimeSeries, y: &TimeSeries, p: &WarpingPath) -> f64 {
    p.points()
        .iter()
        .map(|&(i, j)| crate::series::sq_dist(x.get(i - 1), y.get(j - 1)))
        .sum()
}

/// Upper bound on the number of path pairs a single scan may evaluate.
pub const MAX_SCAN_PAIRS: u64 = 1_000_000;

/// One scanned coordinate of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanAxis {
    /// 1-based position in `x`.
    pub index: usize,
    pub min: f64,
    pub max: f64,
}

impl ScanAxis {
    fn value(&self, k: usize, resolution: usize) -> f64 {
        self.min + (self.max - self.min) * k as f64 / (resolution - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub axes: [ScanAxis; 2],
    /// Grid points per axis.
    pub resolution: usize,
}

/// A bisection-refined point where the pair's cost difference changes sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingPoint {
    pub x1: f64,
    pub x2: f64,
    /// `|z^T A^(ij) z|` at the refined point.
    pub residual: f64,
    /// Both paths of the pair are optimal here (within tolerance).
    pub on_optimal_set: bool,
}

/// Sign grid and zero-set segments of one path pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScan {
    /// 1-based index of the first path in enumeration order.
    pub i: usize,
    /// 1-based index of the second path, `i < j`.
    pub j: usize,
    /// Sign of `C_i(z) - C_j(z)` (-1, 0, 1) at grid point `(a, b)`, stored at
    /// `a * resolution + b` where `a` indexes the first axis.
    pub signs: Vec<i8>,
    /// Line pieces of the zero set, one per crossed grid cell side pair.
    pub segments: Vec<[CrossingPoint; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridScanResult {
    pub grid: GridSpec,
    pub paths: Vec<WarpingPath>,
    pub pairs: Vec<PairScan>,
}

impl GridScanResult {
    /// Pairs with at least one crossing point on the multi optimal-path set.
    pub fn optimal_pair_count(&self) -> usize {
        self.pairs
            .iter()
            .filter(|p| {
                p.segments
                    .iter()
                    .flatten()
                    .any(|point| point.on_optimal_set)
            })
            .count()
    }
}

/// Scans a 2-D slice `z = (x, y)` in which two coordinates of `x` vary over
/// a grid and everything else is fixed by `base_x` and `base_y`.
///
/// For every pair of paths `i < j` the sign of `C_i(z) - C_j(z)` (which
/// equals `z^T A^(ij) z`) is recorded on the grid. Grid sides whose end
/// points fall on opposite sides of zero (negative vs. non-negative) are
/// refined by bisection and joined into segments cell by cell, resolving
/// saddle cells by the value at the cell centre. Each refined point is
/// flagged when both paths are optimal there.
pub fn zero_set_scan(
    base_x: &TimeSeries,
    base_y: &TimeSeries,
    axes: [ScanAxis; 2],
    resolution: usize,
    tol: &Tolerance,
) -> Result<GridScanResult> {
    if base_x.dim() != 1 || base_y.dim() != 1 {
        return Err(Error::InvalidArgument(
            "zero-set scans need univariate series".into(),
        ));
    }
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be >= 2".into()));
    }
    let m = base_x.len();
    for axis in &axes {
        if !(1..=m).contains(&axis.index) {
            return Err(Error::InvalidArgument(format!(
                "free index {} outside 1..={m}",
                axis.index
            )));
        }
        if !(axis.min.is_finite() && axis.max.is_finite() && axis.min < axis.max) {
            return Err(Error::InvalidArgument(format!(
                "malformed range {}:{}",
                axis.min, axis.max
            )));
        }
    }
    if axes[0].index == axes[1].index {
        return Err(Error::InvalidArgument("free indices must differ".into()));
    }
    tol.validate()?;
    let pairs_total = pair_count(m, base_y.len());
    if pairs_total > MAX_SCAN_PAIRS.into() {
        return Err(Error::BudgetExceeded {
            m,
            n: base_y.len(),
            count: pairs_total.to_string(),
            budget: MAX_SCAN_PAIRS,
        });
    }

    let paths = enumerate_paths(m, base_y.len())?;
    let slice = Slice::new(base_x, base_y, axes, &paths);
    let res = resolution;

    // cost of every path at every grid point: costs[(a * res + b) * P + k]
    let costs: Vec<f64> = (0..res * res)
        .into_par_iter()
        .flat_map_iter(|g| slice.costs_at(axes[0].value(g / res, res), axes[1].value(g % res, res)))
        .collect();

    let index_pairs: Vec<(usize, usize)> = (0..paths.len())
        .flat_map(|i| (i + 1..paths.len()).map(move |j| (i, j)))
        .collect();
    let pairs = index_pairs
        .into_par_iter()
        .map(|(i, j)| {
            let a = quad_form_matrix(&paths[i], &paths[j])?;
            Ok(slice.scan_pair(i, j, &a, &costs, res, tol))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GridScanResult {
        grid: GridSpec { axes, resolution },
        paths,
        pairs,
    })
}

struct Slice<'a> {
    z: Vec<f64>,
    m: usize,
    axes: [ScanAxis; 2],
    paths: &'a [WarpingPath],
}

impl<'a> Slice<'a> {
    fn new(
        base_x: &TimeSeries,
        base_y: &TimeSeries,
        axes: [ScanAxis; 2],
        paths: &'a [WarpingPath],
    ) -> Self {
        let mut z = base_x.as_flat().to_vec();
        z.extend_from_slice(base_y.as_flat());
        Self {
            z,
            m: base_x.len(),
            axes,
            paths,
        }
    }

    fn point(&self, u: f64, v: f64) -> Vec<f64> {
        let mut z = self.z.clone();
        z[self.axes[0].index - 1] = u;
        z[self.axes[1].index - 1] = v;
        z
    }

    fn cost(&self, z: &[f64], k: usize) -> f64 {
        self.paths[k]
            .points()
            .iter()
            .map(|&(i, j)| {
                let d = z[i - 1] - z[self.m + j - 1];
                d * d
            })
            .sum()
    }

    fn costs_at(&self, u: f64, v: f64) -> Vec<f64> {
        let z = self.point(u, v);
        (0..self.paths.len()).map(|k| self.cost(&z, k)).collect()
    }

    fn difference(&self, i: usize, j: usize, u: f64, v: f64) -> f64 {
        let z = self.point(u, v);
        self.cost(&z, i) - self.cost(&z, j)
    }

    fn scan_pair(
        &self,
        i: usize,
        j: usize,
        a: &QuadFormMatrix,
        costs: &[f64],
        res: usize,
        tol: &Tolerance,
    ) -> PairScan {
        let np = self.paths.len();
        let values: Vec<f64> = (0..res * res)
            .map(|g| costs[g * np + i] - costs[g * np + j])
            .collect();
        let signs = values.iter().map(|&v| sign(v)).collect();
        let negative = |g: usize| values[g] < 0.0;
        let coord = |g: usize| {
            (
                self.axes[0].value(g / res, res),
                self.axes[1].value(g % res, res),
            )
        };

        // crossings on sides along the first axis ((a, b) -> (a + 1, b)) and
        // along the second ((a, b) -> (a, b + 1)), keyed by the lower corner
        let crossing = |g: usize, h: usize| -> Option<CrossingPoint> {
            if negative(g) == negative(h) {
                return None;
            }
            Some(self.refine(i, j, a, coord(g), coord(h), tol))
        };
        let along_first: Vec<Option<CrossingPoint>> = (0..res * res)
            .map(|g| (g / res + 1 < res).then(|| crossing(g, g + res)).flatten())
            .collect();
        let along_second: Vec<Option<CrossingPoint>> = (0..res * res)
            .map(|g| (g % res + 1 < res).then(|| crossing(g, g + 1)).flatten())
            .collect();

        let mut segments = Vec::new();
        for ca in 0..res - 1 {
            for cb in 0..res - 1 {
                let g00 = ca * res + cb;
                let (g10, g01) = (g00 + res, g00 + 1);
                // sides around the cell, each adjacent to two corners
                let low_first = along_first[g00]; // g00 - g10
                let high_first = along_first[g01]; // g01 - g11
                let low_second = along_second[g00]; // g00 - g01
                let high_second = along_second[g10]; // g10 - g11
                match (low_first, high_second, high_first, low_second) {
                    (Some(p0), Some(p1), Some(p2), Some(p3)) => {
                        let (u, v) = coord(g00);
                        let (u2, v2) = coord(g10 + 1);
                        let centre_negative =
                            self.difference(i, j, 0.5 * (u + u2), 0.5 * (v + v2)) < 0.0;
                        if centre_negative == negative(g00) {
                            // g00 and g11 connected: cut off g10 and g01
                            segments.push([p0, p1]);
                            segments.push([p2, p3]);
                        } else {
                            segments.push([p0, p3]);
                            segments.push([p1, p2]);
                        }
                    }
                    sides => {
                        let found: Vec<CrossingPoint> = [sides.0, sides.1, sides.2, sides.3]
                            .into_iter()
                            .flatten()
                            .collect();
                        if let [p, q] = found[..] {
                            segments.push([p, q]);
                        }
                    }
                }
            }
        }

        PairScan {
            i: i + 1,
            j: j + 1,
            signs,
            segments,
        }
    }

    fn refine(
        &self,
        i: usize,
        j: usize,
        a: &QuadFormMatrix,
        from: (f64, f64),
        to: (f64, f64),
        tol: &Tolerance,
    ) -> CrossingPoint {
        let at = |t: f64| (from.0 + t * (to.0 - from.0), from.1 + t * (to.1 - from.1));
        let start_negative = {
            let (u, v) = at(0.0);
            self.difference(i, j, u, v) < 0.0
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (u, v) = at(mid);
            if (self.difference(i, j, u, v) < 0.0) == start_negative {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (x1, x2) = at(0.5 * (lo + hi));
        let z = self.point(x1, x2);
        let residual = a
            .evaluate(&z)
            .expect("slice point has lattice length")
            .abs();
        let costs: Vec<f64> = (0..self.paths.len()).map(|k| self.cost(&z, k)).collect();
        let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
        CrossingPoint {
            x1,
            x2,
            residual,
            on_optimal_set: tol.ties(costs[i], best) && tol.ties(costs[j], best),
        }
    }
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Configuration of a Monte Carlo uniqueness experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniquenessConfig {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub trials: u64,
    pub distribution: ValueDistribution,
    pub tolerance: Tolerance,
    pub seed: u64,
}

impl UniquenessConfig {
    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 || self.d == 0 || self.trials == 0 {
            return Err(Error::InvalidArgument(
                "m, n, d and trials must all be >= 1".into(),
            ));
        }
        self.distribution.validate()?;
        self.tolerance.validate()?;
        if self.tolerance.exact_mode && !self.distribution.is_integer_valued() {
            return Err(Error::NotIntegerValued);
        }
        Ok(())
    }

    /// The pair of series drawn for trial `trial`.
    pub fn sample_pair(&self, trial: u64) -> Result<(TimeSeries, TimeSeries)> {
        let mut rng = rng_from_seed(derive_seed(self.seed, trial));
        let x = self.distribution.sample_series(self.m, self.d, &mut rng)?;
        let y = self.distribution.sample_series(self.n, self.d, &mut rng)?;
        Ok((x, y))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessStats {
    pub trials: u64,
    pub unique_count: u64,
    pub tie_count: u64,
    pub fraction_unique: f64,
    pub config: UniquenessConfig,
}

/// Draws `trials` independent pairs and counts those with a unique optimal
/// path. Trial `t` uses its own generator seeded with `seed ^ t`, so the
/// result does not depend on the rayon thread count.
pub fn monte_carlo_uniqueness(config: &UniquenessConfig) -> Result<UniquenessStats> {
    config.validate()?;
    let unique_count = (0..config.trials)
        .into_par_iter()
        .map(|t| {
            let (x, y) = config.sample_pair(t)?;
            crate::dtw::is_unique_optimal(&x, &y, &config.tolerance).map(u64::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(UniquenessStats {
        trials: config.trials,
        unique_count,
        tie_count: config.trials - unique_count,
        fraction_unique: unique_count as f64 / config.trials as f64,
        config: *config,
    })
}
