//! DTW distance, path costs and complete optimal-path extraction.
//!
//! Local costs are squared Euclidean distances, so the cost of a path is
//! `C_p(x, y) = sum over (i, j) in p of |x_i - y_j|^2` and the DTW distance
//! is the square root of the minimum path cost.

use serde::Serialize;

use crate::path::LatticeWalk;
use crate::series::sq_dist;
use crate::{Result, Step, TimeSeries, Tolerance, WarpingPath};

/// Default maximum number of optimal paths returned by
/// [`all_optimal_paths`].
pub const DEFAULT_PATH_CAP: usize = 10_000;

/// Accumulated cost matrix: cell `(i, j)` holds the minimal cost of aligning
/// `x[1..=i]` with `y[1..=j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulatedCostMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
}

impl AccumulatedCostMatrix {
    pub fn compute(x: &TimeSeries, y: &TimeSeries) -> Result<Self> {
        x.check_same_dim(y)?;
        let (rows, cols) = (x.len(), y.len());
        let mut cells = vec![0.0f64; rows * cols];
        for r in 0..rows {
            let xi = x.get(r);
            for c in 0..cols {
                let local = sq_dist(xi, y.get(c));
                let best = match (r, c) {
                    (0, 0) => 0.0,
                    (0, _) => cells[c - 1],
                    (_, 0) => cells[(r - 1) * cols],
                    _ => {
                        let up = cells[(r - 1) * cols + c];
                        let left = cells[r * cols + c - 1];
                        let diag = cells[(r - 1) * cols + c - 1];
                        up.min(left).min(diag)
                    }
                };
                cells[r * cols + c] = local + best;
            }
        }
        Ok(Self { rows, cols, cells })
    }

    /// Cell at 1-based position `(i, j)`.
    pub fn cell(&self, i: usize, j: usize) -> f64 {
        assert!((1..=self.rows).contains(&i) && (1..=self.cols).contains(&j));
        self.cells[(i - 1) * self.cols + (j - 1)]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// `cell(m, n)`, the squared DTW distance.
    pub fn total(&self) -> f64 {
        self.cells[self.rows * self.cols - 1]
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.cols + c]
    }
}

/// Cost of aligning `x` and `y` along `p`.
pub fn path_cost(x: &TimeSeries, y: &TimeSeries, p: &WarpingPath) -> Result<f64> {
    x.check_same_dim(y)?;
    p.check_lattice(x.len(), y.len())?;
    Ok(p.points()
        .iter()
        .map(|&(i, j)| sq_dist(x.get(i - 1), y.get(j - 1)))
        .sum())
}

/// Squared DTW distance, `min_p C_p(x, y)`.
pub fn dtw_distance_sq(x: &TimeSeries, y: &TimeSeries) -> Result<f64> {
    Ok(AccumulatedCostMatrix::compute(x, y)?.total())
}

/// DTW distance `delta(x, y) = min_p sqrt(C_p(x, y))`.
pub fn dtw_distance(x: &TimeSeries, y: &TimeSeries) -> Result<f64> {
    dtw_distance_sq(x, y).map(f64::sqrt)
}

/// Optimal warping paths of one pair of series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalPathSet {
    /// Squared DTW distance.
    pub optimal_cost: f64,
    /// Optimal paths in lexicographic point order. Never empty.
    pub paths: Vec<WarpingPath>,
    /// True iff more optimal paths exist than were returned.
    pub truncated: bool,
}

impl OptimalPathSet {
    /// True iff exactly one optimal path exists.
    pub fn is_unique(&self) -> bool {
        self.paths.len() == 1 && !self.truncated
    }
}

/// Extracts every optimal warping path (up to `cap`).
///
/// A backward sweep over the accumulated cost matrix marks, for each cell
/// lying on some optimal path, every predecessor whose accumulated value
/// ties the minimum predecessor under `tol`. Paths are then listed by a
/// depth-first walk from `(1, 1)` over the marked edges in step order, which
/// yields them in lexicographic order; at most `cap` are kept and
/// `truncated` records whether more exist.
pub fn all_optimal_paths(
    x: &TimeSeries,
    y: &TimeSeries,
    tol: &Tolerance,
    cap: usize,
) -> Result<OptimalPathSet> {
    tol.validate()?;
    tol.check_inputs(x, y)?;
    let acm = AccumulatedCostMatrix::compute(x, y)?;
    let graph = OptimalEdges::mark(&acm, tol);
    let (paths, truncated) = graph.list_paths(cap.max(1));
    Ok(OptimalPathSet {
        optimal_cost: acm.total(),
        paths,
        truncated,
    })
}

/// True iff `x` and `y` have exactly one optimal warping path.
pub fn is_unique_optimal(x: &TimeSeries, y: &TimeSeries, tol: &Tolerance) -> Result<bool> {
    Ok(all_optimal_paths(x, y, tol, 2)?.is_unique())
}

/// Incoming optimal edges per cell, indexed by the step that enters it.
struct OptimalEdges {
    rows: usize,
    cols: usize,
    incoming: Vec<[bool; 3]>,
}

impl OptimalEdges {
    fn mark(acm: &AccumulatedCostMatrix, tol: &Tolerance) -> Self {
        let (rows, cols) = acm.shape();
        let mut on_path = vec![false; rows * cols];
        let mut incoming = vec![[false; 3]; rows * cols];
        on_path[rows * cols - 1] = true;
        // predecessors precede a cell in row-major order
        for idx in (0..rows * cols).rev() {
            if !on_path[idx] || idx == 0 {
                continue;
            }
            let (r, c) = (idx / cols, idx % cols);
            let preds: Vec<(Step, usize, usize)> = Step::ALL
                .iter()
                .filter_map(|&s| {
                    let (dr, dc) = s.offset();
                    Some((s, r.checked_sub(dr)?, c.checked_sub(dc)?))
                })
                .collect();
            let best = preds
                .iter()
                .map(|&(_, pr, pc)| acm.at(pr, pc))
                .fold(f64::INFINITY, f64::min);
            for (s, pr, pc) in preds {
                if tol.ties(acm.at(pr, pc), best) {
                    incoming[idx][s as usize] = true;
                    on_path[pr * cols + pc] = true;
                }
            }
        }
        Self {
            rows,
            cols,
            incoming,
        }
    }

    fn list_paths(&self, cap: usize) -> (Vec<WarpingPath>, bool) {
        let cols = self.cols;
        let mut walk = LatticeWalk::new(self.rows, cols, |r, c, step| {
            self.incoming[r * cols + c][step as usize]
        });
        let found: Vec<_> = walk.by_ref().take(cap).collect();
        let truncated = walk.next().is_some();
        (found, truncated)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(v: &[f64]) -> TimeSeries {
        TimeSeries::univariate(v).unwrap()
    }

    #[test]
    fn path_cost_examples() {
        let diag = WarpingPath::diagonal(2).unwrap();
        assert_eq!(
            path_cost(&uni(&[1.0, 2.0]), &uni(&[3.0, 5.0]), &diag).unwrap(),
            13.0
        );
        assert_eq!(
            path_cost(&uni(&[1.0, 2.0]), &uni(&[1.0, 2.0]), &diag).unwrap(),
            0.0
        );
        let p = WarpingPath::new(1, 2, vec![(1, 1), (1, 2)]).unwrap();
        assert_eq!(
            path_cost(&uni(&[1.0]), &uni(&[4.0, 4.0]), &p).unwrap(),
            18.0
        );
    }

    #[test]
    fn path_cost_errors() {
        let diag = WarpingPath::diagonal(2).unwrap();
        let x2 = TimeSeries::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            path_cost(&uni(&[1.0, 2.0]), &x2, &diag),
            Err(crate::Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            path_cost(&uni(&[1.0, 2.0, 3.0]), &uni(&[1.0, 2.0]), &diag),
            Err(crate::Error::LatticeMismatch { .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let x = uni(&[1.0, 2.0, 3.0]);
        assert_eq!(dtw_distance(&x, &x).unwrap(), 0.0);
        assert_eq!(
            dtw_distance(&uni(&[1.0]), &uni(&[4.0, 4.0])).unwrap(),
            18f64.sqrt()
        );
    }

    #[test]
    fn accumulated_matrix_recurrence() {
        let x = uni(&[0.0, 1.0, 3.0]);
        let y = uni(&[1.0, 2.0]);
        let acm = AccumulatedCostMatrix::compute(&x, &y).unwrap();
        assert_eq!(acm.cell(1, 1), 1.0);
        assert_eq!(acm.cell(1, 2), 5.0);
        assert_eq!(acm.cell(2, 1), 1.0);
        assert_eq!(acm.cell(2, 2), 2.0);
        assert_eq!(acm.cell(3, 1), 5.0);
        assert_eq!(acm.cell(3, 2), 2.0);
        assert_eq!(acm.total(), 2.0);
    }

    #[test]
    fn identical_increasing_series_have_unique_diagonal() {
        let x = uni(&[1.0, 2.0, 3.0]);
        let set = all_optimal_paths(&x, &x, &Tolerance::default(), DEFAULT_PATH_CAP).unwrap();
        assert_eq!(set.paths, vec![WarpingPath::diagonal(3).unwrap()]);
        assert!(!set.truncated);
        assert!(is_unique_optimal(&x, &x, &Tolerance::default()).unwrap());
    }

    #[test]
    fn constant_pair_has_all_three_paths() {
        let x = uni(&[2.0, 2.0]);
        let set = all_optimal_paths(&x, &x, &Tolerance::default(), DEFAULT_PATH_CAP).unwrap();
        assert_eq!(set.optimal_cost, 0.0);
        let listed: Vec<_> = set.paths.iter().map(|p| p.points().to_vec()).collect();
        assert_eq!(
            listed,
            vec![
                vec![(1, 1), (1, 2), (2, 2)],
                vec![(1, 1), (2, 1), (2, 2)],
                vec![(1, 1), (2, 2)],
            ]
        );
        assert!(!is_unique_optimal(&x, &x, &Tolerance::default()).unwrap());
    }

    #[test]
    fn single_path_lattices() {
        let set =
            all_optimal_paths(&uni(&[1.0]), &uni(&[4.0, 4.0]), &Tolerance::default(), 5).unwrap();
        assert_eq!(set.paths.len(), 1);
        assert!(set.is_unique());
        let set = all_optimal_paths(
            &uni(&[1.0, 2.0, 7.0]),
            &uni(&[0.0]),
            &Tolerance::default(),
            5,
        )
        .unwrap();
        assert_eq!(set.paths[0].points(), &[(1, 1), (2, 1), (3, 1)]);
    }

    #[test]
    fn cap_truncates_and_flags() {
        let x = uni(&[0.0; 3]);
        let all = all_optimal_paths(&x, &x, &Tolerance::default(), 100).unwrap();
        assert_eq!(all.paths.len(), 13);
        assert!(!all.truncated);
        let capped = all_optimal_paths(&x, &x, &Tolerance::default(), 13).unwrap();
        assert_eq!(capped.paths.len(), 13);
        assert!(!capped.truncated);
        let capped = all_optimal_paths(&x, &x, &Tolerance::default(), 5).unwrap();
        assert_eq!(capped.paths, all.paths[..5].to_vec());
        assert!(capped.truncated);
        assert!(!capped.is_unique());
    }

    #[test]
    fn exact_mode_requires_integers() {
        let x = uni(&[0.5, 1.0]);
        assert!(all_optimal_paths(&x, &x, &Tolerance::exact(), 10).is_err());
        let x = uni(&[1.0, 3.0]);
        assert!(all_optimal_paths(&x, &x, &Tolerance::exact(), 10).is_ok());
    }

    #[test]
    fn multivariate_uses_euclidean_local_cost() {
        let x = TimeSeries::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        let y = TimeSeries::new(vec![vec![1.0, 2.0]]).unwrap();
        // (0,0)-(1,2): 5, (1,1)-(1,2): 1
        assert_eq!(dtw_distance_sq(&x, &y).unwrap(), 6.0);
    }
}
