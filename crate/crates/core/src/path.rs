//! Warping paths on the `(m x n)` lattice.

use serde::Serialize;

use crate::{Error, Result};

/// One move between consecutive path points.
///
/// The derived ordering (`East < South < Diagonal`) is the step order used
/// for every deterministic path listing in the crate. It coincides with the
/// lexicographic order of the 1-based point sequences, so sorting
/// [`WarpingPath`]s on one lattice reproduces the listing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Step {
    /// `(0, 1)`
    East,
    /// `(1, 0)`
    South,
    /// `(1, 1)`
    Diagonal,
}

impl Step {
    pub const ALL: [Step; 3] = [Step::East, Step::South, Step::Diagonal];

    #[inline]
    pub fn offset(self) -> (usize, usize) {
        match self {
            Step::Diagonal => (1, 1),
            Step::East => (0, 1),
            Step::South => (1, 0),
        }
    }

    fn between(a: (usize, usize), b: (usize, usize)) -> Option<Step> {
        match (b.0.checked_sub(a.0)?, b.1.checked_sub(a.1)?) {
            (1, 1) => Some(Step::Diagonal),
            (0, 1) => Some(Step::East),
            (1, 0) => Some(Step::South),
            _ => None,
        }
    }
}

/// True iff `points` is a warping path on the `(m x n)` lattice: it starts
/// at `(1, 1)`, ends at `(m, n)` and every step is east, south or southeast.
pub fn validate_path(points: &[(usize, usize)], m: usize, n: usize) -> bool {
    check_points(points, m, n).is_ok()
}

fn check_points(points: &[(usize, usize)], m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidPath(format!("empty lattice {m}x{n}")));
    }
    match (points.first(), points.last()) {
        (Some(&(1, 1)), Some(&last)) if last == (m, n) => {}
        (Some(&first), Some(&last)) => {
            return Err(Error::InvalidPath(format!(
                "boundary condition violated: path runs {first:?} -> {last:?}, expected (1, 1) -> ({m}, {n})"
            )))
        }
        _ => return Err(Error::InvalidPath("path has no points".into())),
    }
    for (l, w) in points.windows(2).enumerate() {
        if Step::between(w[0], w[1]).is_none() {
            return Err(Error::InvalidPath(format!(
                "step condition violated between points {} and {}: {:?} -> {:?}",
                l + 1,
                l + 2,
                w[0],
                w[1]
            )));
        }
    }
    Ok(())
}

/// A validated warping path. Points are 1-based `(i, j)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WarpingPath {
    #[serde(skip)]
    m: usize,
    #[serde(skip)]
    n: usize,
    points: Vec<(usize, usize)>,
}

impl WarpingPath {
    pub fn new(m: usize, n: usize, points: Vec<(usize, usize)>) -> Result<Self> {
        check_points(&points, m, n)?;
        Ok(Self { m, n, points })
    }

    /// Builds the path that starts at `(1, 1)` and follows `steps`, checking
    /// that it ends at `(m, n)`.
    pub fn from_steps(m: usize, n: usize, steps: &[Step]) -> Result<Self> {
        let mut points = Vec::with_capacity(steps.len() + 1);
        let mut at = (1, 1);
        points.push(at);
        for step in steps {
            let (di, dj) = step.offset();
            at = (at.0 + di, at.1 + dj);
            points.push(at);
        }
        Self::new(m, n, points)
    }

    /// Trusted constructor for paths produced by lattice walks in this crate.
    pub(crate) fn from_points_unchecked(m: usize, n: usize, points: Vec<(usize, usize)>) -> Self {
        debug_assert!(validate_path(&points, m, n), "{points:?} on {m}x{n}");
        Self { m, n, points }
    }

    /// The diagonal path on the `(len x len)` lattice.
    pub fn diagonal(len: usize) -> Result<Self> {
        Self::new(len, len, (1..=len).map(|k| (k, k)).collect())
    }

    pub fn points(&self) -> &[(usize, usize)] {
        &self.points
    }

    pub fn lattice(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// Number of points `L`; `max(m, n) <= L <= m + n - 1`.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn steps(&self) -> Vec<Step> {
        self.points
            .windows(2)
            .map(|w| Step::between(w[0], w[1]).expect("validated path"))
            .collect()
    }

    /// The same alignment seen from the other series: `(i, j) -> (j, i)`.
    pub fn transpose(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
            points: self.points.iter().map(|&(i, j)| (j, i)).collect(),
        }
    }

    pub(crate) fn check_lattice(&self, m: usize, n: usize) -> Result<()> {
        if (self.m, self.n) != (m, n) {
            return Err(Error::LatticeMismatch {
                expected: (m, n),
                found: (self.m, self.n),
            });
        }
        Ok(())
    }
}

/// Depth-first walk over lattice paths from `(1, 1)` to `(m, n)`.
///
/// `allow(r, c, step)` decides whether the edge entering the 0-based cell
/// `(r, c)` by `step` may be used. Paths are produced lazily in step order,
/// i.e. in lexicographic point order.
pub(crate) struct LatticeWalk<F> {
    rows: usize,
    cols: usize,
    allow: F,
    // (row, col, index of the next step to try)
    stack: Vec<(usize, usize, usize)>,
}

impl<F> LatticeWalk<F>
where
    F: Fn(usize, usize, Step) -> bool,
{
    pub(crate) fn new(rows: usize, cols: usize, allow: F) -> Self {
        Self {
            rows,
            cols,
            allow,
            stack: vec![(0, 0, 0)],
        }
    }
}

impl<F> Iterator for LatticeWalk<F>
where
    F: Fn(usize, usize, Step) -> bool,
{
    type Item = WarpingPath;

    fn next(&mut self) -> Option<WarpingPath> {
        while let Some(top) = self.stack.last_mut() {
            let (r, c, next) = *top;
            if (r, c) == (self.rows - 1, self.cols - 1) {
                let points = self.stack.iter().map(|&(r, c, _)| (r + 1, c + 1)).collect();
                self.stack.pop();
                return Some(WarpingPath::from_points_unchecked(
                    self.rows, self.cols, points,
                ));
            }
            if next == Step::ALL.len() {
                self.stack.pop();
                continue;
            }
            top.2 += 1;
            let step = Step::ALL[next];
            let (dr, dc) = step.offset();
            let (nr, nc) = (r + dr, c + dc);
            if nr < self.rows && nc < self.cols && (self.allow)(nr, nc, step) {
                self.stack.push((nr, nc, 0));
            }
        }
        None
    }
}
