//! Dynamic time warping with complete optimal-path extraction.
//!
//! The crate covers the warping-path machinery end to end:
//!
//! * [`dtw`]: accumulated-cost dynamic programming, path costs and
//!   extraction of *every* optimal warping path with tie detection.
//! * [`enumeration`]: exhaustive path enumeration, exact path counts
//!   (Delannoy numbers) and a brute-force DTW oracle.
//! * [`algebra`]: embedding matrices, valence/warping matrices and the
//!   quadratic-form representation of alignment costs.
//! * [`multipath`]: membership tests for the multi-path and multi
//!   optimal-path sets, zero-set grid scans and Monte Carlo uniqueness runs.
//! * [`learning`]: gradients of DTW costs, stochastic subgradient averaging
//!   and LVQ1 in DTW space.
//!
//! Warping-path points are 1-based `(i, j)` pairs everywhere in the public
//! interface. Series elements are accessed through ordinary 0-based slices.

pub mod algebra;
pub mod dtw;
pub mod enumeration;
mod error;
pub mod learning;
pub mod multipath;
pub mod path;
pub mod random;
pub mod series;
pub mod tolerance;

pub use error::{Error, Result};
pub use path::{validate_path, Step, WarpingPath};
pub use series::TimeSeries;
pub use tolerance::Tolerance;
