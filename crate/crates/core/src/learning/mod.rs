//! Gradient-based learning in DTW space.
//!
//! For a fixed warping path `p`, `C_p(x, z)` is a smooth quadratic in `z`.
//! Wherever the optimal path between `x` and `z` is unique, `delta(x, z)^2`
//! coincides with `C_p*(x, z)` near `z` and its gradient is the gradient of
//! that quadratic. At pairs with several optimal paths the gradients along
//! different optimal paths can disagree; [`TiePolicy`] picks one of them.

mod averaging;
mod lvq;

use rand::Rng;
use serde::Serialize;

use crate::dtw::{all_optimal_paths, dtw_distance_sq, DEFAULT_PATH_CAP};
use crate::{Error, Result, TimeSeries, Tolerance, WarpingPath};

pub use averaging::{medoid_init, ssg_average, AveragingResult, SsgConfig, StepSchedule};
pub use lvq::{
    classify, closest_prototype, hypothesis_margin, lvq1_update, train_lvq1, Codebook,
    LvqTrainConfig, LvqTraining, LvqUpdate, Prototype,
};

/// Loss applied to DTW distances in the averaging objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    /// `l(a) = a`
    Identity,
    /// `l(a) = a^2`
    Squared,
}

impl Loss {
    #[inline]
    pub fn value(self, a: f64) -> f64 {
        match self {
            Loss::Identity => a,
            Loss::Squared => a * a,
        }
    }

    #[inline]
    pub fn derivative(self, a: f64) -> f64 {
        match self {
            Loss::Identity => 1.0,
            Loss::Squared => 2.0 * a,
        }
    }
}

/// Which optimal path to follow when several exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TiePolicy {
    /// The lexicographically first optimal path.
    First,
    /// Uniformly among the (capped) optimal paths.
    RandomAmongOptimal,
}

/// How the per-example loss gradient is formed from the path gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientRule {
    /// `l'(C_p*(x, z)) * grad C_p*(x, z)`.
    Printed,
    /// `l'(delta) * grad C_p*(x, z) / (2 delta)`, the chain rule through
    /// `delta = sqrt(C_p*)`; zero where `delta == 0`.
    ChainRuleStrict,
}

/// Gradient of `C_p(x, z)` with respect to `z`:
/// `g_j = sum over (i, j) in p of 2 (z_j - x_i)`, i.e. `2 (V̄ z - W̄ x)` per
/// component.
pub fn grad_path_cost(x: &TimeSeries, z: &TimeSeries, p: &WarpingPath) -> Result<TimeSeries> {
    x.check_same_dim(z)?;
    p.check_lattice(x.len(), z.len())?;
    let d = z.dim();
    let mut grad = vec![0.0; z.len() * d];
    for &(i, j) in p.points() {
        let (xi, zj) = (x.get(i - 1), z.get(j - 1));
        for k in 0..d {
            grad[(j - 1) * d + k] += 2.0 * (zj[k] - xi[k]);
        }
    }
    TimeSeries::from_flat(z.len(), d, grad)
}

/// Gradient of `delta(x, .)^2` at `z` along a chosen optimal path.
#[derive(Debug, Clone, PartialEq)]
pub struct DtwGradient {
    pub gradient: TimeSeries,
    pub path: WarpingPath,
    /// Squared DTW distance at `z`.
    pub cost: f64,
    /// When true the gradient is the gradient of `delta(x, .)^2`; otherwise
    /// it is one candidate among several.
    pub was_unique: bool,
}

pub fn grad_dtw_sq<R: Rng + ?Sized>(
    x: &TimeSeries,
    z: &TimeSeries,
    tol: &Tolerance,
    policy: TiePolicy,
    rng: &mut R,
) -> Result<DtwGradient> {
    let cap = match policy {
        TiePolicy::First => 2,
        TiePolicy::RandomAmongOptimal => DEFAULT_PATH_CAP,
    };
    let set = all_optimal_paths(x, z, tol, cap)?;
    let was_unique = set.is_unique();
    let chosen = match policy {
        TiePolicy::First => 0,
        TiePolicy::RandomAmongOptimal if set.paths.len() > 1 => {
            rng.random_range(0..set.paths.len())
        }
        TiePolicy::RandomAmongOptimal => 0,
    };
    let path = set
        .paths
        .into_iter()
        .nth(chosen)
        .expect("path set is never empty");
    Ok(DtwGradient {
        gradient: grad_path_cost(x, z, &path)?,
        path,
        cost: set.optimal_cost,
        was_unique,
    })
}

/// `J(z) = (1/N) sum_k l(delta(x_k, z))`.
pub fn cost_j(sample: &[TimeSeries], z: &TimeSeries, loss: Loss) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let total = sample
        .iter()
        .map(|x| dtw_distance_sq(x, z).map(|c| loss.value(c.sqrt())))
        .sum::<Result<f64>>()?;
    Ok(total / sample.len() as f64)
}

/// Per-example update direction (the quantity subtracted from `z`, before
/// the step size) under `rule`.
pub(crate) fn loss_gradient(
    step: &DtwGradient,
    loss: Loss,
    rule: GradientRule,
) -> Result<TimeSeries> {
    let scale = match rule {
        GradientRule::Printed => loss.derivative(step.cost),
        GradientRule::ChainRuleStrict => {
            let delta = step.cost.sqrt();
            if delta == 0.0 {
                0.0
            } else {
                loss.derivative(delta) / (2.0 * delta)
            }
        }
    };
    let g = &step.gradient;
    TimeSeries::from_flat(
        g.len(),
        g.dim(),
        g.as_flat().iter().map(|v| scale * v).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::path_algebra;
    use crate::random::rng_from_seed;

    fn uni(v: &[f64]) -> TimeSeries {
        TimeSeries::univariate(v).unwrap()
    }

    #[test]
    fn losses() {
        assert_eq!(Loss::Identity.value(3.0), 3.0);
        assert_eq!(Loss::Identity.derivative(3.0), 1.0);
        assert_eq!(Loss::Squared.value(3.0), 9.0);
        assert_eq!(Loss::Squared.derivative(3.0), 6.0);
    }

    #[test]
    fn diagonal_gradient_is_twice_the_difference() {
        let x = uni(&[1.0, -2.0, 0.5]);
        let z = uni(&[0.0, 1.0, 2.0]);
        let g = grad_path_cost(&x, &z, &WarpingPath::diagonal(3).unwrap()).unwrap();
        assert_eq!(g.as_flat(), &[-2.0, 6.0, 3.0]);
    }

    #[test]
    fn gradient_matches_matrix_form() {
        let x = uni(&[1.0, 4.0, -1.0, 2.0]);
        let z = uni(&[0.5, 2.0, 3.0]);
        let p = WarpingPath::new(4, 3, vec![(1, 1), (2, 1), (3, 2), (4, 3)]).unwrap();
        let alg = path_algebra(&p);
        let zv = ndarray::Array1::from(z.as_flat().to_vec());
        let xv = ndarray::Array1::from(x.as_flat().to_vec());
        let expected = 2.0
            * (alg.co_valence.mapv(|v| v as f64).dot(&zv)
                - alg.co_warping.mapv(|v| v as f64).dot(&xv));
        let g = grad_path_cost(&x, &z, &p).unwrap();
        for (a, b) in g.as_flat().iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn warped_mean_is_stationary() {
        // p aligns z_1 with x_1, x_2 and z_2 with x_3: V̄ z = W̄ x gives
        // z_1 = (x_1 + x_2) / 2, z_2 = x_3
        let x = uni(&[1.0, 3.0, 5.0]);
        let z = uni(&[2.0, 5.0]);
        let p = WarpingPath::new(3, 2, vec![(1, 1), (2, 1), (3, 2)]).unwrap();
        let g = grad_path_cost(&x, &z, &p).unwrap();
        assert!(g.as_flat().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_at_identical_series_vanishes() {
        let x = uni(&[1.0, 2.0, 3.0]);
        let step = grad_dtw_sq(
            &x,
            &x,
            &Tolerance::default(),
            TiePolicy::First,
            &mut rng_from_seed(0),
        )
        .unwrap();
        assert!(step.was_unique);
        assert!(step.gradient.as_flat().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_pair_is_flagged() {
        let c = uni(&[2.0, 2.0]);
        let mut rng = rng_from_seed(9);
        let step = grad_dtw_sq(
            &c,
            &c,
            &Tolerance::default(),
            TiePolicy::RandomAmongOptimal,
            &mut rng,
        )
        .unwrap();
        assert!(!step.was_unique);
        assert!(crate::validate_path(step.path.points(), 2, 2));
    }

    #[test]
    fn random_policy_reaches_every_optimal_path() {
        let c = uni(&[0.0; 3]);
        let mut rng = rng_from_seed(1);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..400 {
            let step = grad_dtw_sq(
                &c,
                &c,
                &Tolerance::exact(),
                TiePolicy::RandomAmongOptimal,
                &mut rng,
            )
            .unwrap();
            seen.insert(step.path);
        }
        assert_eq!(seen.len(), 13);
    }

    #[test]
    fn cost_j_examples() {
        let z = uni(&[1.0, 5.0, 2.0]);
        assert_eq!(
            cost_j(std::slice::from_ref(&z), &z, Loss::Identity).unwrap(),
            0.0
        );
        assert_eq!(
            cost_j(std::slice::from_ref(&z), &z, Loss::Squared).unwrap(),
            0.0
        );
        let x = uni(&[0.0, 5.0]);
        let d2 = dtw_distance_sq(&x, &z).unwrap();
        assert!((cost_j(std::slice::from_ref(&x), &z, Loss::Squared).unwrap() - d2).abs() < 1e-12);
        assert!((cost_j(&[x], &z, Loss::Identity).unwrap() - d2.sqrt()).abs() < 1e-12);
        assert_eq!(cost_j(&[], &z, Loss::Squared), Err(Error::EmptySample));
    }

    #[test]
    fn gradient_rules() {
        let x = uni(&[0.0, 0.0]);
        let z = uni(&[1.0, 1.0]);
        let step = grad_dtw_sq(
            &x,
            &z,
            &Tolerance::default(),
            TiePolicy::First,
            &mut rng_from_seed(0),
        )
        .unwrap();
        // C = 2, grad C = (2, 2)
        assert_eq!(step.cost, 2.0);
        let printed = loss_gradient(&step, Loss::Squared, GradientRule::Printed).unwrap();
        assert_eq!(printed.as_flat(), &[8.0, 8.0]);
        let strict = loss_gradient(&step, Loss::Squared, GradientRule::ChainRuleStrict).unwrap();
        assert!((strict.as_flat()[0] - 2.0).abs() < 1e-12);
        let strict_id =
            loss_gradient(&step, Loss::Identity, GradientRule::ChainRuleStrict).unwrap();
        assert!((strict_id.as_flat()[0] - 2.0 / (2.0 * 2f64.sqrt())).abs() < 1e-12);
    }
}
