//! LVQ1 with squared DTW distance.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::Serialize;

use super::{grad_dtw_sq, TiePolicy};
use crate::dtw::dtw_distance_sq;
use crate::random::rng_from_seed;
use crate::{Error, Result, TimeSeries, Tolerance, WarpingPath};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prototype {
    pub series: TimeSeries,
    pub label: u32,
}

/// Labelled prototypes; non-empty, all of one dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Codebook {
    prototypes: Vec<Prototype>,
}

impl Codebook {
    pub fn new(prototypes: Vec<Prototype>) -> Result<Self> {
        let first = prototypes.first().ok_or(Error::EmptyCodebook)?;
        for p in &prototypes {
            first.series.check_same_dim(&p.series)?;
        }
        Ok(Self { prototypes })
    }

    pub fn prototypes(&self) -> &[Prototype] {
        &self.prototypes
    }

    pub fn len(&self) -> usize {
        self.prototypes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prototypes.is_empty()
    }
}

/// Index of the prototype closest to `x` in squared DTW distance, and that
/// distance. Ties (under `tol`) go to the lowest index.
pub fn closest_prototype(
    codebook: &Codebook,
    x: &TimeSeries,
    tol: &Tolerance,
) -> Result<(usize, f64)> {
    let dists = distances(codebook, x)?;
    Ok(closest_among(&dists, 0..dists.len(), tol).expect("codebook is non-empty"))
}

pub fn classify(codebook: &Codebook, x: &TimeSeries, tol: &Tolerance) -> Result<u32> {
    let (c, _) = closest_prototype(codebook, x, tol)?;
    Ok(codebook.prototypes[c].label)
}

fn distances(codebook: &Codebook, x: &TimeSeries) -> Result<Vec<f64>> {
    codebook
        .prototypes
        .iter()
        .map(|p| dtw_distance_sq(x, &p.series))
        .collect()
}

fn closest_among(
    dists: &[f64],
    candidates: impl Iterator<Item = usize> + Clone,
    tol: &Tolerance,
) -> Option<(usize, f64)> {
    let best = candidates
        .clone()
        .map(|k| dists[k])
        .fold(f64::INFINITY, f64::min);
    candidates
        .into_iter()
        .find(|&k| tol.ties(dists[k], best))
        .map(|k| (k, dists[k]))
}

/// What one LVQ1 step did.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LvqUpdate {
    pub winner: usize,
    pub winner_label: u32,
    /// True when labels agreed and the winner moved towards the example.
    pub attracted: bool,
    /// Whether the optimal path used for the update was unique. Repelling
    /// along a non-unique path has no margin guarantee.
    pub unique_path: bool,
    pub path: WarpingPath,
    /// Squared DTW distance to the winner before the update.
    pub distance_sq: f64,
}

/// One LVQ1 step in DTW space.
///
/// The closest prototype `p_c` moves along the aligned difference
/// `W̄ x - V̄ p_c` of the first optimal path (`-1/2` times the gradient of
/// `C_p*(x, .)` at `p_c`): towards `x` when labels agree, away otherwise.
/// Along the diagonal path this is the Euclidean rule `p_c +- eta (x - p_c)`.
pub fn lvq1_update(
    codebook: &Codebook,
    x: &TimeSeries,
    label: u32,
    eta: f64,
    tol: &Tolerance,
) -> Result<(Codebook, LvqUpdate)> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "learning rate must be > 0, got {eta}"
        )));
    }
    let (winner, distance_sq) = closest_prototype(codebook, x, tol)?;
    let proto = &codebook.prototypes[winner];
    // the first-path policy never draws from the generator
    let step = grad_dtw_sq(
        x,
        &proto.series,
        tol,
        TiePolicy::First,
        &mut rng_from_seed(0),
    )?;
    let attracted = proto.label == label;
    let sign = if attracted { 1.0 } else { -1.0 };
    let moved = proto
        .series
        .as_flat()
        .iter()
        .zip(step.gradient.as_flat())
        .map(|(p, g)| p + sign * eta * (-0.5 * g))
        .collect();
    let mut next = codebook.clone();
    next.prototypes[winner].series =
        TimeSeries::from_flat(proto.series.len(), proto.series.dim(), moved)?;
    Ok((
        next,
        LvqUpdate {
            winner,
            winner_label: proto.label,
            attracted,
            unique_path: step.was_unique,
            path: step.path,
            distance_sq,
        },
    ))
}

/// Hypothesis margin of `(x, label)` with squared DTW distances:
/// `d(x, p-) - d(x, p_c)` when the closest prototype `p_c` has the example's
/// label, `d(x, p_c) - d(x, p+)` otherwise, where `p+`/`p-` are the closest
/// prototypes with the same/a different label.
pub fn hypothesis_margin(
    codebook: &Codebook,
    x: &TimeSeries,
    label: u32,
    tol: &Tolerance,
) -> Result<f64> {
    let dists = distances(codebook, x)?;
    let labels: Vec<u32> = codebook.prototypes.iter().map(|p| p.label).collect();
    let same = (0..dists.len()).filter(|&k| labels[k] == label);
    let other = (0..dists.len()).filter(|&k| labels[k] != label);
    let (_, d_same) =
        closest_among(&dists, same, tol).ok_or(Error::MissingPrototypeClass("the same"))?;
    let (_, d_other) =
        closest_among(&dists, other, tol).ok_or(Error::MissingPrototypeClass("a different"))?;
    let (c, d_c) = closest_among(&dists, 0..dists.len(), tol).expect("codebook is non-empty");
    Ok(if labels[c] == label {
        d_other - d_c
    } else {
        d_c - d_same
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LvqTrainConfig {
    pub prototypes_per_class: usize,
    pub eta: f64,
    pub epochs: usize,
    pub seed: u64,
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LvqTraining {
    pub codebook: Codebook,
    /// Training accuracy after each epoch.
    pub accuracy: Vec<f64>,
    /// Updates made along a non-unique optimal path.
    pub nonunique_updates: usize,
}

/// Trains an LVQ1 codebook. Each class (in ascending label order) is seeded
/// with up to `prototypes_per_class` of its examples drawn without
/// replacement; each epoch visits the data in a fresh seeded order.
pub fn train_lvq1(data: &[(TimeSeries, u32)], config: &LvqTrainConfig) -> Result<LvqTraining> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    if config.prototypes_per_class == 0 || config.epochs == 0 {
        return Err(Error::InvalidArgument(
            "prototypes per class and epochs must be >= 1".into(),
        ));
    }
    let mut rng = rng_from_seed(config.seed);
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (k, (_, label)) in data.iter().enumerate() {
        by_class.entry(*label).or_default().push(k);
    }
    let mut prototypes = Vec::new();
    for (label, mut members) in by_class {
        members.shuffle(&mut rng);
        for &k in members.iter().take(config.prototypes_per_class) {
            prototypes.push(Prototype {
                series: data[k].0.clone(),
                label,
            });
        }
    }
    let mut codebook = Codebook::new(prototypes)?;

    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut accuracy = Vec::with_capacity(config.epochs);
    let mut nonunique_updates = 0;
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &k in &order {
            let (x, label) = &data[k];
            let (next, update) = lvq1_update(&codebook, x, *label, config.eta, &config.tolerance)?;
            if !update.unique_path {
                nonunique_updates += 1;
            }
            codebook = next;
        }
        let correct = data
            .iter()
            .map(|(x, label)| classify(&codebook, x, &config.tolerance).map(|c| c == *label))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .filter(|&ok| ok)
            .count();
        accuracy.push(correct as f64 / data.len() as f64);
    }
    Ok(LvqTraining {
        codebook,
        accuracy,
        nonunique_updates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtw::path_cost;

    fn uni(v: &[f64]) -> TimeSeries {
        TimeSeries::univariate(v).unwrap()
    }

    fn proto(v: &[f64], label: u32) -> Prototype {
        Prototype {
            series: uni(v),
            label,
        }
    }

    #[test]
    fn empty_codebook_rejected() {
        assert_eq!(Codebook::new(vec![]), Err(Error::EmptyCodebook));
    }

    #[test]
    fn matching_prototype_does_not_move() {
        let cb = Codebook::new(vec![proto(&[1.0, 2.0, 3.0], 0), proto(&[9.0, 9.0], 1)]).unwrap();
        let x = uni(&[1.0, 2.0, 3.0]);
        let (next, upd) = lvq1_update(&cb, &x, 0, 0.3, &Tolerance::default()).unwrap();
        assert_eq!(upd.winner, 0);
        assert!(upd.attracted);
        assert!(upd.unique_path);
        assert_eq!(next, cb);
    }

    #[test]
    fn euclidean_rule_on_diagonal() {
        let cb = Codebook::new(vec![proto(&[0.0, 0.0], 0)]).unwrap();
        let x = uni(&[1.0, 2.0]);
        let (next, upd) = lvq1_update(&cb, &x, 0, 0.5, &Tolerance::default()).unwrap();
        assert_eq!(upd.path, WarpingPath::diagonal(2).unwrap());
        assert_eq!(next.prototypes()[0].series.as_flat(), &[0.5, 1.0]);
        let (next, upd) = lvq1_update(&cb, &x, 7, 0.5, &Tolerance::default()).unwrap();
        assert!(!upd.attracted);
        assert_eq!(next.prototypes()[0].series.as_flat(), &[-0.5, -1.0]);
    }

    #[test]
    fn attraction_decreases_path_cost() {
        let cb = Codebook::new(vec![proto(&[0.0, 3.0, 1.0], 0)]).unwrap();
        let x = uni(&[1.0, 2.5, 2.0, 0.0]);
        let (next, upd) = lvq1_update(&cb, &x, 0, 0.1, &Tolerance::default()).unwrap();
        let before = path_cost(&x, &cb.prototypes()[0].series, &upd.path).unwrap();
        let after = path_cost(&x, &next.prototypes()[0].series, &upd.path).unwrap();
        assert!(after < before);
    }

    #[test]
    fn equidistant_prototypes_pick_lowest_index() {
        let cb = Codebook::new(vec![proto(&[1.0], 3), proto(&[-1.0], 1)]).unwrap();
        let x = uni(&[0.0]);
        assert_eq!(
            closest_prototype(&cb, &x, &Tolerance::default()).unwrap(),
            (0, 1.0)
        );
        let (_, upd) = lvq1_update(&cb, &x, 1, 0.1, &Tolerance::default()).unwrap();
        assert_eq!(upd.winner, 0);
        assert_eq!(
            hypothesis_margin(&cb, &x, 1, &Tolerance::default()).unwrap(),
            0.0
        );
        assert_eq!(
            hypothesis_margin(&cb, &x, 3, &Tolerance::default()).unwrap(),
            0.0
        );
    }

    #[test]
    fn margin_with_coinciding_prototype() {
        let cb = Codebook::new(vec![
            proto(&[4.0, 4.0], 1),
            proto(&[0.0, 1.0], 0),
            proto(&[1.0, 1.0], 1),
        ])
        .unwrap();
        let x = uni(&[0.0, 1.0]);
        let expected = dtw_distance_sq(&x, &uni(&[1.0, 1.0])).unwrap();
        assert_eq!(
            hypothesis_margin(&cb, &x, 0, &Tolerance::default()).unwrap(),
            expected
        );
        // misclassified: negative margin
        assert_eq!(
            hypothesis_margin(&cb, &x, 1, &Tolerance::default()).unwrap(),
            -expected
        );
    }

    #[test]
    fn margin_needs_both_classes() {
        let cb = Codebook::new(vec![proto(&[1.0], 0)]).unwrap();
        assert!(matches!(
            hypothesis_margin(&cb, &uni(&[0.0]), 0, &Tolerance::default()),
            Err(Error::MissingPrototypeClass(_))
        ));
        assert!(matches!(
            hypothesis_margin(&cb, &uni(&[0.0]), 5, &Tolerance::default()),
            Err(Error::MissingPrototypeClass(_))
        ));
    }

    #[test]
    fn training_separates_two_classes() {
        let mut data = Vec::new();
        for k in 0..10 {
            let e = k as f64 * 0.01;
            data.push((uni(&[0.0, 1.0 + e, 0.0, 0.0]), 0));
            data.push((uni(&[0.0, 0.0, -1.0 - e, 0.0, 0.0]), 1));
        }
        let cfg = LvqTrainConfig {
            prototypes_per_class: 1,
            eta: 0.1,
            epochs: 3,
            seed: 5,
            tolerance: Tolerance::default(),
        };
        let out = train_lvq1(&data, &cfg).unwrap();
        assert_eq!(out.codebook.len(), 2);
        assert_eq!(out.accuracy.len(), 3);
        assert_eq!(*out.accuracy.last().unwrap(), 1.0);
        assert_eq!(train_lvq1(&data, &cfg).unwrap(), out);
    }
}
