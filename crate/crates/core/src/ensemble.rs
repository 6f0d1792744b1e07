//! Ensembles of 1-NN classifiers: bagging, ERUS, RUSBoost and EUSBoost.
//!
//! Boosting uses the two-class reduction of the AdaBoost.M2 pseudo-loss: with
//! hard votes it is the weighted training error `eps`. Each round sets
//! `beta = eps / (1 - eps)` (floored at 1e-10), multiplies the weights of
//! correctly classified instances by `beta`, renormalises, and gives the
//! member a vote of `ln(1 / beta)`. A round with `eps >= 0.5` is redrawn with
//! a fresh seed up to 10 times before boosting stops early; a round with
//! `eps = 0` is kept and ends boosting.

use rand::Rng as _;

use crate::data::Class;
use crate::knn::{Geometry, NearestNeighbor, PointSet, ReferenceSet};
use crate::seed::{self, member_seed, splitmix64};
use crate::selection::{self, EusParams};
use crate::{Error, Result};

pub const BAGGING_SIZE: usize = 100;
pub const BOOSTING_SIZE: usize = 10;
const MAX_RETRIES: usize = 10;
const BETA_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleModel {
    pub method: String,
    pub members: Vec<ReferenceSet>,
    pub weights: Vec<f64>,
}

impl EnsembleModel {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Weighted vote of the members' 1-NN labels; ties go to the positive class.
    pub fn predict(&self, train: &PointSet, x: &[f64]) -> Result<Class> {
        if self.members.is_empty() {
            return Err(Error::InvalidArgument("ensemble has no members".into()));
        }
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for (member, &w) in self.members.iter().zip(&self.weights) {
            match NearestNeighbor::new(train, &member.retained)?.classify(x) {
                Class::Positive => pos.push(w),
                Class::Negative => neg.push(w),
            }
        }
        Ok(if ordered_sum(pos) >= ordered_sum(neg) { Class::Positive } else { Class::Negative })
    }

    /// Mean member size, rounded.
    pub fn mean_member_size(&self) -> usize {
        if self.members.is_empty() {
            return 0;
        }
        let total: usize = self.members.iter().map(ReferenceSet::len).sum();
        (total as f64 / self.members.len() as f64).round() as usize
    }
}

/// Sum in ascending order so the result does not depend on member order.
fn ordered_sum(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs.iter().sum()
}

pub fn predict_ensemble(model: &EnsembleModel, train: &PointSet, x: &[f64]) -> Result<Class> {
    model.predict(train, x)
}

fn has_both(points: &PointSet, idx: &[usize]) -> bool {
    let pos = idx.iter().filter(|&&i| points.label(i).is_positive()).count();
    pos > 0 && pos < idx.len()
}

/// Bagging: each member is a bootstrap sample of the training set, redrawn
/// until it holds both classes.
pub fn bag_1nn(points: &PointSet, size: usize, seed: u64) -> Result<EnsembleModel> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("cannot bag an empty training set".into()));
    }
    let two_classes = points.n_pos() > 0 && points.n_neg() > 0;
    let members = (0..size)
        .map(|t| {
            let s = member_seed(seed, t);
            let mut rng = seed::rng(s);
            let draw = loop {
                let d: Vec<usize> = (0..points.len()).map(|_| rng.random_range(0..points.len())).collect();
                if !two_classes || has_both(points, &d) {
                    break d;
                }
            };
            ReferenceSet::new(draw, "BAG1NN", Some(s))
        })
        .collect();
    Ok(EnsembleModel { method: "BAG1NN".into(), members, weights: vec![1.0; size] })
}

/// Ensemble of independent random undersamplings with equal votes.
pub fn erus(points: &PointSet, size: usize, seed: u64) -> EnsembleModel {
    let members = (0..size).map(|t| selection::rus(points, member_seed(seed, t))).collect();
    EnsembleModel { method: "ERUS".into(), members, weights: vec![1.0; size] }
}

pub fn rusboost(points: &PointSet, size: usize, seed: u64) -> EnsembleModel {
    rusboost_traced(points, size, seed).model
}

/// RUSBoost members are 1-NN over a weighted undersample: every positive
/// plus `n_pos` negatives drawn without replacement proportionally to weight.
pub fn rusboost_traced(points: &PointSet, size: usize, seed: u64) -> Boosted {
    let geom = Geometry::new(points);
    boost(&geom, size, seed, "RUSBOOST", |_, w, s| {
        let mut rng = seed::rng(s);
        selection::rus_weighted(points, w, &mut rng)
    })
}

pub fn eusboost(points: &PointSet, size: usize, params: &EusParams, seed: u64) -> EnsembleModel {
    eusboost_traced(points, size, params, seed).model
}

/// EUSBoost members come from EUS whose leave-one-out GM weighs each
/// training instance by its current boosting weight.
pub fn eusboost_traced(points: &PointSet, size: usize, params: &EusParams, seed: u64) -> Boosted {
    let geom = Geometry::new(points);
    boost(&geom, size, seed, "EUSBOOST", |g, w, s| selection::eus_geom(g, params, w, s))
}

/// A boosted model together with its per-round training state.
#[derive(Debug, Clone)]
pub struct Boosted {
    pub model: EnsembleModel,
    /// Instance weights after each kept round.
    pub weight_history: Vec<Vec<f64>>,
    pub errors: Vec<f64>,
}

/// `base(geometry, weights, seed)` returns a member's retained indices.
/// The first round passes `None` (uniform weights) and the unmodified seed,
/// so a one-round ensemble reproduces its base method exactly.
pub(crate) fn boost<F>(geom: &Geometry<'_>, size: usize, seed: u64, tag: &str, base: F) -> Boosted
where
    F: Fn(&Geometry<'_>, Option<&[f64]>, u64) -> Vec<usize>,
{
    let points = geom.points();
    let n = points.len();
    let mut weights = vec![1.0 / n as f64; n];
    let mut members = Vec::new();
    let mut votes = Vec::new();
    let mut weight_history = Vec::new();
    let mut errors = Vec::new();

    'rounds: for t in 0..size {
        let mut attempt = 0;
        let (retained, s, correct, eps) = loop {
            let s = if attempt == 0 { member_seed(seed, t) } else { splitmix64(member_seed(seed, t) ^ attempt as u64) };
            let retained = base(geom, (t > 0).then_some(weights.as_slice()), s);
            let correct: Vec<bool> =
                (0..n).map(|i| points.label(geom.nearest(i, &retained)) == points.label(i)).collect();
            let eps: f64 = (0..n).filter(|&i| !correct[i]).map(|i| weights[i]).sum();
            if eps < 0.5 {
                break (retained, s, correct, eps);
            }
            attempt += 1;
            if attempt > MAX_RETRIES {
                log::info!("{tag}: round {t} stayed at error >= 0.5 after {MAX_RETRIES} redraws; stopping early");
                break 'rounds;
            }
        };
        let beta = (eps / (1.0 - eps)).max(BETA_FLOOR);
        members.push(ReferenceSet::new(retained, tag, Some(s)));
        votes.push((1.0 / beta).ln());
        errors.push(eps);
        for i in 0..n {
            if correct[i] {
                weights[i] *= beta;
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        weight_history.push(weights.clone());
        if eps == 0.0 {
            log::debug!("{tag}: round {t} is perfect on the training set; stopping");
            break;
        }
    }
    Boosted { model: EnsembleModel { method: tag.into(), members, weights: votes }, weight_history, errors }
}
