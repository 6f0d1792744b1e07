use rand::Rng as _;

use super::split_classes;
use crate::knn::{PointSet, ReferenceSet};
use crate::seed::{self, Rng};

/// Draws `k` of `negatives` without replacement, each with probability
/// proportional to its weight (Efraimidis-Spirakis keys). `weights` is
/// indexed by point index; `None` means uniform.
pub fn undersample_negatives(negatives: &[usize], weights: Option<&[f64]>, k: usize, rng: &mut Rng) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = negatives
        .iter()
        .map(|&i| {
            let u: f64 = 1.0 - rng.random::<f64>();
            let w = weights.map_or(1.0, |w| w[i]);
            let key = if w > 0.0 { u.ln() / w } else { f64::NEG_INFINITY };
            (key, i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<usize> = keyed.into_iter().take(k).map(|(_, i)| i).collect();
    chosen.sort_unstable();
    chosen
}

/// Random undersampling: every positive plus `n_pos` random negatives.
pub fn rus(points: &PointSet, seed: u64) -> ReferenceSet {
    let mut rng = seed::rng(seed);
    ReferenceSet::new(rus_weighted(points, None, &mut rng), "RUS", Some(seed))
}

pub(crate) fn rus_weighted(points: &PointSet, weights: Option<&[f64]>, rng: &mut Rng) -> Vec<usize> {
    let (pos, neg) = split_classes(points);
    if neg.len() < pos.len() {
        log::warn!("RUS: fewer negatives ({}) than positives ({}); keeping all", neg.len(), pos.len());
    }
    let mut retained = undersample_negatives(&neg, weights, pos.len(), rng);
    retained.extend_from_slice(&pos);
    retained
}
