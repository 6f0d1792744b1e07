use rand::seq::SliceRandom;

use super::tomek_within;
use crate::knn::{Geometry, PointSet, ReferenceSet};
use crate::seed::{self, Rng};

/// Condensing for imbalanced data: start from every positive in
/// `candidates` plus one random negative, then make one pass over the
/// remaining negatives in a seeded random order, adding each one that the
/// current store misclassifies.
pub(crate) fn cnn_within(geom: &Geometry<'_>, candidates: &[usize], rng: &mut Rng) -> Vec<usize> {
    let points = geom.points();
    let mut store: Vec<usize> = candidates.iter().copied().filter(|&i| points.label(i).is_positive()).collect();
    let mut negatives: Vec<usize> = candidates.iter().copied().filter(|&i| !points.label(i).is_positive()).collect();
    negatives.shuffle(rng);
    let mut order = negatives.into_iter();
    if let Some(first) = order.next() {
        store.push(first);
    }
    for i in order {
        if points.label(geom.nearest(i, &store)).is_positive() {
            store.push(i);
        }
    }
    store.sort_unstable();
    store
}

pub fn cnn_mod(points: &PointSet, seed: u64) -> ReferenceSet {
    let geom = Geometry::new(points);
    let all: Vec<usize> = (0..points.len()).collect();
    let mut rng = seed::rng(seed);
    ReferenceSet::new(cnn_within(&geom, &all, &mut rng), "CNN", Some(seed))
}

/// One-sided selection: condensing followed by Tomek-link removal.
pub fn oss(points: &PointSet, seed: u64) -> ReferenceSet {
    let geom = Geometry::new(points);
    let all: Vec<usize> = (0..points.len()).collect();
    let mut rng = seed::rng(seed);
    let condensed = cnn_within(&geom, &all, &mut rng);
    ReferenceSet::new(tomek_within(&geom, &condensed), "OSS", Some(seed))
}

/// Tomek-link removal followed by condensing.
pub fn tl_cnn(points: &PointSet, seed: u64) -> ReferenceSet {
    let geom = Geometry::new(points);
    let all: Vec<usize> = (0..points.len()).collect();
    let cleaned = tomek_within(&geom, &all);
    let mut rng = seed::rng(seed);
    ReferenceSet::new(cnn_within(&geom, &cleaned, &mut rng), "TL+CNN", Some(seed))
}
