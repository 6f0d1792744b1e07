use crate::knn::{Geometry, PointSet, ReferenceSet};

/// Removes the negative member of every Tomek link among `candidates`.
/// A Tomek link is a cross-class pair of mutual nearest neighbours.
pub(crate) fn tomek_within(geom: &Geometry<'_>, candidates: &[usize]) -> Vec<usize> {
    let points = geom.points();
    let nn: Vec<Option<usize>> = candidates.iter().map(|&i| geom.nearest_excluding_self(i, candidates)).collect();
    let pos_of = |j: usize| candidates.binary_search(&j).ok();
    let mut keep = Vec::with_capacity(candidates.len());
    for (a, &i) in candidates.iter().enumerate() {
        let in_link = !points.label(i).is_positive()
            && nn[a].is_some_and(|j| points.label(j).is_positive() && pos_of(j).and_then(|b| nn[b]) == Some(i));
        if !in_link {
            keep.push(i);
        }
    }
    keep
}

pub fn tomek_links(points: &PointSet) -> ReferenceSet {
    let geom = Geometry::new(points);
    let all: Vec<usize> = (0..points.len()).collect();
    ReferenceSet::new(tomek_within(&geom, &all), "TL", None)
}
