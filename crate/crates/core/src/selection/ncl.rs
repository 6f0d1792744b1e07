use crate::knn::{vote, Geometry, PointSet, ReferenceSet};

const K: usize = 3;

/// Neighbourhood cleaning rule.
///
/// Marks every negative misclassified by its 3 nearest neighbours, and the
/// negative voters of every positive misclassified by its 3 nearest
/// neighbours; all marks are applied at once.
pub fn ncl(points: &PointSet) -> ReferenceSet {
    let all: Vec<usize> = (0..points.len()).collect();
    if points.len() <= K {
        log::warn!("NCL: {} instances is too few for 3-NN; nothing removed", points.len());
        return ReferenceSet::new(all, "NCL", None);
    }
    let geom = Geometry::new(points);
    let mut marked = vec![false; points.len()];
    for i in 0..points.len() {
        let neighbours = geom.k_nearest_excluding_self(i, &all, K);
        let predicted = vote(neighbours.iter().map(|&j| points.label(j)));
        if predicted == points.label(i) {
            continue;
        }
        if points.label(i).is_positive() {
            for &j in &neighbours {
                if !points.label(j).is_positive() {
                    marked[j] = true;
                }
            }
        } else {
            marked[i] = true;
        }
    }
    ReferenceSet::new(all.into_iter().filter(|&i| !marked[i]).collect(), "NCL", None)
}
