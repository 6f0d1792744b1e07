use rand::seq::index;
use rayon::prelude::*;

use crate::knn::{Geometry, PointSet, ReferenceSet};
use crate::seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReParams {
    /// Reference set cardinality.
    pub size: usize,
    pub trials: usize,
}

impl Default for ReParams {
    fn default() -> Self {
        ReParams { size: 25, trials: 10_000 }
    }
}

/// Random editing: draws `trials` random subsets of `size` instances (each
/// redrawn until it holds both classes) and keeps the one with the highest
/// leave-one-out GM over the whole training set. The first best wins ties,
/// so the result for `trials = t` only depends on the first `t` draws.
pub fn random_edit(points: &PointSet, params: ReParams, seed: u64) -> Result<ReferenceSet> {
    let ReParams { size, trials } = params;
    if size < 2 {
        return Err(Error::InvalidArgument(format!("random editing needs at least 2 prototypes, got {size}")));
    }
    if size > points.len() {
        return Err(Error::InvalidArgument(format!("cannot draw {size} prototypes from {} instances", points.len())));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("random editing needs at least one trial".into()));
    }
    if points.n_pos() == 0 || points.n_neg() == 0 {
        return Err(Error::InvalidArgument("random editing needs both classes".into()));
    }

    let mut rng = seed::rng(seed);
    let candidates: Vec<Vec<usize>> = (0..trials)
        .map(|_| loop {
            let mut s = index::sample(&mut rng, points.len(), size).into_vec();
            let pos = s.iter().filter(|&&i| points.label(i).is_positive()).count();
            if pos > 0 && pos < size {
                s.sort_unstable();
                break s;
            }
        })
        .collect();

    let geom = Geometry::new(points);
    let scores: Vec<f64> = candidates.par_iter().map(|s| geom.loo_gm(s)).collect();
    let mut best = 0;
    for t in 1..trials {
        if scores[t] > scores[best] {
            best = t;
        }
    }
    let chosen = candidates.into_iter().nth(best).unwrap_or_default();
    Ok(ReferenceSet::new(chosen, "RE", Some(seed)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knn::loo_gm;
    use crate::selection::fixtures::overlapping;

    #[test]
    fn single_trial_is_returned_as_is() {
        let ps = overlapping();
        let r = random_edit(&ps, ReParams { size: 6, trials: 1 }, 4).unwrap();
        assert_eq!(r.len(), 6);
        assert!(r.has_both_classes(&ps));
    }

    #[test]
    fn full_cardinality_returns_everything() {
        let ps = overlapping();
        let r = random_edit(&ps, ReParams { size: ps.len(), trials: 3 }, 4).unwrap();
        assert_eq!(r.len(), ps.len());
        assert_eq!(loo_gm(&ps, &r.retained), loo_gm(&ps, &(0..ps.len()).collect::<Vec<_>>()));
    }

    #[test]
    fn best_is_non_decreasing_in_trials() {
        let ps = overlapping();
        let mut last = -1.0;
        for trials in [1, 2, 5, 10, 40, 100] {
            let r = random_edit(&ps, ReParams { size: 8, trials }, 17).unwrap();
            let g = loo_gm(&ps, &r.retained);
            assert!(g >= last);
            last = g;
        }
    }

    #[test]
    fn rejects_bad_cardinality() {
        let ps = overlapping();
        assert!(random_edit(&ps, ReParams { size: 1, trials: 5 }, 0).is_err());
        assert!(random_edit(&ps, ReParams { size: ps.len() + 1, trials: 5 }, 0).is_err());
    }
}
