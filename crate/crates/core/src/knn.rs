//! Distances, nearest-neighbour classification and leave-one-out fitness.
//!
//! Points carry min-max scaled numeric coordinates and nominal category
//! indices side by side; nominal coordinates contribute an overlap term
//! (0 when equal, 1 otherwise) under the square root. Nearest-neighbour ties
//! go to the lowest point index and k-NN vote ties go to the positive class.

use rayon::prelude::*;

use crate::data::{Attribute, Class, Dataset, Scaler};
use crate::metrics::{self, ConfusionCounts};
use crate::{Error, Result};

/// Row-major labelled points sharing one attribute layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    dim: usize,
    data: Vec<f64>,
    labels: Vec<Class>,
    nominal: Vec<bool>,
}

impl PointSet {
    pub fn new(dim: usize, data: Vec<f64>, labels: Vec<Class>, nominal: Vec<bool>) -> Result<Self> {
        if nominal.len() != dim {
            return Err(Error::LengthMismatch { expected: dim, found: nominal.len() });
        }
        if data.len() != dim * labels.len() {
            return Err(Error::LengthMismatch { expected: dim * labels.len(), found: data.len() });
        }
        Ok(PointSet { dim, data, labels, nominal })
    }

    /// All-numeric points.
    pub fn numeric(points: &[Vec<f64>], labels: Vec<Class>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(dim * points.len());
        for p in points {
            if p.len() != dim {
                return Err(Error::LengthMismatch { expected: dim, found: p.len() });
            }
            data.extend_from_slice(p);
        }
        if labels.len() != points.len() {
            return Err(Error::LengthMismatch { expected: points.len(), found: labels.len() });
        }
        Ok(PointSet { dim, data, labels, nominal: vec![false; dim] })
    }

    /// Scaled copy of `ds`.
    pub fn from_dataset(ds: &Dataset, scaler: &Scaler) -> Result<Self> {
        scaler.check_schema(ds)?;
        let dim = ds.schema.len();
        let mut data = Vec::with_capacity(dim * ds.len());
        for inst in &ds.instances {
            data.extend(scaler.apply_instance(inst)?);
        }
        Ok(PointSet { dim, data, labels: ds.labels(), nominal: ds.schema.iter().map(Attribute::is_nominal).collect() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> Class {
        self.labels[i]
    }

    pub fn labels(&self) -> &[Class] {
        &self.labels
    }

    pub fn nominal_mask(&self) -> &[bool] {
        &self.nominal
    }

    pub fn indices_of(&self, class: Class) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.labels[i] == class).collect()
    }

    pub fn n_pos(&self) -> usize {
        self.labels.iter().filter(|l| l.is_positive()).count()
    }

    pub fn n_neg(&self) -> usize {
        self.len() - self.n_pos()
    }

    /// Squared distance between two raw coordinate vectors of this layout.
    #[inline]
    pub fn sq_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in 0..self.dim {
            if self.nominal[k] {
                if a[k] != b[k] {
                    s += 1.0;
                }
            } else {
                let d = a[k] - b[k];
                s += d * d;
            }
        }
        s
    }

    #[inline]
    pub fn sq_dist_between(&self, i: usize, j: usize) -> f64 {
        self.sq_dist(self.point(i), self.point(j))
    }

    /// Copy of the points at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            data.extend_from_slice(self.point(i));
        }
        PointSet {
            dim: self.dim,
            data,
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            nominal: self.nominal.clone(),
        }
    }
}

/// Euclidean distance over numeric attributes with the nominal overlap term.
pub fn distance(a: &[f64], b: &[f64], schema: &[Attribute]) -> Result<f64> {
    if a.len() != schema.len() {
        return Err(Error::LengthMismatch { expected: schema.len(), found: a.len() });
    }
    if b.len() != schema.len() {
        return Err(Error::LengthMismatch { expected: schema.len(), found: b.len() });
    }
    let s: f64 = a
        .iter()
        .zip(b)
        .zip(schema)
        .map(|((x, y), attr)| {
            if attr.is_nominal() {
                if x == y {
                    0.0
                } else {
                    1.0
                }
            } else {
                (x - y) * (x - y)
            }
        })
        .sum();
    Ok(s.sqrt())
}

/// Indices into a training [`PointSet`] kept as a 1-NN reference set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceSet {
    pub retained: Vec<usize>,
    pub method: String,
    pub seed: Option<u64>,
}

impl ReferenceSet {
    /// Sorts and deduplicates `retained`.
    pub fn new(mut retained: Vec<usize>, method: impl Into<String>, seed: Option<u64>) -> Self {
        retained.sort_unstable();
        retained.dedup();
        ReferenceSet { retained, method: method.into(), seed }
    }

    pub fn len(&self) -> usize {
        self.retained.len()
    }

    pub fn is_empty(&self) -> bool {
        self.retained.is_empty()
    }

    pub fn class_counts(&self, points: &PointSet) -> (usize, usize) {
        let pos = self.retained.iter().filter(|&&i| points.label(i).is_positive()).count();
        (pos, self.retained.len() - pos)
    }

    pub fn has_both_classes(&self, points: &PointSet) -> bool {
        let (p, n) = self.class_counts(points);
        p > 0 && n > 0
    }

    pub fn classifier<'a>(&'a self, points: &'a PointSet) -> Result<NearestNeighbor<'a>> {
        NearestNeighbor::new(points, &self.retained)
    }
}

/// A 1-NN / k-NN classifier over `retained` points of a [`PointSet`].
#[derive(Debug, Clone, Copy)]
pub struct NearestNeighbor<'a> {
    points: &'a PointSet,
    retained: &'a [usize],
}

impl<'a> NearestNeighbor<'a> {
    pub fn new(points: &'a PointSet, retained: &'a [usize]) -> Result<Self> {
        if retained.is_empty() {
            return Err(Error::EmptyReference);
        }
        if let Some(&bad) = retained.iter().find(|&&i| i >= points.len()) {
            return Err(Error::InvalidArgument(format!("retained index {bad} out of range")));
        }
        Ok(NearestNeighbor { points, retained })
    }

    pub fn points(&self) -> &'a PointSet {
        self.points
    }

    /// Index (into the point set) of the nearest retained point.
    pub fn nearest(&self, x: &[f64]) -> usize {
        let mut best = (f64::INFINITY, usize::MAX);
        for &j in self.retained {
            let d = self.points.sq_dist(x, self.points.point(j));
            if d < best.0 || (d == best.0 && j < best.1) {
                best = (d, j);
            }
        }
        best.1
    }

    pub fn classify(&self, x: &[f64]) -> Class {
        self.points.label(self.nearest(x))
    }

    /// The `k` nearest retained indices, closest first, ties by index.
    pub fn k_nearest(&self, x: &[f64], k: usize) -> Vec<usize> {
        let mut scored: Vec<(f64, usize)> =
            self.retained.iter().map(|&j| (self.points.sq_dist(x, self.points.point(j)), j)).collect();
        let k = k.min(scored.len());
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if k < scored.len() {
            scored.select_nth_unstable_by(k, cmp);
            scored.truncate(k);
        }
        scored.sort_by(cmp);
        scored.into_iter().map(|(_, j)| j).collect()
    }

    /// Majority vote of the `k` nearest; an even split goes to the positive class.
    pub fn classify_k(&self, x: &[f64], k: usize) -> Result<Class> {
        if k == 0 || k > self.retained.len() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} is invalid for a reference set of {}",
                self.retained.len()
            )));
        }
        let neighbours = self.k_nearest(x, k);
        Ok(vote(neighbours.iter().map(|&j| self.points.label(j))))
    }
}

pub(crate) fn vote(labels: impl Iterator<Item = Class>) -> Class {
    let (mut pos, mut neg) = (0usize, 0usize);
    for l in labels {
        if l.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    if pos >= neg {
        Class::Positive
    } else {
        Class::Negative
    }
}

/// Pairwise distance access over the points of a training set.
pub enum Geometry<'a> {
    Direct(&'a PointSet),
    Matrix { points: &'a PointSet, sq: Vec<f64> },
}

/// Sets larger than this are served by direct computation instead of a
/// cached n x n matrix.
pub const MATRIX_LIMIT: usize = 3000;

impl<'a> Geometry<'a> {
    /// Caches all pairwise distances when the set is small enough.
    pub fn new(points: &'a PointSet) -> Self {
        if points.len() <= MATRIX_LIMIT {
            Self::matrix(points)
        } else {
            Geometry::Direct(points)
        }
    }

    pub fn direct(points: &'a PointSet) -> Self {
        Geometry::Direct(points)
    }

    pub fn matrix(points: &'a PointSet) -> Self {
        let n = points.len();
        let mut sq = vec![0.0; n * n];
        sq.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = points.sq_dist_between(i, j);
            }
        });
        Geometry::Matrix { points, sq }
    }

    pub fn points(&self) -> &'a PointSet {
        match self {
            Geometry::Direct(p) | Geometry::Matrix { points: p, .. } => p,
        }
    }

    #[inline]
    pub fn sq(&self, i: usize, j: usize) -> f64 {
        match self {
            Geometry::Direct(p) => p.sq_dist_between(i, j),
            Geometry::Matrix { points, sq } => sq[i * points.len() + j],
        }
    }

    /// Nearest member of `candidates` to point `i`, skipping `i` itself.
    #[inline]
    pub fn nearest_excluding_self(&self, i: usize, candidates: &[usize]) -> Option<usize> {
        let mut best = (f64::INFINITY, usize::MAX);
        for &j in candidates {
            if j == i {
                continue;
            }
            let d = self.sq(i, j);
            if d < best.0 || (d == best.0 && j < best.1) {
                best = (d, j);
            }
        }
        (best.1 != usize::MAX).then_some(best.1)
    }

    /// Nearest member of `candidates` to point `i` (which may be `i` itself).
    #[inline]
    pub fn nearest(&self, i: usize, candidates: &[usize]) -> usize {
        let mut best = (f64::INFINITY, usize::MAX);
        for &j in candidates {
            let d = self.sq(i, j);
            if d < best.0 || (d == best.0 && j < best.1) {
                best = (d, j);
            }
        }
        best.1
    }

    /// The `k` nearest members of `candidates` to point `i`, excluding `i`.
    pub fn k_nearest_excluding_self(&self, i: usize, candidates: &[usize], k: usize) -> Vec<usize> {
        let mut scored: Vec<(f64, usize)> =
            candidates.iter().filter(|&&j| j != i).map(|&j| (self.sq(i, j), j)).collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        scored.truncate(k);
        scored.into_iter().map(|(_, j)| j).collect()
    }

    /// Leave-one-out 1-NN label of every point against `retained \ {i}`.
    /// A point with no other retained candidate is labelled negative.
    pub fn loo_predictions(&self, retained: &[usize]) -> Vec<Class> {
        let points = self.points();
        let predict = |i: usize| match self.nearest_excluding_self(i, retained) {
            Some(j) => points.label(j),
            None => Class::Negative,
        };
        if points.len() * retained.len() > 50_000 {
            (0..points.len()).into_par_iter().map(predict).collect()
        } else {
            (0..points.len()).map(predict).collect()
        }
    }

    /// Confusion counts of leave-one-out 1-NN over `retained`.
    pub fn loo_confusion(&self, retained: &[usize]) -> ConfusionCounts {
        let preds = self.loo_predictions(retained);
        ConfusionCounts::from_labels_unchecked(self.points().labels(), &preds)
    }

    /// Leave-one-out GM over `retained`; 0 when a class is missing from it.
    pub fn loo_gm(&self, retained: &[usize]) -> f64 {
        let points = self.points();
        let has_pos = retained.iter().any(|&j| points.label(j).is_positive());
        let has_neg = retained.iter().any(|&j| !points.label(j).is_positive());
        if !(has_pos && has_neg) {
            return 0.0;
        }
        metrics::gm_or_zero(&self.loo_confusion(retained))
    }
}

/// Leave-one-out GM of 1-NN over `retained` (brute-force distances).
pub fn loo_gm(points: &PointSet, retained: &[usize]) -> f64 {
    Geometry::direct(points).loo_gm(retained)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(xs: &[(f64, Class)]) -> PointSet {
        let pts: Vec<Vec<f64>> = xs.iter().map(|(x, _)| vec![*x]).collect();
        PointSet::numeric(&pts, xs.iter().map(|p| p.1).collect()).unwrap()
    }

    use Class::{Negative as N, Positive as P};

    #[test]
    fn distance_examples() {
        let num = vec![Attribute::numeric("x", None).unwrap()];
        let nom = vec![Attribute::nominal("c", vec!["a".into(), "b".into()]).unwrap()];
        assert_eq!(distance(&[0.3], &[0.3], &num).unwrap(), 0.0);
        assert_eq!(distance(&[0.0], &[1.0], &num).unwrap(), 1.0);
        assert_eq!(distance(&[0.0], &[1.0], &nom).unwrap(), 1.0);
        assert!(distance(&[0.0, 1.0], &[1.0], &num).is_err());
    }

    #[test]
    fn one_nn_examples() {
        let ps = line(&[(0.0, P), (1.0, N)]);
        let nn = NearestNeighbor::new(&ps, &[0, 1]).unwrap();
        assert_eq!(nn.classify(&[0.2]), P);
        assert_eq!(nn.classify(&[0.5]), P);
        assert_eq!(nn.classify(&[0.9]), N);
        let single = NearestNeighbor::new(&ps, &[1]).unwrap();
        assert_eq!(single.classify(&[-40.0]), N);
        assert!(matches!(NearestNeighbor::new(&ps, &[]), Err(Error::EmptyReference)));
    }

    #[test]
    fn tie_goes_to_lowest_index_regardless_of_order() {
        let ps = line(&[(1.0, N), (0.0, P)]);
        let a = NearestNeighbor::new(&ps, &[0, 1]).unwrap();
        let b = NearestNeighbor::new(&ps, &[1, 0]).unwrap();
        assert_eq!(a.classify(&[0.5]), N);
        assert_eq!(b.classify(&[0.5]), N);
    }

    #[test]
    fn knn_examples() {
        let ps = line(&[(0.0, P), (0.1, P), (0.2, N), (5.0, N)]);
        let nn = NearestNeighbor::new(&ps, &[0, 1, 2, 3]).unwrap();
        assert_eq!(nn.classify_k(&[0.1], 3).unwrap(), P);
        let two = line(&[(0.0, P), (1.0, N)]);
        let nn2 = NearestNeighbor::new(&two, &[0, 1]).unwrap();
        assert_eq!(nn2.classify_k(&[0.9], 2).unwrap(), P);
        assert!(nn2.classify_k(&[0.9], 3).is_err());
        assert!(nn2.classify_k(&[0.9], 0).is_err());
    }

    #[test]
    fn loo_gm_examples() {
        let ps = line(&[(0.0, P), (1.0, P), (2.0, P), (10.0, N), (11.0, N), (12.0, N)]);
        assert_eq!(loo_gm(&ps, &[0, 1, 2, 3, 4, 5]), 1.0);
        assert_eq!(loo_gm(&ps, &[3, 4, 5]), 0.0);
        // Point 0 sees only {3}; point 3 sees only {0}. Hand enumeration:
        // 0 -> 10 (neg, wrong), 1 -> 0 (pos), 2 -> 0 (pos),
        // 10 -> 0 (pos, wrong), 11 -> 10 (neg), 12 -> 10 (neg).
        let c = Geometry::direct(&ps).loo_confusion(&[0, 3]);
        assert_eq!((c.true_pos, c.false_neg, c.false_pos, c.true_neg), (2, 1, 1, 2));
        assert!((loo_gm(&ps, &[0, 3]) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_and_direct_agree() {
        let pts: Vec<Vec<f64>> = (0..40).map(|i| vec![((i * 37) % 11) as f64, ((i * 13) % 7) as f64]).collect();
        let labels = (0..40).map(|i| if i % 5 == 0 { P } else { N }).collect();
        let ps = PointSet::numeric(&pts, labels).unwrap();
        let retained: Vec<usize> = (0..40).step_by(3).collect();
        let d = Geometry::direct(&ps);
        let m = Geometry::matrix(&ps);
        assert_eq!(d.loo_predictions(&retained), m.loo_predictions(&retained));
        assert_eq!(d.loo_gm(&retained), m.loo_gm(&retained));
    }

    fn triple() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (1usize..5).prop_flat_map(|d| {
            let v = || proptest::collection::vec(-10.0f64..10.0, d);
            (v(), v(), v())
        })
    }

    proptest! {
        #[test]
        fn distance_is_a_metric((a, b, c) in triple()) {
            let schema: Vec<Attribute> = (0..a.len()).map(|i| Attribute::numeric(format!("x{i}"), None).unwrap()).collect();
            let ab = distance(&a, &b, &schema).unwrap();
            let ba = distance(&b, &a, &schema).unwrap();
            let bc = distance(&b, &c, &schema).unwrap();
            let ac = distance(&a, &c, &schema).unwrap();
            prop_assert_eq!(ab, ba);
            prop_assert_eq!(distance(&a, &a, &schema).unwrap(), 0.0);
            prop_assert!(ac <= ab + bc + 1e-9);
        }

        #[test]
        fn k1_equals_1nn(xs in proptest::collection::vec((-5.0f64..5.0, any::<bool>()), 1..20), q in -6.0f64..6.0) {
            let ps = line(&xs.iter().map(|&(x, p)| (x, if p { P } else { N })).collect::<Vec<_>>());
            let all: Vec<usize> = (0..ps.len()).collect();
            let nn = NearestNeighbor::new(&ps, &all).unwrap();
            prop_assert_eq!(nn.classify_k(&[q], 1).unwrap(), nn.classify(&[q]));
        }

        #[test]
        fn order_of_reference_is_irrelevant(xs in proptest::collection::vec((-5.0f64..5.0, any::<bool>()), 1..20), q in -6.0f64..6.0) {
            let ps = line(&xs.iter().map(|&(x, p)| (x, if p { P } else { N })).collect::<Vec<_>>());
            let fwd: Vec<usize> = (0..ps.len()).collect();
            let rev: Vec<usize> = fwd.iter().rev().copied().collect();
            let a = NearestNeighbor::new(&ps, &fwd).unwrap();
            let b = NearestNeighbor::new(&ps, &rev).unwrap();
            prop_assert_eq!(a.nearest(&[q]), b.nearest(&[q]));
        }
    }
}
