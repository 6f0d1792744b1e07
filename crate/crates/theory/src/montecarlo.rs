//! Monte Carlo estimates of the asymptotic TPR, TNR and GM of a 1-NN
//! reference set under a known density model.

use gmselect_core::seed::{self, member_seed};
use gmselect_core::{Class, PointSet};
use rayon::prelude::*;

use crate::density::DensityModel;
use crate::{Error, Result};

pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledPointSet {
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<Class>,
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl LabeledPointSet {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<Class>) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::InvalidArgument(format!("{} points but {} labels", points.len(), labels.len())));
        }
        if let Some(first) = points.first() {
            if points.iter().any(|p| p.len() != first.len()) {
                return Err(Error::InvalidArgument("points have different dimensions".into()));
            }
        }
        Ok(LabeledPointSet { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn n_pos(&self) -> usize {
        self.labels.iter().filter(|l| l.is_positive()).count()
    }

    pub fn n_neg(&self) -> usize {
        self.len() - self.n_pos()
    }

    pub fn has_both_classes(&self) -> bool {
        self.n_pos() > 0 && self.n_neg() > 0
    }

    pub fn subset(&self, indices: &[usize]) -> LabeledPointSet {
        LabeledPointSet {
            points: indices.iter().map(|&i| self.points[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// The set with point `i` removed.
    pub fn without(&self, i: usize) -> LabeledPointSet {
        let keep: Vec<usize> = (0..self.len()).filter(|&j| j != i).collect();
        self.subset(&keep)
    }

    pub fn to_point_set(&self) -> Result<PointSet> {
        Ok(PointSet::numeric(&self.points, self.labels.clone())?)
    }

    /// Index of the nearest point to `x`, lowest index on ties.
    pub fn nearest(&self, x: &[f64]) -> Option<usize> {
        nearest_in(&self.points, x, None)
    }
}

/// Nearest of `points` to `x`, optionally skipping one index; lowest index wins ties.
pub(crate) fn nearest_in(points: &[Vec<f64>], x: &[f64], skip: Option<usize>) -> Option<usize> {
    let mut best = (f64::INFINITY, None);
    for (j, p) in points.iter().enumerate() {
        if Some(j) == skip {
            continue;
        }
        let d = sq_dist(p, x);
        if d < best.0 {
            best = (d, Some(j));
        }
    }
    best.1
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmEstimate {
    pub tpr: f64,
    pub tnr: f64,
    pub gm: f64,
    /// Standard error of `gm` by the delta method on the two binomial rates.
    pub se: f64,
}

impl GmEstimate {
    pub(crate) fn from_counts(pos_ok: usize, n_pos: usize, neg_ok: usize, n_neg: usize) -> Self {
        let tpr = pos_ok as f64 / n_pos as f64;
        let tnr = neg_ok as f64 / n_neg as f64;
        let gm = (tpr * tnr).sqrt();
        let var_t = tpr * (1.0 - tpr) / n_pos as f64;
        let var_n = tnr * (1.0 - tnr) / n_neg as f64;
        let se = if gm > 0.0 { (tnr * tnr * var_t + tpr * tpr * var_n).sqrt() / (2.0 * gm) } else { 0.0 };
        GmEstimate { tpr, tnr, gm, se }
    }
}

/// Fixed per-class samples from a density model. Evaluating many reference
/// sets against one bank uses common random numbers, so differences between
/// them carry no sampling noise of their own.
#[derive(Debug, Clone)]
pub struct SampleBank {
    pub positive: Vec<Vec<f64>>,
    pub negative: Vec<Vec<f64>>,
}

impl SampleBank {
    /// `per_class` draws from each class density, on independent streams.
    pub fn draw(model: &DensityModel, per_class: usize, seed: u64) -> Self {
        let mut rp = seed::rng(member_seed(seed, 1));
        let mut rn = seed::rng(member_seed(seed, 2));
        SampleBank {
            positive: (0..per_class).map(|_| model.positive.sample(&mut rp)).collect(),
            negative: (0..per_class).map(|_| model.negative.sample(&mut rn)).collect(),
        }
    }

    pub fn samples(&self, class: Class) -> &[Vec<f64>] {
        match class {
            Class::Positive => &self.positive,
            Class::Negative => &self.negative,
        }
    }

    /// Index of the nearest reference point for every sample of `class`.
    pub fn assign(&self, refset: &LabeledPointSet, class: Class) -> Vec<usize> {
        let samples = self.samples(class);
        let f = |x: &Vec<f64>| nearest_in(&refset.points, x, None).unwrap_or(usize::MAX);
        if samples.len() * refset.len() > 50_000 {
            samples.par_iter().map(f).collect()
        } else {
            samples.iter().map(f).collect()
        }
    }

    pub fn estimate(&self, refset: &LabeledPointSet) -> GmEstimate {
        if refset.is_empty() {
            return GmEstimate { tpr: 0.0, tnr: 0.0, gm: 0.0, se: 0.0 };
        }
        let pos_ok = self.assign(refset, Class::Positive).iter().filter(|&&j| refset.labels[j].is_positive()).count();
        let neg_ok = self.assign(refset, Class::Negative).iter().filter(|&&j| !refset.labels[j].is_positive()).count();
        GmEstimate::from_counts(pos_ok, self.positive.len(), neg_ok, self.negative.len())
    }
}

/// Asymptotic GM of 1-NN over `refset`: the positive mass of the positive
/// Voronoi region times the negative mass of the negative region, estimated
/// from `sample_count` draws per class. A reference set missing a class has
/// GM exactly 0.
pub fn asymptotic_gm(
    refset: &LabeledPointSet,
    model: &DensityModel,
    sample_count: usize,
    seed: u64,
) -> Result<GmEstimate> {
    if sample_count < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_SAMPLES} samples per class, got {sample_count}"
        )));
    }
    if !refset.is_empty() && refset.dim() != model.dim() {
        return Err(Error::InvalidArgument(format!(
            "reference set is {}-dimensional but the model is {}-dimensional",
            refset.dim(),
            model.dim()
        )));
    }
    Ok(SampleBank::draw(model, sample_count, seed).estimate(refset))
}

/// Midpoint-rule quadrature of TPR, TNR and GM over `[lo, hi]²` split into
/// `cells²` squares, each labelled by its centre's nearest reference point.
pub fn quadrature_gm_2d(
    refset: &LabeledPointSet,
    model: &DensityModel,
    lo: f64,
    hi: f64,
    cells: usize,
) -> (f64, f64, f64) {
    let h = (hi - lo) / cells as f64;
    let (tpr, tnr) = (0..cells)
        .into_par_iter()
        .map(|a| {
            let (mut tp, mut tn) = (0.0, 0.0);
            for b in 0..cells {
                let x = [lo + (a as f64 + 0.5) * h, lo + (b as f64 + 0.5) * h];
                let Some(j) = refset.nearest(&x) else { continue };
                if refset.labels[j].is_positive() {
                    tp += model.positive.pdf(&x) * h * h;
                } else {
                    tn += model.negative.pdf(&x) * h * h;
                }
            }
            (tp, tn)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    (tpr, tnr, (tpr * tnr).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::gm_boundary_1d;
    use crate::density::{Density, GaussianMixture};

    fn set(points: &[&[f64]], labels: &[Class]) -> LabeledPointSet {
        LabeledPointSet::new(points.iter().map(|p| p.to_vec()).collect(), labels.to_vec()).unwrap()
    }

    #[test]
    fn midpoint_refset_matches_exact_boundary() {
        let m = DensityModel::uniform_overlap();
        let r = set(&[&[2.5], &[7.5]], &[Class::Positive, Class::Negative]);
        let est = asymptotic_gm(&r, &m, 200_000, 3).unwrap();
        let exact = gm_boundary_1d(&m, 5.0).unwrap().gm;
        assert!((est.gm - exact).abs() < 3.0 * est.se, "{} vs {exact} (se {})", est.gm, est.se);
    }

    #[test]
    fn separated_supports_give_one() {
        let m = DensityModel::new(
            Density::Piecewise(crate::density::PiecewiseUniform1D::uniform(0.0, 1.0).unwrap()),
            Density::Piecewise(crate::density::PiecewiseUniform1D::uniform(2.0, 3.0).unwrap()),
            0.5,
        )
        .unwrap();
        let r = set(&[&[0.5], &[2.5]], &[Class::Positive, Class::Negative]);
        let est = asymptotic_gm(&r, &m, 5000, 1).unwrap();
        assert_eq!(est.gm, 1.0);
        assert_eq!(est.se, 0.0);
    }

    #[test]
    fn single_class_refset_is_zero() {
        let m = DensityModel::uniform_overlap();
        let r = set(&[&[2.5], &[7.5]], &[Class::Negative, Class::Negative]);
        assert_eq!(asymptotic_gm(&r, &m, 2000, 1).unwrap().gm, 0.0);
    }

    #[test]
    fn rejects_small_samples_and_wrong_dimension() {
        let m = DensityModel::uniform_overlap();
        let r = set(&[&[0.0, 0.0], &[1.0, 1.0]], &[Class::Positive, Class::Negative]);
        assert!(asymptotic_gm(&r, &m, 10, 1).is_err());
        assert!(asymptotic_gm(&r, &m, 2000, 1).is_err());
    }

    #[test]
    fn agrees_with_grid_quadrature_in_2d() {
        let m = DensityModel::new(
            Density::Mixture(GaussianMixture::single(vec![-0.5, 0.0], vec![1.0, 1.0]).unwrap()),
            Density::Mixture(GaussianMixture::single(vec![0.5, 0.5], vec![0.8, 1.2]).unwrap()),
            0.3,
        )
        .unwrap();
        let r = set(
            &[&[-1.0, 0.0], &[0.2, -0.8], &[1.0, 1.0], &[0.0, 1.2], &[-0.3, 0.3]],
            &[Class::Positive, Class::Positive, Class::Negative, Class::Negative, Class::Negative],
        );
        let est = asymptotic_gm(&r, &m, 100_000, 9).unwrap();
        let (_, _, grid) = quadrature_gm_2d(&r, &m, -7.0, 7.0, 700);
        assert!((est.gm - grid).abs() < 0.01, "{} vs {grid}", est.gm);
    }

    #[test]
    fn bank_is_reproducible() {
        let m = DensityModel::two_mode_mixture();
        let a = SampleBank::draw(&m, 100, 5);
        let b = SampleBank::draw(&m, 100, 5);
        assert_eq!(a.positive, b.positive);
        assert_ne!(a.positive, a.negative);
    }
}
