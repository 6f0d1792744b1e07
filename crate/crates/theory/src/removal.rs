//! What happens to GM when one prototype is removed from a 1-NN reference set.
//!
//! Removing point `i` hands its Voronoi cell to the neighbouring cells. The
//! part of the cell that ends up with the opposite label is the flip region.
//! If `i` is positive, the flip region turns negative: TNR gains its negative
//! mass `g` and TPR loses its positive mass `l`, so GM improves exactly when
//! `(TPR - l)(TNR + g) / (TPR * TNR) > 1`. Removing a negative mirrors this
//! with `(TPR + g)(TNR - l)`.

use gmselect_core::seed::{self, member_seed};
use gmselect_core::Class;
use rand::Rng as _;
use rayon::prelude::*;

use crate::density::DensityModel;
use crate::montecarlo::{sq_dist, LabeledPointSet, SampleBank};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemovalAnalysis {
    pub removed_index: usize,
    pub removed_label: Class,
    /// Mass the improving rate gains: negative mass of the flip region when a
    /// positive is removed, positive mass when a negative is removed.
    pub gain: f64,
    /// Mass the other rate loses over the flip region.
    pub loss: f64,
    pub tpr_before: f64,
    pub tnr_before: f64,
    /// `GM_after² / GM_before²`.
    pub ratio: f64,
    /// Delta-method standard error of `ratio`.
    pub ratio_se: f64,
    pub predicted_improvement: bool,
}

/// `GM_after² / GM_before²` for the given rates. A zero GM before removal
/// yields infinity if the removal makes it positive, and 1 otherwise.
pub fn improvement_ratio(removed: Class, tpr: f64, tnr: f64, gain: f64, loss: f64) -> f64 {
    let (tpr_after, tnr_after) = match removed {
        Class::Positive => (tpr - loss, tnr + gain),
        Class::Negative => (tpr + gain, tnr - loss),
    };
    let before = tpr * tnr;
    let after = tpr_after * tnr_after;
    if before > 0.0 {
        after / before
    } else if after > 0.0 {
        f64::INFINITY
    } else {
        1.0
    }
}

impl RemovalAnalysis {
    /// Analysis from known rates, with no sampling error.
    pub fn from_rates(removed_index: usize, removed_label: Class, tpr: f64, tnr: f64, gain: f64, loss: f64) -> Self {
        let ratio = improvement_ratio(removed_label, tpr, tnr, gain, loss);
        RemovalAnalysis {
            removed_index,
            removed_label,
            gain,
            loss,
            tpr_before: tpr,
            tnr_before: tnr,
            ratio,
            ratio_se: 0.0,
            predicted_improvement: ratio > 1.0,
        }
    }

    pub fn margin(&self) -> f64 {
        self.ratio - 1.0
    }

    /// Margin in units of its standard error.
    pub fn z_score(&self) -> f64 {
        if self.ratio_se > 0.0 {
            self.margin() / self.ratio_se
        } else if self.margin() > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    pub fn rates_after(&self) -> (f64, f64) {
        match self.removed_label {
            Class::Positive => (self.tpr_before - self.loss, self.tnr_before + self.gain),
            Class::Negative => (self.tpr_before + self.gain, self.tnr_before - self.loss),
        }
    }
}

/// Nearest and second-nearest reference point of every sample in a bank.
/// For a sample in cell `i`, the second-nearest point is its nearest once
/// `i` is removed.
struct Scan {
    pos: Vec<(usize, usize)>,
    neg: Vec<(usize, usize)>,
}

fn two_nearest(points: &[Vec<f64>], x: &[f64]) -> (usize, usize) {
    let (mut d1, mut i1, mut d2, mut i2) = (f64::INFINITY, usize::MAX, f64::INFINITY, usize::MAX);
    for (j, p) in points.iter().enumerate() {
        let d = sq_dist(p, x);
        if d < d1 {
            (d2, i2) = (d1, i1);
            (d1, i1) = (d, j);
        } else if d < d2 {
            (d2, i2) = (d, j);
        }
    }
    (i1, i2)
}

impl Scan {
    fn new(points: &LabeledPointSet, bank: &SampleBank) -> Self {
        let f = |x: &Vec<f64>| two_nearest(&points.points, x);
        Scan { pos: bank.positive.par_iter().map(f).collect(), neg: bank.negative.par_iter().map(f).collect() }
    }

    fn analyse(&self, points: &LabeledPointSet, i: usize) -> RemovalAnalysis {
        let label = |j: usize| points.labels[j];
        let li = label(i);
        let n_pos = self.pos.len() as f64;
        let n_neg = self.neg.len() as f64;
        let pos_ok = self.pos.iter().filter(|&&(a, _)| label(a).is_positive()).count() as f64 / n_pos;
        let neg_ok = self.neg.iter().filter(|&&(a, _)| !label(a).is_positive()).count() as f64 / n_neg;
        let flips = |scan: &[(usize, usize)]| scan.iter().filter(|&&(a, b)| a == i && label(b) != li).count() as f64;
        let pos_flip = flips(&self.pos) / n_pos;
        let neg_flip = flips(&self.neg) / n_neg;

        // Losses come out of the rate of the removed point's class, gains go
        // to the other class's rate.
        let (gain, loss, lose_rate, n_lose, gain_rate, n_gain) = match li {
            Class::Positive => (neg_flip, pos_flip, pos_ok, n_pos, neg_ok, n_neg),
            Class::Negative => (pos_flip, neg_flip, neg_ok, n_neg, pos_ok, n_pos),
        };
        let ratio = improvement_ratio(li, pos_ok, neg_ok, gain, loss);
        let ratio_se = if lose_rate > 0.0 && gain_rate > 0.0 {
            // ratio = (1 - q)(1 + h) with q = loss / lose_rate, h = gain / gain_rate.
            let q = loss / lose_rate;
            let h = gain / gain_rate;
            let var_q = q * (1.0 - q) / (n_lose * lose_rate);
            let var_h = if gain > 0.0 { h * h * (1.0 / gain + 1.0 / gain_rate) / n_gain } else { 0.0 };
            ((1.0 + h).powi(2) * var_q + (1.0 - q).powi(2) * var_h).sqrt()
        } else {
            f64::INFINITY
        };
        RemovalAnalysis {
            removed_index: i,
            removed_label: li,
            gain,
            loss,
            tpr_before: pos_ok,
            tnr_before: neg_ok,
            ratio,
            ratio_se,
            predicted_improvement: ratio > 1.0,
        }
    }
}

fn check_removal(points: &LabeledPointSet, i: usize) -> Result<()> {
    if i >= points.len() {
        return Err(Error::InvalidArgument(format!("index {i} out of range for {} points", points.len())));
    }
    let same = points.labels.iter().filter(|&&l| l == points.labels[i]).count();
    if same < 2 {
        return Err(Error::InvalidArgument(format!("point {i} is the last {} instance", points.labels[i])));
    }
    let other = points.len() - same;
    if other == 0 {
        return Err(Error::InvalidArgument("reference set holds a single class".into()));
    }
    Ok(())
}

/// Estimates the flip-region masses for removing point `i`, from
/// `sample_count` draws per class, and evaluates the improvement inequality.
pub fn removal_analysis(
    points: &LabeledPointSet,
    i: usize,
    model: &DensityModel,
    sample_count: usize,
    seed: u64,
) -> Result<RemovalAnalysis> {
    check_removal(points, i)?;
    if points.dim() != model.dim() {
        return Err(Error::InvalidArgument("point and model dimensions differ".into()));
    }
    let bank = SampleBank::draw(model, sample_count, seed);
    Ok(Scan::new(points, &bank).analyse(points, i))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyParams {
    /// Stop once this many significant cases have been checked.
    pub target_cases: usize,
    pub max_configurations: usize,
    pub min_points: usize,
    pub max_points: usize,
    pub samples: usize,
    /// Required margin, in standard errors, for a case to count.
    pub z_threshold: f64,
    pub seed: u64,
}

impl Default for StudyParams {
    fn default() -> Self {
        StudyParams {
            target_cases: 200,
            max_configurations: 2000,
            min_points: 5,
            max_points: 14,
            samples: 20_000,
            z_threshold: 5.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub configurations: usize,
    pub cases: usize,
    /// Cases whose predicted improvement clears the threshold.
    pub significant: usize,
    /// Significant cases where GM re-estimated on fresh samples, before and
    /// after removal, strictly increased.
    pub confirmed: usize,
}

impl StudyReport {
    pub fn confirmation_rate(&self) -> f64 {
        if self.significant == 0 {
            0.0
        } else {
            self.confirmed as f64 / self.significant as f64
        }
    }
}

/// Draws random reference sets from [`DensityModel::overlapping_gaussians`], analyses the removal of
/// every point, and re-estimates GM on a fresh sample bank for every case
/// with a significant predicted improvement.
pub fn removal_study(params: &StudyParams) -> Result<StudyReport> {
    if params.min_points < 4 || params.max_points < params.min_points {
        return Err(Error::InvalidArgument("configurations need at least 4 points".into()));
    }
    let model = DensityModel::overlapping_gaussians();
    let mut report = StudyReport { configurations: 0, cases: 0, significant: 0, confirmed: 0 };
    for c in 0..params.max_configurations {
        if report.significant >= params.target_cases {
            break;
        }
        let cseed = member_seed(params.seed, c);
        let mut rng = seed::rng(cseed);
        let n = rng.random_range(params.min_points..=params.max_points);
        let n_pos = rng.random_range(2..=n - 2);
        let labels: Vec<Class> = (0..n).map(|k| if k < n_pos { Class::Positive } else { Class::Negative }).collect();
        let pts: Vec<Vec<f64>> = labels.iter().map(|&l| model.density(l).sample(&mut rng)).collect();
        let set = LabeledPointSet::new(pts, labels)?;
        report.configurations += 1;

        let bank = SampleBank::draw(&model, params.samples, member_seed(cseed, 1));
        let scan = Scan::new(&set, &bank);
        let fresh = SampleBank::draw(&model, params.samples, member_seed(cseed, 2));
        let before = fresh.estimate(&set).gm;
        for i in 0..n {
            report.cases += 1;
            let a = scan.analyse(&set, i);
            if a.z_score() > params.z_threshold {
                report.significant += 1;
                if fresh.estimate(&set.without(i)).gm > before {
                    report.confirmed += 1;
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Density, PiecewiseUniform1D};

    #[test]
    fn inequality_arithmetic() {
        let a = RemovalAnalysis::from_rates(0, Class::Positive, 0.8, 0.6, 0.2, 0.05);
        assert!((a.ratio - 1.25).abs() < 1e-12);
        assert!(a.predicted_improvement);
        let none = RemovalAnalysis::from_rates(0, Class::Negative, 0.8, 0.6, 0.0, 0.0);
        assert_eq!(none.ratio, 1.0);
        assert!(!none.predicted_improvement);
    }

    fn symmetric() -> (DensityModel, LabeledPointSet) {
        let m = DensityModel::new(
            Density::Piecewise(PiecewiseUniform1D::uniform(0.0, 6.0).unwrap()),
            Density::Piecewise(PiecewiseUniform1D::uniform(4.0, 10.0).unwrap()),
            0.5,
        )
        .unwrap();
        let s = LabeledPointSet::new(
            vec![vec![1.0], vec![4.0], vec![6.0], vec![9.0]],
            vec![Class::Positive, Class::Positive, Class::Negative, Class::Negative],
        )
        .unwrap();
        (m, s)
    }

    #[test]
    fn mirrored_removals_mirror_gain_and_loss() {
        // Removing the positive at 4 moves the boundary from 5 to 3.5; the
        // flip region [3.5, 5] holds 1.5/6 positive and 1/6 negative mass.
        // Removing the negative at 6 is its mirror image.
        let (m, s) = symmetric();
        let a = removal_analysis(&s, 1, &m, 200_000, 3).unwrap();
        assert!((a.loss - 1.5 / 6.0).abs() < 0.005);
        assert!((a.gain - 1.0 / 6.0).abs() < 0.005);
        let b = removal_analysis(&s, 2, &m, 200_000, 3).unwrap();
        assert!((b.gain - 1.0 / 6.0).abs() < 0.005 && (b.loss - 1.5 / 6.0).abs() < 0.005);
        assert!((a.gain - b.gain).abs() < 0.006);
    }

    #[test]
    fn loss_never_exceeds_rate_and_ratio_matches_resampled_gm() {
        let (m, s) = symmetric();
        let bank = SampleBank::draw(&m, 5000, 8);
        let scan = Scan::new(&s, &bank);
        for i in 0..s.len() {
            let a = scan.analyse(&s, i);
            let lose_rate = if a.removed_label.is_positive() { a.tpr_before } else { a.tnr_before };
            assert!(a.loss <= lose_rate);
            let before = bank.estimate(&s).gm;
            let after = bank.estimate(&s.without(i)).gm;
            assert!((a.ratio - (after * after) / (before * before)).abs() < 1e-12);
        }
    }

    #[test]
    fn cannot_remove_last_of_a_class() {
        let s = LabeledPointSet::new(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![Class::Positive, Class::Negative, Class::Negative],
        )
        .unwrap();
        let m = DensityModel::uniform_overlap();
        assert!(removal_analysis(&s, 0, &m, 1000, 1).is_err());
        assert!(removal_analysis(&s, 1, &m, 1000, 1).is_ok());
    }

    #[test]
    fn small_study_confirms_its_predictions() {
        let params = StudyParams { target_cases: 20, samples: 5000, seed: 4, ..Default::default() };
        let r = removal_study(&params).unwrap();
        assert!(r.significant >= 20);
        assert!(r.confirmation_rate() >= 0.9);
    }
}
