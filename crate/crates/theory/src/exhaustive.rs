//! Brute-force search over every subset of a small labelled point set for
//! the reference set with the highest asymptotic GM.
//!
//! All subsets are scored against one shared sample bank. For each sample
//! the points are pre-sorted by distance, so a subset's nearest member is
//! the first point in that order whose bit is set.

use gmselect_core::seed::{self, member_seed, splitmix64};
use gmselect_core::Class;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::DensityModel;
use crate::montecarlo::{sq_dist, LabeledPointSet, SampleBank, MIN_SAMPLES};
use crate::{Error, Result};

pub const MAX_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetScore {
    pub subset: Vec<usize>,
    pub gm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub full_gm: f64,
    pub best: SubsetScore,
    /// Best subset of each cardinality `k = 2..=N` holding both classes;
    /// empty unless requested.
    pub per_cardinality: Vec<(usize, SubsetScore)>,
    pub evaluated: usize,
}

impl ExhaustiveResult {
    /// Steps `k -> k + 1` where the best GM drops and then rises again at
    /// some larger cardinality: dips in the per-cardinality curve.
    pub fn non_monotonic_steps(&self) -> Vec<usize> {
        let c = &self.per_cardinality;
        (0..c.len().saturating_sub(1))
            .filter(|&t| {
                let next = c[t + 1].1.gm;
                next < c[t].1.gm && c[t + 2..].iter().any(|(_, s)| s.gm > next)
            })
            .map(|t| c[t].0)
            .collect()
    }

    pub fn curve_csv(&self) -> String {
        let mut out = String::from("k,gm\n");
        for (k, s) in &self.per_cardinality {
            out.push_str(&format!("{k},{}\n", s.gm));
        }
        out
    }
}

fn mask_to_subset(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&j| mask >> j & 1 == 1).collect()
}

/// Scores all `2^N - 1` non-empty subsets of `points` by asymptotic GM on a
/// bank of `samples` draws per class.
pub fn exhaustive_search(
    points: &LabeledPointSet,
    model: &DensityModel,
    per_cardinality: bool,
    samples: usize,
    seed: u64,
) -> Result<ExhaustiveResult> {
    let n = points.len();
    if n > MAX_POINTS {
        return Err(Error::TooManyPoints { points: n, limit: MAX_POINTS });
    }
    if !points.has_both_classes() {
        return Err(Error::InvalidArgument("exhaustive search needs both classes".into()));
    }
    if points.dim() != model.dim() {
        return Err(Error::InvalidArgument("point and model dimensions differ".into()));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_SAMPLES} samples per class")));
    }
    let bank = SampleBank::draw(model, samples, seed);
    let order = |xs: &[Vec<f64>]| -> Vec<u8> {
        xs.par_iter()
            .flat_map_iter(|x| {
                let mut idx: Vec<(f64, u8)> =
                    points.points.iter().enumerate().map(|(j, p)| (sq_dist(p, x), j as u8)).collect();
                idx.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                idx.into_iter().map(|(_, j)| j)
            })
            .collect()
    };
    let pos_order = order(&bank.positive);
    let neg_order = order(&bank.negative);
    let pos_mask: u32 = (0..n).filter(|&j| points.labels[j].is_positive()).fold(0, |m, j| m | 1 << j);
    let full: u32 = (1u32 << n) - 1;

    let score = |mask: u32| -> f64 {
        if mask & pos_mask == 0 || mask & !pos_mask & full == 0 {
            return 0.0;
        }
        let correct = |ord: &[u8], want: Class| {
            ord.chunks_exact(n)
                .filter(|row| {
                    let j = row.iter().find(|&&j| mask >> j & 1 == 1).copied().unwrap_or(0);
                    (pos_mask >> j & 1 == 1) == want.is_positive()
                })
                .count()
        };
        let tpr = correct(&pos_order, Class::Positive) as f64 / samples as f64;
        let tnr = correct(&neg_order, Class::Negative) as f64 / samples as f64;
        (tpr * tnr).sqrt()
    };

    let gms: Vec<f64> = (1..=full).into_par_iter().map(score).collect();
    let mut best = (0u32, f64::NEG_INFINITY);
    let mut by_k: Vec<Option<(u32, f64)>> = vec![None; n + 1];
    for (t, &g) in gms.iter().enumerate() {
        let mask = t as u32 + 1;
        if g > best.1 {
            best = (mask, g);
        }
        let both = mask & pos_mask != 0 && mask & !pos_mask & full != 0;
        let k = mask.count_ones() as usize;
        if both && k >= 2 && by_k[k].is_none_or(|(_, bg)| g > bg) {
            by_k[k] = Some((mask, g));
        }
    }
    let per_cardinality = if per_cardinality {
        by_k.iter()
            .enumerate()
            .filter_map(|(k, e)| e.map(|(m, g)| (k, SubsetScore { subset: mask_to_subset(m, n), gm: g })))
            .collect()
    } else {
        Vec::new()
    };
    Ok(ExhaustiveResult {
        full_gm: gms[full as usize - 1],
        best: SubsetScore { subset: mask_to_subset(best.0, n), gm: best.1 },
        per_cardinality,
        evaluated: gms.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedPoint {
    pub x: Vec<f64>,
    pub positive: bool,
}

/// A point set found by [`construct_nonmonotonic_set`], with everything
/// needed to rebuild and re-score it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedSet {
    pub seed: u64,
    pub attempt: usize,
    pub n_pos: usize,
    pub n_neg: usize,
    /// Samples per class of the scoring bank.
    pub samples: usize,
    pub bank_seed: u64,
    pub points: Vec<RecordedPoint>,
}

impl RecordedSet {
    /// The set shipped with the crate.
    pub fn builtin() -> Self {
        toml::from_str(include_str!("../data/fifteen_points.toml")).expect("bundled point set parses")
    }

    pub fn point_set(&self) -> LabeledPointSet {
        LabeledPointSet {
            points: self.points.iter().map(|p| p.x.clone()).collect(),
            labels: self.points.iter().map(|p| if p.positive { Class::Positive } else { Class::Negative }).collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("recorded set serialises")
    }

    pub fn search(&self) -> Result<ExhaustiveResult> {
        exhaustive_search(&self.point_set(), &DensityModel::overlapping_gaussians(), true, self.samples, self.bank_seed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionParams {
    pub n_pos: usize,
    pub n_neg: usize,
    pub samples: usize,
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for ConstructionParams {
    fn default() -> Self {
        ConstructionParams { n_pos: 5, n_neg: 10, samples: 2000, seed: 2024, max_attempts: 500 }
    }
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Rejection sampling: draws point sets from
/// [`DensityModel::overlapping_gaussians`] (coordinates rounded to three
/// decimals) until one has a best subset beating the full set and a dip in
/// its per-cardinality curve.
pub fn construct_nonmonotonic_set(params: &ConstructionParams) -> Result<(RecordedSet, ExhaustiveResult)> {
    for attempt in 0..params.max_attempts {
        let rec = draw_attempt(params, attempt);
        let result = rec.search()?;
        if result.best.gm > result.full_gm && !result.non_monotonic_steps().is_empty() {
            return Ok((rec, result));
        }
    }
    Err(Error::InvalidArgument(format!("no qualifying set in {} attempts", params.max_attempts)))
}

/// The candidate set drawn on a given attempt of the construction.
pub fn draw_attempt(params: &ConstructionParams, attempt: usize) -> RecordedSet {
    let model = DensityModel::overlapping_gaussians();
    let mut rng = seed::rng(member_seed(params.seed, attempt));
    let mut points = Vec::new();
    for (class, count) in [(Class::Positive, params.n_pos), (Class::Negative, params.n_neg)] {
        for _ in 0..count {
            let x = model.density(class).sample(&mut rng).into_iter().map(round3).collect();
            points.push(RecordedPoint { x, positive: class.is_positive() });
        }
    }
    RecordedSet {
        seed: params.seed,
        attempt,
        n_pos: params.n_pos,
        n_neg: params.n_neg,
        samples: params.samples,
        bank_seed: splitmix64(params.seed),
        points,
    }
}
