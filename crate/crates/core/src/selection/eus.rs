//! Evolutionary undersampling: a generational GA over inclusion masks of
//! the negative class, maximising leave-one-out GM with a balance penalty.

use rand::Rng as _;
use rayon::prelude::*;

use super::{balanced_density, retained_from_mask, split_classes};
use crate::data::Class;
use crate::knn::{Geometry, PointSet, ReferenceSet};
use crate::seed::{self, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct EusParams {
    pub population: usize,
    pub generations: usize,
    /// Per-bit flip probability; `None` means `1 / n_neg`.
    pub mutation_rate: Option<f64>,
    pub tournament: usize,
    /// Weight of the `|1 - selected_neg / n_pos|` balance penalty.
    pub lambda: f64,
}

impl Default for EusParams {
    fn default() -> Self {
        EusParams { population: 50, generations: 100, mutation_rate: None, tournament: 2, lambda: 0.2 }
    }
}

/// Leave-one-out GM of `retained`, with per-instance weights when given.
pub(crate) fn weighted_loo_gm(geom: &Geometry<'_>, retained: &[usize], weights: Option<&[f64]>) -> f64 {
    let points = geom.points();
    let Some(w) = weights else {
        return geom.loo_gm(retained);
    };
    let has_pos = retained.iter().any(|&j| points.label(j).is_positive());
    let has_neg = retained.iter().any(|&j| !points.label(j).is_positive());
    if !(has_pos && has_neg) {
        return 0.0;
    }
    let preds = geom.loo_predictions(retained);
    let (mut pos_ok, mut pos_all, mut neg_ok, mut neg_all) = (0.0, 0.0, 0.0, 0.0);
    for (i, p) in preds.iter().enumerate() {
        let truth = points.label(i);
        if truth == Class::Positive {
            pos_all += w[i];
            if *p == truth {
                pos_ok += w[i];
            }
        } else {
            neg_all += w[i];
            if *p == truth {
                neg_ok += w[i];
            }
        }
    }
    if pos_all <= 0.0 || neg_all <= 0.0 {
        return 0.0;
    }
    ((pos_ok / pos_all) * (neg_ok / neg_all)).sqrt()
}

/// `loo_gm(retained) - lambda * |1 - selected_neg / n_pos|`.
pub fn eus_fitness(points: &PointSet, retained: &[usize], lambda: f64) -> f64 {
    let geom = Geometry::direct(points);
    fitness(&geom, retained, lambda, None)
}

fn fitness(geom: &Geometry<'_>, retained: &[usize], lambda: f64, weights: Option<&[f64]>) -> f64 {
    let points = geom.points();
    let n_pos = points.n_pos().max(1);
    let sel_neg = retained.iter().filter(|&&j| !points.label(j).is_positive()).count();
    weighted_loo_gm(geom, retained, weights) - lambda * (1.0 - sel_neg as f64 / n_pos as f64).abs()
}

pub fn eus(points: &PointSet, params: &EusParams, seed: u64) -> ReferenceSet {
    let geom = Geometry::new(points);
    ReferenceSet::new(eus_with(&geom, params, None, seed).0, "EUS", Some(seed))
}

/// EUS whose fitness weighs each training instance, as used inside boosting.
pub fn eus_weighted(points: &PointSet, params: &EusParams, weights: &[f64], seed: u64) -> ReferenceSet {
    let geom = Geometry::new(points);
    ReferenceSet::new(eus_with(&geom, params, Some(weights), seed).0, "EUS", Some(seed))
}

/// EUS over a prepared geometry, returning only the retained indices.
pub(crate) fn eus_geom(geom: &Geometry<'_>, params: &EusParams, weights: Option<&[f64]>, seed: u64) -> Vec<usize> {
    eus_with(geom, params, weights, seed).0
}

/// Returns the best-ever retained set and its fitness.
pub(crate) fn eus_with(
    geom: &Geometry<'_>,
    params: &EusParams,
    weights: Option<&[f64]>,
    seed: u64,
) -> (Vec<usize>, f64) {
    let points = geom.points();
    let (pos, neg) = split_classes(points);
    let mut rng = seed::rng(seed);
    if neg.is_empty() {
        let f = fitness(geom, &pos, params.lambda, weights);
        return (pos, f);
    }
    let n_bits = neg.len();
    let density = balanced_density(pos.len(), n_bits);
    let mutation = params.mutation_rate.unwrap_or(1.0 / n_bits as f64);
    let pop_size = params.population.max(2);

    let evaluate = |pop: &[Vec<bool>]| -> Vec<f64> {
        pop.par_iter()
            .map(|mask| fitness(geom, &retained_from_mask(&pos, &neg, mask), params.lambda, weights))
            .collect()
    };

    let mut population: Vec<Vec<bool>> =
        (0..pop_size).map(|_| (0..n_bits).map(|_| rng.random_bool(density)).collect()).collect();
    let mut scores = evaluate(&population);
    let (mut best, mut best_score) = best_of(&population, &scores);

    for _ in 0..params.generations {
        let mut next: Vec<Vec<bool>> = Vec::with_capacity(pop_size);
        next.push(best.clone());
        while next.len() < pop_size {
            let a = tournament(&scores, params.tournament, &mut rng);
            let b = tournament(&scores, params.tournament, &mut rng);
            let (mut c1, mut c2) = uniform_crossover(&population[a], &population[b], &mut rng);
            mutate(&mut c1, mutation, &mut rng);
            mutate(&mut c2, mutation, &mut rng);
            next.push(c1);
            if next.len() < pop_size {
                next.push(c2);
            }
        }
        population = next;
        scores = evaluate(&population);
        let (gen_best, gen_score) = best_of(&population, &scores);
        if gen_score > best_score {
            best = gen_best;
            best_score = gen_score;
        }
    }
    (retained_from_mask(&pos, &neg, &best), best_score)
}

fn best_of(pop: &[Vec<bool>], scores: &[f64]) -> (Vec<bool>, f64) {
    let mut k = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[k] {
            k = i;
        }
    }
    (pop[k].clone(), scores[k])
}

fn tournament(scores: &[f64], size: usize, rng: &mut Rng) -> usize {
    let mut best = rng.random_range(0..scores.len());
    for _ in 1..size.max(1) {
        let c = rng.random_range(0..scores.len());
        if scores[c] > scores[best] {
            best = c;
        }
    }
    best
}

fn uniform_crossover(a: &[bool], b: &[bool], rng: &mut Rng) -> (Vec<bool>, Vec<bool>) {
    let mut c1 = Vec::with_capacity(a.len());
    let mut c2 = Vec::with_capacity(a.len());
    for (&x, &y) in a.iter().zip(b) {
        if rng.random_bool(0.5) {
            c1.push(x);
            c2.push(y);
        } else {
            c1.push(y);
            c2.push(x);
        }
    }
    (c1, c2)
}

fn mutate(mask: &mut [bool], rate: f64, rng: &mut Rng) {
    for bit in mask.iter_mut() {
        if rng.random::<f64>() < rate {
            *bit = !*bit;
        }
    }
}
