//! Binary particle swarm over inclusion masks of the negative class.
//!
//! Fitness is the mean of one-point AUC, F1 and GM of leave-one-out 1-NN.
//! Bits are resampled each step with probability `sigmoid(velocity)`.

use rand::Rng as _;
use rayon::prelude::*;

use super::{balanced_density, retained_from_mask, split_classes};
use crate::knn::{Geometry, PointSet, ReferenceSet};
use crate::metrics;
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct PsoParams {
    pub swarm: usize,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    /// Velocity clamp.
    pub max_velocity: f64,
}

impl Default for PsoParams {
    fn default() -> Self {
        PsoParams { swarm: 40, iterations: 100, inertia: 0.72, cognitive: 1.49, social: 1.49, max_velocity: 4.0 }
    }
}

/// `(balanced_auc + f_measure + gm) / 3` of leave-one-out 1-NN over `retained`.
pub fn pso_fitness(points: &PointSet, retained: &[usize]) -> f64 {
    fitness(&Geometry::direct(points), retained)
}

fn fitness(geom: &Geometry<'_>, retained: &[usize]) -> f64 {
    let c = geom.loo_confusion(retained);
    (metrics::balanced_auc(&c) + metrics::f_measure(&c) + metrics::gm_or_zero(&c)) / 3.0
}

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

pub fn pso_select(points: &PointSet, params: &PsoParams, seed: u64) -> ReferenceSet {
    let geom = Geometry::new(points);
    let (pos, neg) = split_classes(points);
    if neg.is_empty() {
        return ReferenceSet::new(pos, "PSO", Some(seed));
    }
    let mut rng = seed::rng(seed);
    let n_bits = neg.len();
    let vmax = params.max_velocity;
    // Start velocities where sigmoid(v) equals the balanced density, so the
    // initial swarm holds about as many negatives as positives.
    let p0 = balanced_density(pos.len(), n_bits);
    let v0 = (p0 / (1.0 - p0)).ln().clamp(-vmax, vmax);

    let swarm = params.swarm.max(1);
    let mut velocity: Vec<Vec<f64>> = vec![vec![v0; n_bits]; swarm];
    let mut position: Vec<Vec<bool>> = (0..swarm).map(|_| (0..n_bits).map(|_| rng.random_bool(p0)).collect()).collect();

    let evaluate = |pop: &[Vec<bool>]| -> Vec<f64> {
        pop.par_iter().map(|mask| fitness(&geom, &retained_from_mask(&pos, &neg, mask))).collect()
    };

    let mut scores = evaluate(&position);
    let mut personal = position.clone();
    let mut personal_score = scores.clone();
    let mut g = argmax(&scores);
    let mut global = position[g].clone();
    let mut global_score = scores[g];

    for _ in 0..params.iterations {
        for p in 0..swarm {
            for b in 0..n_bits {
                let x = f64::from(u8::from(position[p][b]));
                let pb = f64::from(u8::from(personal[p][b]));
                let gb = f64::from(u8::from(global[b]));
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let v =
                    params.inertia * velocity[p][b] + params.cognitive * r1 * (pb - x) + params.social * r2 * (gb - x);
                let v = v.clamp(-vmax, vmax);
                velocity[p][b] = v;
                position[p][b] = rng.random::<f64>() < sigmoid(v);
            }
        }
        scores = evaluate(&position);
        for p in 0..swarm {
            if scores[p] > personal_score[p] {
                personal_score[p] = scores[p];
                personal[p] = position[p].clone();
            }
        }
        g = argmax(&personal_score);
        if personal_score[g] > global_score {
            global_score = personal_score[g];
            global = personal[g].clone();
        }
    }
    ReferenceSet::new(retained_from_mask(&pos, &neg, &global), "PSO", Some(seed))
}

fn argmax(xs: &[f64]) -> usize {
    let mut k = 0;
    for i in 1..xs.len() {
        if xs[i] > xs[k] {
            k = i;
        }
    }
    k
}
