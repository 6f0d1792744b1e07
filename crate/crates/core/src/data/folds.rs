use rand::seq::SliceRandom;

use super::{Class, Dataset};
use crate::seed;
use crate::{Error, Result};

pub const REPETITIONS: usize = 5;

/// Five repetitions of a stratified split into two halves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub seed: u64,
    /// `repetitions[r][h]` holds the sorted instance indices of half `h`.
    pub repetitions: Vec<[Vec<usize>; 2]>,
}

impl FoldPlan {
    /// Train/test indices for trial `(rep, fold)`: fold 0 trains on the
    /// first half, fold 1 swaps the roles.
    pub fn split(&self, rep: usize, fold: usize) -> (&[usize], &[usize]) {
        let halves = &self.repetitions[rep];
        if fold == 0 {
            (&halves[0], &halves[1])
        } else {
            (&halves[1], &halves[0])
        }
    }
}

/// Shuffles each class independently and puts the first `ceil(n/2)` members
/// of each class in half 0.
pub fn stratified_two_fold(ds: &Dataset, seed: u64) -> Result<FoldPlan> {
    stratified_folds(ds, seed, REPETITIONS)
}

/// Like [`stratified_two_fold`] with any number of repetitions; the first
/// `k` repetitions do not depend on how many follow.
pub fn stratified_folds(ds: &Dataset, seed: u64, repetitions: usize) -> Result<FoldPlan> {
    let (pos, neg): (Vec<usize>, Vec<usize>) = (0..ds.len()).partition(|&i| ds.instances[i].label == Class::Positive);
    if pos.len() < 2 || neg.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "cannot stratify: need at least 2 instances per class, have {} positive and {} negative",
            pos.len(),
            neg.len()
        )));
    }
    let mut rng = seed::rng(seed);
    let count = repetitions;
    let mut repetitions = Vec::with_capacity(count);
    for _ in 0..count {
        let mut first = Vec::with_capacity(ds.len() / 2 + 2);
        let mut second = Vec::with_capacity(ds.len() / 2 + 2);
        for class in [&pos, &neg] {
            let mut order = class.clone();
            order.shuffle(&mut rng);
            let cut = order.len().div_ceil(2);
            first.extend_from_slice(&order[..cut]);
            second.extend_from_slice(&order[cut..]);
        }
        first.sort_unstable();
        second.sort_unstable();
        repetitions.push([first, second]);
    }
    Ok(FoldPlan { seed, repetitions })
}
