//! Bayes (prior-weighted), balanced Bayes and random-editing 1-NN compared
//! by test GM on data drawn from a density model.

use gmselect_core::metrics::{self, ConfusionCounts};
use gmselect_core::seed::{self, member_seed};
use gmselect_core::selection::{random_edit, ReParams};
use gmselect_core::{Class, PointSet};

use crate::density::{Density, DensityModel};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct DemoParams {
    pub train_neg: usize,
    /// Positive training draws per mixture component; a single entry draws
    /// that many from the whole positive density.
    pub train_pos: Vec<usize>,
    /// Test set size, split between the classes by the model priors.
    pub test_size: usize,
    /// Random editing on the training set; `None` skips it.
    pub random_edit: Option<ReParams>,
}

impl Default for DemoParams {
    fn default() -> Self {
        DemoParams {
            train_neg: 4000,
            train_pos: vec![300, 200],
            test_size: 9000,
            random_edit: Some(ReParams::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DemoResult {
    pub seed: u64,
    pub gm_cb: f64,
    pub gm_bb: f64,
    pub gm_re: Option<f64>,
}

impl DemoResult {
    pub fn csv_header() -> &'static str {
        "seed,gm_cb,gm_bb,gm_re"
    }

    pub fn csv_row(&self) -> String {
        let re = self.gm_re.map(|g| g.to_string()).unwrap_or_default();
        format!("{},{},{},{}", self.seed, self.gm_cb, self.gm_bb, re)
    }
}

/// Labels `x` positive when `w_pos * p(x|+) >= w_neg * p(x|-)`.
fn bayes_rule(model: &DensityModel, x: &[f64], w_pos: f64, w_neg: f64) -> Class {
    if w_pos * model.positive.pdf(x) >= w_neg * model.negative.pdf(x) {
        Class::Positive
    } else {
        Class::Negative
    }
}

/// Prior-weighted Bayes decision.
pub fn classical_bayes(model: &DensityModel, x: &[f64]) -> Class {
    bayes_rule(model, x, model.prior_positive, model.prior_negative())
}

/// Bayes decision with the priors replaced by 1/2.
pub fn balanced_bayes(model: &DensityModel, x: &[f64]) -> Class {
    bayes_rule(model, x, 1.0, 1.0)
}

fn gm_of(truth: &[Class], pred: impl Iterator<Item = Class>) -> f64 {
    let mut c = ConfusionCounts::default();
    for (&t, p) in truth.iter().zip(pred) {
        c.record(t, p);
    }
    metrics::gm(&c).unwrap_or(0.0)
}

fn draw_training(model: &DensityModel, params: &DemoParams, rng: &mut seed::Rng) -> (Vec<Vec<f64>>, Vec<Class>) {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    match (&model.positive, params.train_pos.as_slice()) {
        (Density::Mixture(g), counts) if counts.len() == g.components.len() && counts.len() > 1 => {
            for (c, &k) in g.components.iter().zip(counts) {
                points.extend((0..k).map(|_| c.sample(rng)));
            }
        }
        (_, counts) => {
            let k: usize = counts.iter().sum();
            points.extend((0..k).map(|_| model.positive.sample(rng)));
        }
    }
    labels.resize(points.len(), Class::Positive);
    points.extend((0..params.train_neg).map(|_| model.negative.sample(rng)));
    labels.resize(points.len(), Class::Negative);
    (points, labels)
}

pub fn cb_bb_demo(model: &DensityModel, params: &DemoParams, seed: u64) -> Result<DemoResult> {
    let mut test_rng = seed::rng(member_seed(seed, 2));
    let n_pos = (params.test_size as f64 * model.prior_positive).round() as usize;
    let n_neg = params.test_size - n_pos;
    let mut test: Vec<(Vec<f64>, Class)> = Vec::with_capacity(params.test_size);
    test.extend((0..n_pos).map(|_| (model.positive.sample(&mut test_rng), Class::Positive)));
    test.extend((0..n_neg).map(|_| (model.negative.sample(&mut test_rng), Class::Negative)));
    let truth: Vec<Class> = test.iter().map(|t| t.1).collect();

    let gm_cb = gm_of(&truth, test.iter().map(|(x, _)| classical_bayes(model, x)));
    let gm_bb = gm_of(&truth, test.iter().map(|(x, _)| balanced_bayes(model, x)));

    let gm_re = match params.random_edit {
        None => None,
        Some(re) => {
            let mut rng = seed::rng(member_seed(seed, 1));
            let (points, labels) = draw_training(model, params, &mut rng);
            let train = PointSet::numeric(&points, labels)?;
            let refset = random_edit(&train, re, member_seed(seed, 3))?;
            let nn = refset.classifier(&train)?;
            Some(gm_of(&truth, test.iter().map(|(x, _)| nn.classify(x))))
        }
    };
    Ok(DemoResult { seed, gm_cb, gm_bb, gm_re })
}
