//! Imbalanced two-class Gaussian datasets for runs without downloaded data.

use anyhow::{bail, Result};
use gmselect_core::data::Attribute;
use gmselect_core::seed;
use gmselect_core::Dataset;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Negatives ~ N(0, I); positives ~ N(m, I) with `|m| = separation` along
/// the diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub name: String,
    pub n_pos: usize,
    pub n_neg: usize,
    pub dim: usize,
    pub separation: f64,
    #[serde(default)]
    pub seed: u64,
}

pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.dim == 0 {
        bail!("{}: dimension must be positive", spec.name);
    }
    if spec.n_pos < 2 || spec.n_neg < spec.n_pos {
        bail!("{}: need at least 2 positives and no more positives than negatives", spec.name);
    }
    let shift = spec.separation / (spec.dim as f64).sqrt();
    let mut rng = seed::rng(spec.seed);
    let mut rows = Vec::with_capacity(spec.n_pos + spec.n_neg);
    for (label, count, offset) in [("positive", spec.n_pos, shift), ("negative", spec.n_neg, 0.0)] {
        for _ in 0..count {
            let x: Vec<f64> = (0..spec.dim)
                .map(|_| {
                    let z: f64 = rng.sample(StandardNormal);
                    offset + z
                })
                .collect();
            rows.push((x, label.to_string()));
        }
    }
    let schema = (0..spec.dim).map(|k| Attribute::numeric(format!("x{k}"), None)).collect::<Result<Vec<_>, _>>()?;
    Ok(Dataset::from_labelled_rows(spec.name.clone(), schema, "class", rows)?)
}

/// Ten specs with imbalance ratios spread over [5, 30].
pub fn standard_suite(seed: u64) -> Vec<SyntheticSpec> {
    let ratios = [5, 8, 10, 12, 15, 18, 20, 23, 26, 30];
    ratios
        .iter()
        .enumerate()
        .map(|(k, &ir)| SyntheticSpec {
            name: format!("gauss-ir{ir}"),
            n_pos: 12,
            n_neg: 12 * ir,
            dim: 2 + k % 3,
            separation: 2.0,
            seed: seed.wrapping_add(k as u64),
        })
        .collect()
}
