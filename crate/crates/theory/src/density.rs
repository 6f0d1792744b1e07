//! Class-conditional density models: piecewise-uniform densities on the line
//! and diagonal Gaussian mixtures in any dimension.

use std::path::Path;

use gmselect_core::seed::Rng;
use gmselect_core::Class;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
}

impl Segment {
    fn mass(&self) -> f64 {
        (self.hi - self.lo) * self.density
    }
}

/// A density on the real line that is constant on each of a set of
/// non-overlapping intervals and zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseUniform1D {
    pub segments: Vec<Segment>,
}

impl PiecewiseUniform1D {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let d = PiecewiseUniform1D { segments };
        d.validate()?;
        Ok(d)
    }

    /// Uniform density on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![Segment { lo, hi, density: 1.0 / (hi - lo) }])
    }

    pub fn validate(&self) -> Result<()> {
        if self.segments.is_empty() {
            return Err(Error::Model("piecewise density has no segments".into()));
        }
        for s in &self.segments {
            if !(s.lo.is_finite() && s.hi.is_finite() && s.lo < s.hi) {
                return Err(Error::Model(format!("bad interval [{}, {}]", s.lo, s.hi)));
            }
            if !(s.density >= 0.0 && s.density.is_finite()) {
                return Err(Error::Model(format!("negative or non-finite density {}", s.density)));
            }
        }
        let mut sorted = self.segments.clone();
        sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        for w in sorted.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(Error::Model(format!(
                    "intervals [{}, {}] and [{}, {}] overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        let total: f64 = self.segments.iter().map(Segment::mass).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Model(format!("piecewise density integrates to {total}, not 1")));
        }
        Ok(())
    }

    /// Sorted segments with zero-density pieces dropped and touching pieces
    /// of equal density merged, so refinements of one density compare equal.
    pub fn canonical(&self) -> Vec<Segment> {
        let mut sorted: Vec<Segment> = self.segments.iter().copied().filter(|s| s.density > 0.0).collect();
        sorted.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut out: Vec<Segment> = Vec::with_capacity(sorted.len());
        for s in sorted {
            match out.last_mut() {
                Some(last) if last.hi == s.lo && last.density == s.density => last.hi = s.hi,
                _ => out.push(s),
            }
        }
        out
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.segments.iter().find(|s| s.lo <= x && x <= s.hi).map_or(0.0, |s| s.density)
    }

    /// Mass to the left of `x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.segments.iter().map(|s| s.density * (x.min(s.hi) - s.lo).max(0.0)).sum()
    }

    /// Mass to the right of `x`, summed piecewise rather than as `1 - cdf`.
    pub fn survival(&self, x: f64) -> f64 {
        self.segments.iter().map(|s| s.density * (s.hi - x.max(s.lo)).max(0.0)).sum()
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let last = self.segments.iter().rposition(|s| s.density > 0.0).unwrap_or(0);
        for (k, s) in self.segments.iter().enumerate() {
            acc += s.mass();
            if u < acc || k == last {
                return s.lo + rng.random::<f64>() * (s.hi - s.lo);
            }
        }
        unreachable!("validated density has at least one segment")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub weight: f64,
    pub mean: Vec<f64>,
    /// Diagonal of the covariance matrix.
    pub variance: Vec<f64>,
}

impl Component {
    fn pdf(&self, x: &[f64]) -> f64 {
        let mut log = 0.0;
        for ((&xi, &m), &v) in x.iter().zip(&self.mean).zip(&self.variance) {
            let d = xi - m;
            log += -0.5 * d * d / v - 0.5 * (2.0 * std::f64::consts::PI * v).ln();
        }
        log.exp()
    }

    pub fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        self.mean
            .iter()
            .zip(&self.variance)
            .map(|(&m, &v)| {
                let z: f64 = rng.sample(StandardNormal);
                m + v.sqrt() * z
            })
            .collect()
    }
}

/// Mixture of Gaussians with diagonal covariances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub components: Vec<Component>,
}

impl GaussianMixture {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let g = GaussianMixture { components };
        g.validate()?;
        Ok(g)
    }

    /// A single Gaussian with diagonal covariance.
    pub fn single(mean: Vec<f64>, variance: Vec<f64>) -> Result<Self> {
        Self::new(vec![Component { weight: 1.0, mean, variance }])
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.components.first() else {
            return Err(Error::Model("mixture has no components".into()));
        };
        let dim = first.mean.len();
        if dim == 0 {
            return Err(Error::Model("mixture components must have at least one dimension".into()));
        }
        for c in &self.components {
            if c.mean.len() != dim || c.variance.len() != dim {
                return Err(Error::Model("mixture components disagree on dimension".into()));
            }
            if c.weight.is_nan() || c.weight <= 0.0 {
                return Err(Error::Model(format!("component weight {} is not positive", c.weight)));
            }
            if c.variance.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                return Err(Error::Model("component variances must be positive".into()));
            }
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Model(format!("component weights sum to {total}, not 1")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.components[0].mean.len()
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        self.components.iter().map(|c| c.weight * c.pdf(x)).sum()
    }

    pub fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                return c.sample(rng);
            }
        }
        self.components[self.components.len() - 1].sample(rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    Piecewise(PiecewiseUniform1D),
    Mixture(GaussianMixture),
}

impl Density {
    pub fn validate(&self) -> Result<()> {
        match self {
            Density::Piecewise(p) => p.validate(),
            Density::Mixture(g) => g.validate(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Density::Piecewise(_) => 1,
            Density::Mixture(g) => g.dim(),
        }
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        match self {
            Density::Piecewise(p) => p.pdf(x[0]),
            Density::Mixture(g) => g.pdf(x),
        }
    }

    pub fn sample(&self, rng: &mut Rng) -> Vec<f64> {
        match self {
            Density::Piecewise(p) => vec![p.sample(rng)],
            Density::Mixture(g) => g.sample(rng),
        }
    }
}

/// Two class-conditional densities and the class priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    pub positive: Density,
    pub negative: Density,
    pub prior_positive: f64,
}

impl DensityModel {
    pub fn new(positive: Density, negative: Density, prior_positive: f64) -> Result<Self> {
        let m = DensityModel { positive, negative, prior_positive };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.positive.validate()?;
        self.negative.validate()?;
        if self.positive.dim() != self.negative.dim() {
            return Err(Error::Model("class densities have different dimensions".into()));
        }
        if !(self.prior_positive > 0.0 && self.prior_positive < 1.0) {
            return Err(Error::Model(format!("positive prior {} is outside (0, 1)", self.prior_positive)));
        }
        Ok(())
    }

    pub fn prior_negative(&self) -> f64 {
        1.0 - self.prior_positive
    }

    pub fn dim(&self) -> usize {
        self.positive.dim()
    }

    pub fn density(&self, class: Class) -> &Density {
        match class {
            Class::Positive => &self.positive,
            Class::Negative => &self.negative,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let m: DensityModel = toml::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Positive class uniform on [0, 9], negative uniform on [3, 10], equal
    /// priors. The densities cross at 3 but GM peaks at 5.
    pub fn uniform_overlap() -> Self {
        let pos = PiecewiseUniform1D { segments: vec![Segment { lo: 0.0, hi: 9.0, density: 1.0 / 9.0 }] };
        let neg = PiecewiseUniform1D { segments: vec![Segment { lo: 3.0, hi: 10.0, density: 1.0 / 7.0 }] };
        DensityModel { positive: Density::Piecewise(pos), negative: Density::Piecewise(neg), prior_positive: 0.5 }
    }

    /// Standard normal negatives against a two-mode positive mixture,
    /// with priors 8/9 and 1/9.
    pub fn two_mode_mixture() -> Self {
        let neg = GaussianMixture {
            components: vec![Component { weight: 1.0, mean: vec![0.0, 0.0], variance: vec![1.0, 1.0] }],
        };
        let pos = GaussianMixture {
            components: vec![
                Component { weight: 0.6, mean: vec![-1.0, 1.0], variance: vec![1.0, 0.3] },
                Component { weight: 0.4, mean: vec![2.0, -2.0], variance: vec![0.4, 0.7] },
            ],
        };
        DensityModel { positive: Density::Mixture(pos), negative: Density::Mixture(neg), prior_positive: 1.0 / 9.0 }
    }

    /// Two overlapping 2D Gaussians, used for random reference-set studies.
    pub fn overlapping_gaussians() -> Self {
        let single = |mean: Vec<f64>, variance: Vec<f64>| GaussianMixture {
            components: vec![Component { weight: 1.0, mean, variance }],
        };
        DensityModel {
            positive: Density::Mixture(single(vec![0.0, 0.0], vec![1.0, 1.0])),
            negative: Density::Mixture(single(vec![1.2, 0.6], vec![1.5, 1.0])),
            prior_positive: 0.25,
        }
    }
}
