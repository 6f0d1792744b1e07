//! Experiment configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! jobs = 4
//! out = "results"          # overridden by GMSELECT_OUT when set
//! repetitions = 5
//! timing = false           # record wall time; off keeps output reproducible
//!
//! [[datasets]]
//! path = "data/glass4.dat" # KEEL .dat, or .csv; relative to this file
//!
//! [[synthetic]]
//! name = "gauss-1"
//! n_pos = 20
//! n_neg = 300
//! dim = 2
//! separation = 2.0
//!
//! [[methods]]
//! name = "EUSBOOST"
//! size = 10
//! generations = 50
//! ```
//!
//! Leaving out `methods` runs the standard twelve.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gmselect_core::Dataset;
use serde::{Deserialize, Serialize};

use crate::methods::Method;
use crate::synthetic::{self, SyntheticSpec};

pub const OUT_ENV: &str = "GMSELECT_OUT";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub name: String,
    /// Ensemble size.
    pub size: Option<usize>,
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub lambda: Option<f64>,
    pub swarm: Option<usize>,
    pub iterations: Option<usize>,
    /// Reference-set size for random editing.
    pub prototypes: Option<usize>,
    pub trials: Option<usize>,
}

impl MethodSpec {
    pub fn named(name: &str) -> Self {
        MethodSpec { name: name.into(), ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub path: PathBuf,
}

fn default_repetitions() -> usize {
    gmselect_core::data::REPETITIONS
}

fn default_jobs() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub timing: bool,
    #[serde(default)]
    pub datasets: Vec<DatasetEntry>,
    #[serde(default)]
    pub synthetic: Vec<SyntheticSpec>,
    #[serde(default)]
    pub methods: Vec<MethodSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 0,
            jobs: 1,
            out: None,
            repetitions: default_repetitions(),
            timing: false,
            datasets: Vec::new(),
            synthetic: Vec::new(),
            methods: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("invalid experiment config")?;
        Ok(cfg)
    }

    /// Reads a config file; dataset paths are resolved against its directory
    /// and the output directory honours the environment override.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for d in &mut cfg.datasets {
            if d.path.is_relative() {
                d.path = base.join(&d.path);
            }
        }
        if let Some(dir) = std::env::var_os(OUT_ENV) {
            cfg.out = Some(PathBuf::from(dir));
        }
        Ok(cfg)
    }

    /// The configured roster, or the standard twelve methods.
    pub fn roster(&self) -> Result<Vec<Method>> {
        if self.methods.is_empty() {
            return Ok(Method::standard_roster());
        }
        let roster: Vec<Method> = self.methods.iter().map(Method::from_spec).collect::<Result<_>>()?;
        for (i, m) in roster.iter().enumerate() {
            if roster[..i].iter().any(|o| o.name() == m.name()) {
                bail!("method {} appears twice in the roster", m.name());
            }
        }
        Ok(roster)
    }

    /// Loads every dataset, file-based first, then synthetic.
    pub fn load_datasets(&self) -> Result<Vec<Dataset>> {
        let mut out = Vec::new();
        for d in &self.datasets {
            out.push(Dataset::load(&d.path).with_context(|| format!("loading {}", d.path.display()))?);
        }
        for s in &self.synthetic {
            out.push(synthetic::generate(s)?);
        }
        if out.is_empty() {
            bail!("config lists no datasets");
        }
        for (i, d) in out.iter().enumerate() {
            if out[..i].iter().any(|o| o.name == d.name) {
                bail!("dataset name {} is used twice", d.name);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if self.jobs == 0 {
            bail!("jobs must be at least 1");
        }
        if self.repetitions == 0 {
            bail!("repetitions must be at least 1");
        }
        self.roster()?;
        Ok(())
    }
}
