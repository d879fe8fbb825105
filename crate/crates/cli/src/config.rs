use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use orbitlab_core::measures::exact_serde;
use orbitlab_core::{ExactRational, OutlierCriterion};
use serde::{Deserialize, Serialize};

pub const WORKERS_ENV: &str = "ORBITLAB_WORKERS";

/// Run configuration. Every field may be given in a TOML file; missing keys
/// take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    #[serde(with = "exact_serde")]
    pub threshold: ExactRational,
    pub min_length: usize,
    pub bins: usize,
    pub eps: f64,
    pub workers: usize,
    pub output_dir: PathBuf,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            threshold: ExactRational::new(1, 10),
            min_length: 100,
            bins: 50,
            eps: 0.01,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let c: Config = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Applies `ORBITLAB_WORKERS` if set.
    pub fn apply_env(&mut self) -> anyhow::Result<()> {
        if let Ok(v) = std::env::var(WORKERS_ENV) {
            self.workers = v
                .trim()
                .parse()
                .with_context(|| format!("{WORKERS_ENV}={v:?} is not a worker count"))?;
        }
        self.validate()
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.criterion()?;
        if self.bins == 0 {
            bail!("bins must be >= 1");
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            bail!("eps must lie in (0, 1/2), got {}", self.eps);
        }
        if self.workers == 0 {
            bail!("workers must be >= 1");
        }
        Ok(())
    }

    pub fn criterion(&self) -> anyhow::Result<OutlierCriterion> {
        Ok(OutlierCriterion::new(self.threshold, self.min_length)?)
    }
}
