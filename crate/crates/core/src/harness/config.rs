use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algorithms::{
    default_epsilon, params::DEFAULT_LEVEL_GROWTH, AlgorithmId, EpsBestParams, EpsilonRule, Mode,
};
use crate::env::DEFAULT_APPROX_THRESHOLD;
use crate::error::{Error, Result};
use crate::instances::{InstanceKind, StandoutConfig};

/// `T = round(coefficient * K^power)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonRule {
    pub coefficient: f64,
    pub power: u32,
}

impl HorizonRule {
    pub fn horizon(&self, k: usize) -> u64 {
        (self.coefficient * (k as f64).powi(self.power as i32)).round() as u64
    }

    pub fn label(&self) -> String {
        format!("{}K^{}", self.coefficient, self.power)
    }
}

impl std::str::FromStr for HorizonRule {
    type Err = Error;

    /// Accepts `1000K`, `1000K^2`, `5e5` (constant) and `K^3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config(format!("bad horizon rule `{s}`"));
        let s = s.trim();
        let Some(pos) = s.find(['K', 'k']) else {
            let coefficient: f64 = s.parse().map_err(|_| bad())?;
            return Ok(Self {
                coefficient,
                power: 0,
            });
        };
        let (head, tail) = s.split_at(pos);
        let head = head.trim_end_matches('*');
        let coefficient = if head.is_empty() {
            1.0
        } else {
            head.parse().map_err(|_| bad())?
        };
        let power = match &tail[1..] {
            "" => 1,
            rest => rest
                .strip_prefix('^')
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?,
        };
        Ok(Self { coefficient, power })
    }
}

/// Inclusive seed interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl SeedRange {
    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.start..=self.end
    }

    pub fn len(&self) -> usize {
        if self.end < self.start {
            0
        } else {
            (self.end - self.start + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl Default for SeedRange {
    fn default() -> Self {
        Self { start: 0, end: 49 }
    }
}

impl std::str::FromStr for SeedRange {
    type Err = Error;

    /// `a..b` (inclusive) or a single seed.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::config(format!("bad seed range `{s}`"));
        match s.split_once("..") {
            Some((a, b)) => Ok(Self {
                start: a.trim().parse().map_err(|_| bad())?,
                end: b
                    .trim()
                    .trim_start_matches('=')
                    .parse()
                    .map_err(|_| bad())?,
            }),
            None => {
                let v = s.trim().parse().map_err(|_| bad())?;
                Ok(Self { start: v, end: v })
            }
        }
    }
}

/// A declarative grid of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<InstanceKind>,
    pub num_arms: Vec<usize>,
    pub horizons: Vec<HorizonRule>,
    pub algorithms: Vec<AlgorithmId>,
    #[serde(default)]
    pub seeds: SeedRange,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Fixed exploration accuracy; when absent it follows `epsilon_rule`.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub epsilon_rule: EpsilonRule,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_growth")]
    pub level_growth: f64,
    /// Gap of the hidden arm for `trap` instances.
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_threshold")]
    pub approx_threshold: u64,
    #[serde(default)]
    pub standout: StandoutConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_mode() -> Mode {
    Mode::Experiment
}

fn default_delta() -> f64 {
    0.1
}

fn default_growth() -> f64 {
    DEFAULT_LEVEL_GROWTH
}

fn default_beta() -> f64 {
    0.1
}

fn default_threshold() -> u64 {
    DEFAULT_APPROX_THRESHOLD
}

/// One grid cell: everything but the seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub kind: InstanceKind,
    pub num_arms: usize,
    pub horizon: u64,
    pub algorithm: AlgorithmId,
}

impl ExperimentConfig {
    /// A grid with every optional field at its default.
    pub fn new(
        instances: Vec<InstanceKind>,
        num_arms: Vec<usize>,
        horizons: Vec<HorizonRule>,
        algorithms: Vec<AlgorithmId>,
    ) -> Self {
        Self {
            instances,
            num_arms,
            horizons,
            algorithms,
            seeds: SeedRange::default(),
            mode: default_mode(),
            epsilon: None,
            epsilon_rule: EpsilonRule::default(),
            delta: default_delta(),
            level_growth: default_growth(),
            beta: default_beta(),
            approx_threshold: default_threshold(),
            standout: StandoutConfig::default(),
            output: None,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty()
            || self.num_arms.is_empty()
            || self.horizons.is_empty()
            || self.algorithms.is_empty()
        {
            return Err(Error::config(
                "instances, num_arms, horizons and algorithms must be non-empty",
            ));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seed range is empty"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if let Some(eps) = self.epsilon {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(Error::config(format!(
                    "epsilon must lie in (0, 1), got {eps}"
                )));
            }
        }
        if self.level_growth.is_nan() || self.level_growth <= 1.0 {
            return Err(Error::config("level_growth must exceed 1"));
        }
        for &k in &self.num_arms {
            if k == 0 {
                return Err(Error::config("K must be at least 1"));
            }
            for rule in &self.horizons {
                let t = rule.horizon(k);
                if t < k as u64 {
                    return Err(Error::config(format!(
                        "horizon {t} from rule {} is below K = {k}",
                        rule.label()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Grid cells in canonical order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &kind in &self.instances {
            for &num_arms in &self.num_arms {
                for rule in &self.horizons {
                    for &algorithm in &self.algorithms {
                        cells.push(Cell {
                            kind,
                            num_arms,
                            horizon: rule.horizon(num_arms),
                            algorithm,
                        });
                    }
                }
            }
        }
        cells.sort();
        cells.dedup();
        cells
    }

    pub fn epsilon_for(&self, k: usize, horizon: u64) -> f64 {
        self.epsilon
            .unwrap_or_else(|| default_epsilon(k, horizon, self.epsilon_rule))
    }

    pub fn params_for(&self, k: usize, horizon: u64) -> Result<EpsBestParams> {
        EpsBestParams::with_growth(
            self.epsilon_for(k, horizon),
            self.delta,
            self.mode,
            self.level_growth,
        )
    }
}
