//! Stream generators: uniform and standout reward streams, the hidden-arm
//! trap distribution, the two-half hard composition, and random ordering.
//!
//! Every generator is a pure function of its arguments; randomness comes
//! from [`crate::rng::substream`] keyed by the caller's seed.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::env::{ArmSpec, StreamInstance};
use crate::error::{Error, Result};
use crate::rng::{substream, Purpose};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Uniform,
    Standout,
    Trap,
    LowerBoundHard,
}

impl InstanceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InstanceKind::Uniform => "uniform",
            InstanceKind::Standout => "standout",
            InstanceKind::Trap => "trap",
            InstanceKind::LowerBoundHard => "lower_bound_hard",
        }
    }
}

impl std::fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(InstanceKind::Uniform),
            "standout" => Ok(InstanceKind::Standout),
            "trap" => Ok(InstanceKind::Trap),
            "lower_bound_hard" | "lower-bound-hard" => Ok(InstanceKind::LowerBoundHard),
            other => Err(Error::config(format!("unknown instance kind `{other}`"))),
        }
    }
}

/// Shape of the standout stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StandoutConfig {
    pub standout_mean: f64,
    /// Standard deviation of the truncated normal the other arms come from.
    pub standout_sigma: f64,
    pub standout_cutoff: f64,
}

impl Default for StandoutConfig {
    fn default() -> Self {
        Self {
            standout_mean: 0.82,
            standout_sigma: 0.10,
            standout_cutoff: 0.8,
        }
    }
}

/// Full description of one generated instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpecConfig {
    pub kind: InstanceKind,
    #[serde(rename = "K")]
    pub num_arms: usize,
    /// Gap of the hidden arm for `trap`.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Horizon, used by `lower_bound_hard` to set its gap.
    #[serde(rename = "T", default)]
    pub horizon: u64,
    #[serde(flatten)]
    pub standout: StandoutConfig,
    pub seed: u64,
}

fn default_beta() -> f64 {
    0.1
}

impl InstanceSpecConfig {
    pub fn generate(&self) -> Result<StreamInstance> {
        match self.kind {
            InstanceKind::Uniform => gen_uniform(self.num_arms, self.seed),
            InstanceKind::Standout => gen_standout(self.num_arms, self.seed, &self.standout),
            InstanceKind::Trap => gen_trap(self.num_arms, self.beta, self.seed),
            InstanceKind::LowerBoundHard => {
                gen_lower_bound_hard(self.num_arms, self.horizon, self.seed)
            }
        }
    }
}

/// Serialized form of an instance, for replay and cross-checking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub kind: InstanceKind,
    #[serde(rename = "K")]
    pub num_arms: usize,
    pub seed: u64,
    pub means: Vec<f64>,
    pub best_index: usize,
}

impl InstanceDocument {
    pub fn new(kind: InstanceKind, seed: u64, instance: &StreamInstance) -> Self {
        Self {
            kind,
            num_arms: instance.len(),
            seed,
            means: instance.means(),
            best_index: instance.best_index(),
        }
    }

    pub fn to_instance(&self) -> Result<StreamInstance> {
        if self.means.len() != self.num_arms {
            return Err(Error::domain(format!(
                "document declares K = {} but lists {} means",
                self.num_arms,
                self.means.len()
            )));
        }
        StreamInstance::from_means(&self.means)
    }
}

fn build(means: Vec<f64>) -> Result<StreamInstance> {
    StreamInstance::new(means.into_iter().map(ArmSpec::new).collect::<Result<_>>()?)
}

/// `k` arms with means drawn uniformly from the open interval (0, 1).
pub fn gen_uniform(k: usize, seed: u64) -> Result<StreamInstance> {
    if k == 0 {
        return Err(Error::domain("K must be at least 1"));
    }
    let mut rng = substream(seed, Purpose::Instance, 0);
    let means = (0..k)
        .map(|_| loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break u;
            }
        })
        .collect();
    build(means)
}

/// One arm at `standout_mean` (placed first), the rest drawn from a normal
/// around 0.5 rejected until they land in `[0, standout_cutoff]`.
pub fn gen_standout(k: usize, seed: u64, cfg: &StandoutConfig) -> Result<StreamInstance> {
    if k < 2 {
        return Err(Error::domain("standout stream needs K >= 2"));
    }
    if cfg.standout_cutoff >= cfg.standout_mean {
        return Err(Error::config(format!(
            "standout_cutoff {} must be below standout_mean {}",
            cfg.standout_cutoff, cfg.standout_mean
        )));
    }
    if !(0.0..=1.0).contains(&cfg.standout_mean) || cfg.standout_cutoff <= 0.0 {
        return Err(Error::config("standout mean/cutoff outside (0, 1]"));
    }
    let normal = Normal::new(0.5, cfg.standout_sigma)
        .map_err(|e| Error::config(format!("standout_sigma: {e}")))?;
    let mut rng = substream(seed, Purpose::Instance, 0);
    let mut means = Vec::with_capacity(k);
    means.push(cfg.standout_mean);
    for _ in 1..k {
        let m = loop {
            let x = normal.sample(&mut rng);
            if (0.0..=cfg.standout_cutoff).contains(&x) {
                break x;
            }
        };
        means.push(m);
    }
    build(means)
}

fn trap_means(k: usize, beta: f64, rng: &mut impl Rng) -> Vec<f64> {
    let hidden = rng.random_range(0..k);
    (0..k)
        .map(|i| if i == hidden { 0.5 + beta } else { 0.5 })
        .collect()
}

/// `k` arms at 1/2 except one uniformly placed arm at `1/2 + beta`.
pub fn gen_trap(k: usize, beta: f64, seed: u64) -> Result<StreamInstance> {
    if k == 0 {
        return Err(Error::domain("K' must be at least 1"));
    }
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::domain(format!(
            "beta must lie in (0, 1/2], got {beta}"
        )));
    }
    let mut rng = substream(seed, Purpose::Instance, 0);
    build(trap_means(k, beta, &mut rng))
}

/// Gap of the hidden arm in the first half of the hard composition,
/// `(K / T)^(1/3) / 8`.
pub fn hard_gap(k: usize, horizon: u64) -> f64 {
    (k as f64 / horizon as f64).cbrt() / 8.0
}

/// First half: a trap stream with gap [`hard_gap`]; second half: arms at 1/2
/// except the last, which is 1/2 or 3/4 with equal probability.
pub fn gen_lower_bound_hard(k: usize, horizon: u64, seed: u64) -> Result<StreamInstance> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::domain(format!(
            "K must be even and at least 4, got {k}"
        )));
    }
    if horizon < k as u64 {
        return Err(Error::domain(format!("T = {horizon} is below K = {k}")));
    }
    let mut rng = substream(seed, Purpose::Instance, 0);
    let mut means = trap_means(k / 2, hard_gap(k, horizon), &mut rng);
    means.extend(std::iter::repeat_n(0.5, k / 2 - 1));
    means.push(if rng.random_bool(0.5) { 0.75 } else { 0.5 });
    build(means)
}

/// Uniformly random reordering of the stream.
pub fn shuffle_stream(instance: &StreamInstance, seed: u64) -> StreamInstance {
    let mut arms = instance.arms().to_vec();
    let mut rng = substream(seed, Purpose::Shuffle, 0);
    arms.shuffle(&mut rng);
    StreamInstance::new(arms).expect("permutation of a nonempty stream")
}
