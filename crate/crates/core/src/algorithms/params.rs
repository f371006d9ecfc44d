//! Sample-size schedules shared by the policies.
//!
//! All logarithms are natural except [`log_star`] (base 2) and the base-4
//! bucket counts, which are computed where they are used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact constants versus the unit-constant schedule used for simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Theory,
    Experiment,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Theory => "theory",
            Mode::Experiment => "experiment",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theory" => Ok(Mode::Theory),
            "experiment" => Ok(Mode::Experiment),
            other => Err(Error::config(format!("unknown mode `{other}`"))),
        }
    }
}

pub const DEFAULT_LEVEL_GROWTH: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsBestParams {
    pub epsilon: f64,
    pub delta: f64,
    pub mode: Mode,
    /// Per-level sample multiplier in experiment mode.
    pub level_growth: f64,
}

impl EpsBestParams {
    pub fn new(epsilon: f64, delta: f64, mode: Mode) -> Result<Self> {
        Self::with_growth(epsilon, delta, mode, DEFAULT_LEVEL_GROWTH)
    }

    pub fn with_growth(epsilon: f64, delta: f64, mode: Mode, level_growth: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::domain(format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        if level_growth.is_nan() || level_growth <= 1.0 {
            return Err(Error::domain(format!(
                "level_growth must exceed 1, got {level_growth}"
            )));
        }
        Ok(Self {
            epsilon,
            delta,
            mode,
            level_growth,
        })
    }

    /// Experiment-mode samples at `level` (1-based):
    /// `ceil(level_growth^(level-1) / epsilon^2)`.
    pub fn experiment_samples(&self, level: u32) -> u64 {
        sample_count(self.level_growth.powi(level as i32 - 1) / (self.epsilon * self.epsilon))
    }
}

/// Ceiling of a real-valued sample size, at least 1.
///
/// A relative slack of 1e-12 keeps values such as `1 / 0.1^2`, which land a
/// few ulps above an integer, from rounding up to the next count.
pub fn sample_count(x: f64) -> u64 {
    let c = (x - x.abs() * 1e-12).ceil();
    if c < 1.0 {
        1
    } else if c >= u64::MAX as f64 {
        u64::MAX
    } else {
        c as u64
    }
}

/// Iterated base-2 logarithm: how many times `log2` is applied before the
/// value drops to at most 1.
pub fn log_star(x: f64) -> u32 {
    let mut v = x;
    let mut n = 0;
    while v > 1.0 {
        v = v.log2();
        n += 1;
    }
    n
}

/// `ceil(log_4 x)` computed on integers, 0 for `x <= 1`.
pub fn ceil_log4(x: usize) -> u32 {
    let mut levels = 0;
    let mut cap: u128 = 1;
    while cap < x as u128 {
        cap *= 4;
        levels += 1;
    }
    levels
}

/// One level of the tower schedule used by aggressive selective promotion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet1Row {
    pub level: u32,
    pub eps_l: f64,
    pub r_l: u64,
    pub beta_l: f64,
    pub s_l: u64,
    /// Arms a level must process before it promotes. Saturates at
    /// `u64::MAX` from level 3 on, where the true value is `2^65534`.
    pub c_l: u64,
}

fn tower_r(level: u32) -> Result<u64> {
    match level {
        1 => Ok(4),
        2 => Ok(16),
        3 => Ok(65_536),
        _ => Err(Error::TowerOverflow { level }),
    }
}

pub fn param_set_1(level: u32, epsilon: f64, delta: f64) -> Result<ParamSet1Row> {
    if level == 0 {
        return Err(Error::domain("levels start at 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("epsilon and delta must lie in (0, 1)"));
    }
    let r_l = tower_r(level)?;
    let eps_l = epsilon / (10.0 * 2f64.powi(level as i32 - 1));
    let beta_l = 1.0 / (eps_l * eps_l);
    let s_l = sample_count(8.0 * beta_l * ((1.0 / delta).ln() + 3.0 * r_l as f64));
    let c_l = if level == 1 {
        1u64 << r_l
    } else if r_l < 64 {
        (1u64 << r_l) >> (level - 1)
    } else {
        u64::MAX
    };
    Ok(ParamSet1Row {
        level,
        eps_l,
        r_l,
        beta_l,
        s_l,
        c_l,
    })
}

/// Doubling schedule of the single-arm algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSet2 {
    pub epsilon: f64,
    pub delta: f64,
    /// `ceil((16 / eps^2) ln(1/delta))`
    pub s_1: u64,
}

pub fn param_set_2(epsilon: f64, delta: f64) -> Result<ParamSet2> {
    if !(epsilon > 0.0 && epsilon < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::domain("epsilon and delta must lie in (0, 1)"));
    }
    let s_1 = sample_count(16.0 / (epsilon * epsilon) * (1.0 / delta).ln());
    Ok(ParamSet2 {
        epsilon,
        delta,
        s_1,
    })
}

impl ParamSet2 {
    /// Samples drawn at `level`: `s_1` at level 1, `(2^l - 2^(l-1)) s_1` after.
    pub fn s_level(&self, level: u32) -> u64 {
        if level <= 1 {
            self.s_1
        } else {
            (1u64 << (level - 1)).saturating_mul(self.s_1)
        }
    }

    /// Budget threshold for the `j`-th arm of an epoch,
    /// `ceil((32 / eps^2) ln(j^2 / delta))`.
    pub fn tau(&self, j: u64) -> u64 {
        let j = j as f64;
        sample_count(32.0 / (self.epsilon * self.epsilon) * (j * j / self.delta).ln())
    }

    /// Probability of the small gap `eps/4` for the `j`-th arm, `1 / (ln j + 1)`.
    pub fn p(&self, j: u64) -> f64 {
        1.0 / ((j as f64).ln() + 1.0)
    }

    /// `2^level * s_1`, compared against [`ParamSet2::tau`].
    pub fn level_budget(&self, level: u32) -> u64 {
        (1u64 << level.min(63)).saturating_mul(self.s_1)
    }
}
