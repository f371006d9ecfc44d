//! The simulation environment.
//!
//! [`BanditEnvironment`] is the only place rewards come from. It hands out
//! arms one at a time in stream order, enforces the horizon, charges regret
//! for every pull and tracks how many arms the caller holds in memory.
//!
//! Memory accounting: an arm counts toward `retained` only after an explicit
//! [`BanditEnvironment::retain`]. The arm most recently returned by
//! [`BanditEnvironment::next_arm`] (the buffer arm) can be pulled without
//! being retained and does not count.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{EnvError, Error, Result};
use crate::rng::{substream, Purpose};

/// Batch size above which [`BanditEnvironment::batch_pull`] switches to the
/// moment-matched normal approximation.
pub const DEFAULT_APPROX_THRESHOLD: u64 = 100_000;

/// A Bernoulli arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmSpec {
    mean: f64,
}

impl ArmSpec {
    pub fn new(mean: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::domain(format!("arm mean {mean} outside [0, 1]")));
        }
        Ok(Self { mean })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }
}

/// An ordered stream of arms together with its best mean.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamInstance {
    arms: Vec<ArmSpec>,
    best_mean: f64,
    best_index: usize,
}

impl StreamInstance {
    pub fn new(arms: Vec<ArmSpec>) -> Result<Self> {
        if arms.is_empty() {
            return Err(Error::domain("a stream instance needs at least one arm"));
        }
        let (best_index, best_mean) =
            arms.iter()
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |(bi, bm), (i, a)| {
                    if a.mean > bm {
                        (i, a.mean)
                    } else {
                        (bi, bm)
                    }
                });
        Ok(Self {
            arms,
            best_mean,
            best_index,
        })
    }

    pub fn from_means(means: &[f64]) -> Result<Self> {
        let arms = means
            .iter()
            .map(|&m| ArmSpec::new(m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms)
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn arms(&self) -> &[ArmSpec] {
        &self.arms
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(ArmSpec::mean).collect()
    }

    pub fn best_mean(&self) -> f64 {
        self.best_mean
    }

    /// Smallest index attaining the best mean.
    pub fn best_index(&self) -> usize {
        self.best_index
    }

    pub fn gap(&self, index: usize) -> f64 {
        self.best_mean - self.arms[index].mean
    }
}

/// Opaque reference to an arm of the stream.
///
/// Handles are only produced by [`BanditEnvironment::next_arm`]; whether one
/// may still be pulled is decided by the environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArmHandle(usize);

impl ArmHandle {
    /// Position of the arm in the stream.
    pub fn index(self) -> usize {
        self.0
    }
}

/// One entry of the optional pull log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogEvent {
    Arrive(usize),
    Retain(usize),
    Drop(usize),
    Pull {
        arm: usize,
        count: u64,
        successes: u64,
    },
}

#[derive(Debug, Clone)]
pub struct BanditEnvironment {
    instance: StreamInstance,
    horizon: u64,
    seed: u64,
    approx_threshold: u64,
    pulls_used: u64,
    regret: f64,
    cursor: usize,
    buffer: Option<usize>,
    retained: Vec<bool>,
    retained_count: usize,
    peak_retained: usize,
    reward_rngs: Vec<Option<ChaCha8Rng>>,
    log: Option<Vec<LogEvent>>,
}

impl BanditEnvironment {
    pub fn new(instance: StreamInstance, horizon: u64, seed: u64) -> Self {
        let k = instance.len();
        Self {
            instance,
            horizon,
            seed,
            approx_threshold: DEFAULT_APPROX_THRESHOLD,
            pulls_used: 0,
            regret: 0.0,
            cursor: 0,
            buffer: None,
            retained: vec![false; k],
            retained_count: 0,
            peak_retained: 0,
            reward_rngs: vec![None; k],
            log: None,
        }
    }

    pub fn with_approx_threshold(mut self, threshold: u64) -> Self {
        self.approx_threshold = threshold;
        self
    }

    /// Records every arrival, retain, drop and pull for later auditing.
    pub fn with_pull_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn instance(&self) -> &StreamInstance {
        &self.instance
    }

    /// Number of arms in the stream (K).
    pub fn num_arms(&self) -> usize {
        self.instance.len()
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn approx_threshold(&self) -> u64 {
        self.approx_threshold
    }

    pub fn pulls_used(&self) -> u64 {
        self.pulls_used
    }

    pub fn remaining(&self) -> u64 {
        self.horizon - self.pulls_used
    }

    /// Accumulated regret, the sum of `best_mean - mean` over all pulls.
    pub fn regret(&self) -> f64 {
        self.regret
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn retained_count(&self) -> usize {
        self.retained_count
    }

    pub fn peak_retained(&self) -> usize {
        self.peak_retained
    }

    pub fn pull_log(&self) -> Option<&[LogEvent]> {
        self.log.as_deref()
    }

    /// True mean of an arm. For evaluation only; policies must not call this.
    pub fn true_mean(&self, arm: ArmHandle) -> f64 {
        self.instance.arms[arm.0].mean
    }

    /// Independent randomness for the policy itself (e.g. coin flips that
    /// pick a gap parameter). Does not touch any reward stream.
    pub fn policy_rng(&self) -> ChaCha8Rng {
        substream(self.seed, Purpose::Policy, 0)
    }

    pub fn is_accessible(&self, arm: ArmHandle) -> bool {
        self.buffer == Some(arm.0) || self.retained.get(arm.0).copied().unwrap_or(false)
    }

    /// Advances the stream. The previous buffer arm is lost unless retained.
    pub fn next_arm(&mut self) -> Option<ArmHandle> {
        if self.cursor >= self.instance.len() {
            self.buffer = None;
            return None;
        }
        let idx = self.cursor;
        self.cursor += 1;
        self.buffer = Some(idx);
        self.record(LogEvent::Arrive(idx));
        Some(ArmHandle(idx))
    }

    pub fn retain(&mut self, arm: ArmHandle) -> Result<(), EnvError> {
        if self.retained.get(arm.0).copied().unwrap_or(false) {
            return Ok(());
        }
        if self.buffer != Some(arm.0) {
            return Err(EnvError::StaleHandle { index: arm.0 });
        }
        self.retained[arm.0] = true;
        self.retained_count += 1;
        self.peak_retained = self.peak_retained.max(self.retained_count);
        self.record(LogEvent::Retain(arm.0));
        Ok(())
    }

    /// Discards an arm permanently.
    pub fn drop_arm(&mut self, arm: ArmHandle) -> Result<(), EnvError> {
        let was_retained = self.retained.get(arm.0).copied().unwrap_or(false);
        let was_buffer = self.buffer == Some(arm.0);
        if !was_retained && !was_buffer {
            return Err(EnvError::StaleHandle { index: arm.0 });
        }
        if was_retained {
            self.retained[arm.0] = false;
            self.retained_count -= 1;
        }
        if was_buffer {
            self.buffer = None;
        }
        self.record(LogEvent::Drop(arm.0));
        Ok(())
    }

    /// One Bernoulli pull.
    pub fn pull(&mut self, arm: ArmHandle) -> Result<u8, EnvError> {
        self.check_access(arm)?;
        if self.pulls_used >= self.horizon {
            return Err(EnvError::BudgetExhausted {
                horizon: self.horizon,
            });
        }
        let mean = self.instance.arms[arm.0].mean;
        let reward = u8::from(self.reward_rng(arm.0).random::<f64>() < mean);
        self.charge(arm.0, 1, u64::from(reward));
        Ok(reward)
    }

    /// Pulls `arm` `n` times and returns the empirical mean.
    ///
    /// If fewer than `n` pulls remain, the remaining ones are spent on `arm`
    /// and [`EnvError::Truncated`] reports how many were made.
    pub fn batch_pull(&mut self, arm: ArmHandle, n: u64) -> Result<f64, EnvError> {
        self.check_access(arm)?;
        if n == 0 {
            return Err(EnvError::EmptyBatch);
        }
        let remaining = self.remaining();
        if remaining < n {
            let empirical_mean = if remaining > 0 {
                let s = self.draw_successes(arm.0, remaining);
                self.charge(arm.0, remaining, s);
                Some(s as f64 / remaining as f64)
            } else {
                None
            };
            return Err(EnvError::Truncated {
                performed: remaining,
                requested: n,
                empirical_mean,
            });
        }
        let s = self.draw_successes(arm.0, n);
        self.charge(arm.0, n, s);
        Ok(s as f64 / n as f64)
    }

    fn check_access(&self, arm: ArmHandle) -> Result<(), EnvError> {
        if self.is_accessible(arm) {
            Ok(())
        } else {
            Err(EnvError::StaleHandle { index: arm.0 })
        }
    }

    fn reward_rng(&mut self, idx: usize) -> &mut ChaCha8Rng {
        let seed = self.seed;
        self.reward_rngs[idx].get_or_insert_with(|| substream(seed, Purpose::Reward, idx as u64))
    }

    fn draw_successes(&mut self, idx: usize, n: u64) -> u64 {
        let mean = self.instance.arms[idx].mean;
        let threshold = self.approx_threshold;
        let rng = self.reward_rng(idx);
        if mean <= 0.0 {
            return 0;
        }
        if mean >= 1.0 {
            return n;
        }
        if n <= threshold {
            Binomial::new(n, mean)
                .expect("mean checked to lie in (0, 1)")
                .sample(rng)
        } else {
            let nf = n as f64;
            let sd = (nf * mean * (1.0 - mean)).sqrt();
            let s = Normal::new(nf * mean, sd)
                .expect("finite moments")
                .sample(rng)
                .round();
            s.clamp(0.0, nf) as u64
        }
    }

    fn charge(&mut self, idx: usize, count: u64, successes: u64) {
        self.pulls_used += count;
        self.regret += count as f64 * self.instance.gap(idx);
        self.record(LogEvent::Pull {
            arm: idx,
            count,
            successes,
        });
    }

    fn record(&mut self, event: LogEvent) {
        if let Some(log) = self.log.as_mut() {
            log.push(event);
        }
    }
}

/// Replays a pull log and checks that every pull hit the buffer arm or a
/// retained arm. Returns the offending log position on failure.
///
/// This re-derives membership from the events alone and shares no state
/// with the environment.
pub fn audit_single_pass(log: &[LogEvent]) -> std::result::Result<(), usize> {
    use std::collections::BTreeSet;
    let mut buffer: Option<usize> = None;
    let mut held: BTreeSet<usize> = BTreeSet::new();
    let mut dropped: BTreeSet<usize> = BTreeSet::new();
    let mut last_arrival: Option<usize> = None;
    for (pos, ev) in log.iter().enumerate() {
        match *ev {
            LogEvent::Arrive(i) => {
                if last_arrival.is_some_and(|prev| i != prev + 1)
                    || (last_arrival.is_none() && i != 0)
                {
                    return Err(pos);
                }
                last_arrival = Some(i);
                buffer = Some(i);
            }
            LogEvent::Retain(i) => {
                if dropped.contains(&i) || (buffer != Some(i) && !held.contains(&i)) {
                    return Err(pos);
                }
                held.insert(i);
            }
            LogEvent::Drop(i) => {
                held.remove(&i);
                if buffer == Some(i) {
                    buffer = None;
                }
                dropped.insert(i);
            }
            LogEvent::Pull { arm, .. } => {
                if buffer != Some(arm) && !held.contains(&arm) {
                    return Err(pos);
                }
            }
        }
    }
    Ok(())
}

/// Regret implied by a pull log, `sum(count * (best_mean - mean))`.
pub fn regret_from_log(log: &[LogEvent], instance: &StreamInstance) -> f64 {
    log.iter()
        .filter_map(|ev| match *ev {
            LogEvent::Pull { arm, count, .. } => Some(count as f64 * instance.gap(arm)),
            _ => None,
        })
        .sum()
}
