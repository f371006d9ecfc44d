//! Bucket tournaments with `O(log K)` and `O(log log K)` memory.
//!
//! Arriving arms enter bucket 1. A bucket holding four arms samples each of
//! them, forwards the empirical best one level up and drops the rest. When
//! the stream ends, every non-empty bucket is resolved the same way from the
//! bottom up even if it is not full.
//!
//! The `log log K` variant replaces the top bucket by a single incumbent that
//! is only displaced by a challenger with a strictly higher estimate.

use std::collections::HashMap;

use super::params::{ceil_log4, sample_count, EpsBestParams, Mode};
use super::{AlgorithmId, StreamingPolicy};
use crate::env::{ArmHandle, BanditEnvironment};
use crate::error::{Error, Result};

const BUCKET_SIZE: usize = 4;

pub(crate) fn log_levels(k: usize) -> usize {
    (ceil_log4(k) as usize).max(1)
}

/// `max(2, ceil(log_4 ln K))`
pub(crate) fn loglog_levels(k: usize) -> usize {
    let ln_k = (k as f64).ln();
    let t = if ln_k > 1.0 {
        (ln_k.ln() / 4f64.ln()).ceil() as usize
    } else {
        0
    };
    t.max(2)
}

/// Per-arm samples when a level-`level` bucket is resolved:
/// `ceil((4 / eps_l^2) (ln(1/delta) + 3^l))` with `eps_l = eps / (10 2^(l-1))`.
pub fn bucket_samples(params: &EpsBestParams, level: u32) -> u64 {
    match params.mode {
        Mode::Theory => {
            let eps_l = params.epsilon / (10.0 * 2f64.powi(level as i32 - 1));
            sample_count(
                4.0 / (eps_l * eps_l) * ((1.0 / params.delta).ln() + 3f64.powi(level as i32)),
            )
        }
        Mode::Experiment => params.experiment_samples(level),
    }
}

/// Samples for a challenger at the top level of the `log log K` variant,
/// `ceil((4 / eps^2) (ln(1/delta) + ln K))`.
pub fn top_level_samples(params: &EpsBestParams, k: usize) -> u64 {
    match params.mode {
        Mode::Theory => {
            let eps = params.epsilon;
            sample_count(4.0 / (eps * eps) * ((1.0 / params.delta).ln() + (k as f64).ln()))
        }
        Mode::Experiment => params.experiment_samples(loglog_levels(k) as u32),
    }
}

/// Buckets plus the last estimate of every arm they hold.
#[derive(Debug, Default)]
struct Ladder {
    buckets: Vec<Vec<ArmHandle>>,
    samples: Vec<u64>,
    estimates: HashMap<ArmHandle, f64>,
}

impl Ladder {
    fn new(levels: usize, params: &EpsBestParams) -> Self {
        Self {
            buckets: vec![Vec::with_capacity(BUCKET_SIZE); levels],
            samples: (1..=levels as u32)
                .map(|l| bucket_samples(params, l))
                .collect(),
            estimates: HashMap::new(),
        }
    }

    /// Samples every member of bucket `level`, drops all but the best and
    /// returns it. The bucket is left empty.
    fn resolve(&mut self, env: &mut BanditEnvironment, level: usize) -> Result<ArmHandle> {
        let members = std::mem::take(&mut self.buckets[level]);
        let n = self.samples[level];
        let mut best: Option<(ArmHandle, f64)> = None;
        for &arm in &members {
            let mean = match env.batch_pull(arm, n) {
                Ok(m) => m,
                Err(e) => {
                    // put the unresolved bucket back so truncation sees it
                    self.buckets[level] = members;
                    return Err(e.into());
                }
            };
            self.estimates.insert(arm, mean);
            if best.is_none_or(|(_, b)| mean > b) {
                best = Some((arm, mean));
            }
        }
        let (winner, _) = best.expect("resolve called on an empty bucket");
        for arm in members {
            if arm != winner {
                env.drop_arm(arm)?;
                self.estimates.remove(&arm);
            }
        }
        Ok(winner)
    }

    /// Highest-level held arm, ties broken by last estimate.
    fn best_known(&self) -> Option<ArmHandle> {
        let mut best: Option<(usize, f64, ArmHandle)> = None;
        for (level, bucket) in self.buckets.iter().enumerate() {
            for &arm in bucket {
                let est = self
                    .estimates
                    .get(&arm)
                    .copied()
                    .unwrap_or(f64::NEG_INFINITY);
                if best.is_none_or(|(bl, be, _)| level > bl || (level == bl && est > be)) {
                    best = Some((level, est, arm));
                }
            }
        }
        best.map(|(_, _, a)| a)
    }
}

fn out_of_budget(err: &Error) -> bool {
    matches!(err, Error::Env(e) if e.is_out_of_budget())
}

/// `ceil(log_4 K)` buckets of four arms each.
#[derive(Debug, Clone)]
pub struct BucketLog {
    params: EpsBestParams,
}

impl BucketLog {
    pub fn new(params: EpsBestParams) -> Self {
        Self { params }
    }

    fn cascade(ladder: &mut Ladder, env: &mut BanditEnvironment) -> Result<()> {
        let top = ladder.buckets.len() - 1;
        for level in 0..=top {
            if ladder.buckets[level].len() < BUCKET_SIZE {
                continue;
            }
            let winner = ladder.resolve(env, level)?;
            let dest = if level < top { level + 1 } else { level };
            ladder.buckets[dest].push(winner);
        }
        Ok(())
    }

    fn flush(ladder: &mut Ladder, env: &mut BanditEnvironment) -> Result<Option<ArmHandle>> {
        let top = ladder.buckets.len() - 1;
        for level in 0..=top {
            if ladder.buckets[level].is_empty() {
                continue;
            }
            let winner = ladder.resolve(env, level)?;
            if level == top {
                ladder.buckets[level].push(winner);
                return Ok(Some(winner));
            }
            ladder.buckets[level + 1].push(winner);
        }
        Ok(None)
    }
}

impl StreamingPolicy for BucketLog {
    fn id(&self) -> AlgorithmId {
        AlgorithmId::BucketLog
    }

    fn explore(&mut self, env: &mut BanditEnvironment) -> Result<ArmHandle> {
        let mut ladder = Ladder::new(log_levels(env.num_arms()), &self.params);
        let mut last = None;
        let outcome = (|| -> Result<Option<ArmHandle>> {
            while let Some(arm) = env.next_arm() {
                last = Some(arm);
                env.retain(arm)?;
                ladder.buckets[0].push(arm);
                Self::cascade(&mut ladder, env)?;
            }
            Self::flush(&mut ladder, env)
        })();
        match outcome {
            Ok(Some(arm)) => Ok(arm),
            Ok(None) => Err(Error::domain("empty stream")),
            Err(e) if out_of_budget(&e) => ladder
                .best_known()
                .or(last)
                .ok_or_else(|| Error::domain("empty stream")),
            Err(e) => Err(e),
        }
    }
}

/// `t - 1` buckets of four arms topped by a single incumbent.
#[derive(Debug, Clone)]
pub struct BucketLogLog {
    params: EpsBestParams,
}

#[derive(Debug, Default)]
struct TopLevel {
    incumbent: Option<ArmHandle>,
    benchmark: f64,
    samples: u64,
}

impl TopLevel {
    fn challenge(
        &mut self,
        env: &mut BanditEnvironment,
        ladder: &mut Ladder,
        arm: ArmHandle,
    ) -> Result<()> {
        let mean = env.batch_pull(arm, self.samples)?;
        if self.incumbent.is_none() || mean > self.benchmark {
            if let Some(old) = self.incumbent.replace(arm) {
                env.drop_arm(old)?;
                ladder.estimates.remove(&old);
            }
            self.benchmark = mean;
            ladder.estimates.insert(arm, mean);
        } else {
            env.drop_arm(arm)?;
            ladder.estimates.remove(&arm);
        }
        Ok(())
    }
}

impl BucketLogLog {
    pub fn new(params: EpsBestParams) -> Self {
        Self { params }
    }

    fn cascade(
        ladder: &mut Ladder,
        top: &mut TopLevel,
        env: &mut BanditEnvironment,
        flush: bool,
    ) -> Result<()> {
        let last_bucket = ladder.buckets.len() - 1;
        for level in 0..=last_bucket {
            let len = ladder.buckets[level].len();
            if len == 0 || (!flush && len < BUCKET_SIZE) {
                continue;
            }
            let winner = ladder.resolve(env, level)?;
            if level < last_bucket {
                ladder.buckets[level + 1].push(winner);
            } else {
                top.challenge(env, ladder, winner)?;
            }
        }
        Ok(())
    }
}

impl StreamingPolicy for BucketLogLog {
    fn id(&self) -> AlgorithmId {
        AlgorithmId::BucketLogLog
    }

    fn explore(&mut self, env: &mut BanditEnvironment) -> Result<ArmHandle> {
        let k = env.num_arms();
        let mut ladder = Ladder::new(loglog_levels(k) - 1, &self.params);
        let mut top = TopLevel {
            samples: top_level_samples(&self.params, k),
            ..TopLevel::default()
        };
        let mut last = None;
        let outcome = (|| -> Result<()> {
            while let Some(arm) = env.next_arm() {
                last = Some(arm);
                env.retain(arm)?;
                ladder.buckets[0].push(arm);
                Self::cascade(&mut ladder, &mut top, env, false)?;
            }
            Self::cascade(&mut ladder, &mut top, env, true)
        })();
        match outcome {
            Ok(()) => top.incumbent.ok_or_else(|| Error::domain("empty stream")),
            Err(e) if out_of_budget(&e) => top
                .incumbent
                .or_else(|| ladder.best_known())
                .or(last)
                .ok_or_else(|| Error::domain("empty stream")),
            Err(e) => Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::StreamInstance;

    #[test]
    fn level_counts() {
        assert_eq!(log_levels(256), 4);
        assert_eq!(log_levels(1), 1);
        assert_eq!(loglog_levels(5000), 2);
        assert_eq!(loglog_levels(3), 2);
        // ln(1e7) = 16.1 -> log_4 = 2.006 -> 3
        assert_eq!(loglog_levels(10_000_000), 3);
    }

    #[test]
    fn theory_samples() {
        let p = EpsBestParams::new(0.2, 0.1, Mode::Theory).unwrap();
        // eps_1 = 0.02: ceil(10000 (ln 10 + 3)) = ceil(53025.85)
        assert_eq!(bucket_samples(&p, 1), 53_026);
        let p = EpsBestParams::new(0.1, 0.1, Mode::Theory).unwrap();
        // ceil(400 (ln 10 + ln 5000)) = ceil(4327.93)
        assert_eq!(top_level_samples(&p, 5000), 4328);
    }

    fn stream(n: usize) -> StreamInstance {
        let means: Vec<f64> = (0..n).map(|i| ((i * 37) % 101) as f64 / 101.0).collect();
        StreamInstance::from_means(&means).unwrap()
    }

    #[test]
    fn log_memory_bound() {
        let p = EpsBestParams::new(0.3, 0.1, Mode::Experiment).unwrap();
        for k in [1, 3, 4, 5, 17, 64, 100, 257] {
            let mut env = BanditEnvironment::new(stream(k), 100_000_000, 2);
            let arm = BucketLog::new(p).explore(&mut env).unwrap();
            assert!(env.is_accessible(arm));
            assert!(env.peak_retained() <= 4 * log_levels(k), "k={k}");
        }
    }

    #[test]
    fn loglog_memory_bound() {
        let p = EpsBestParams::new(0.3, 0.1, Mode::Experiment).unwrap();
        for k in [1, 2, 4, 9, 64, 300] {
            let mut env = BanditEnvironment::new(stream(k), 100_000_000, 2);
            let arm = BucketLogLog::new(p).explore(&mut env).unwrap();
            assert!(env.is_accessible(arm));
            assert!(
                env.peak_retained() <= 4 * (loglog_levels(k) - 1) + 1,
                "k={k}"
            );
        }
    }

    #[test]
    fn loglog_incumbent_wins_ties() {
        let p = EpsBestParams::new(0.5, 0.1, Mode::Experiment).unwrap();
        // Two buckets of four all at mean 1.0: the second challenger ties
        // the incumbent and must not replace it.
        let inst = StreamInstance::from_means(&[1.0; 8]).unwrap();
        let mut env = BanditEnvironment::new(inst, 1_000_000, 0);
        let arm = BucketLogLog::new(p).explore(&mut env).unwrap();
        assert_eq!(arm.index(), 0);
    }

    #[test]
    fn flush_resolves_partial_buckets() {
        let p = EpsBestParams::new(0.5, 0.1, Mode::Experiment).unwrap();
        let inst = StreamInstance::from_means(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let mut env = BanditEnvironment::new(inst.clone(), 1_000_000, 0);
        assert_eq!(BucketLog::new(p).explore(&mut env).unwrap().index(), 5);
        let mut env = BanditEnvironment::new(inst, 1_000_000, 0);
        assert_eq!(BucketLogLog::new(p).explore(&mut env).unwrap().index(), 5);
    }

    #[test]
    fn truncation_keeps_an_arm() {
        let p = EpsBestParams::new(0.1, 0.1, Mode::Experiment).unwrap();
        let mut env = BanditEnvironment::new(stream(50), 700, 0);
        let arm = BucketLog::new(p).explore(&mut env).unwrap();
        assert!(env.is_accessible(arm));
        assert_eq!(env.pulls_used(), 700);
        let mut env = BanditEnvironment::new(stream(50), 700, 0);
        let arm = BucketLogLog::new(p).explore(&mut env).unwrap();
        assert!(env.is_accessible(arm));
    }
}
