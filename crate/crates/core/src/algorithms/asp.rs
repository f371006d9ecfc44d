//! Aggressive selective promotion: `log*(K) + 1` levels, each holding one
//! arm and a benchmark mean that only moves up.
//!
//! An arriving arm is sampled at level 1 and either dropped (below the
//! benchmark) or installed as the level's arm. Each level counts the arms it
//! has processed; after `c_l` of them it sends its current arm to the next
//! level, where the same challenge repeats. At the end of the stream every
//! stored arm gets one more round of samples and the best is returned.

use super::params::{log_star, param_set_1, sample_count, EpsBestParams, Mode};
use super::{AlgorithmId, StreamingPolicy};
use crate::env::{ArmHandle, BanditEnvironment};
use crate::error::{Error, Result};

pub(crate) fn num_levels(k: usize) -> usize {
    log_star(k as f64) as usize + 1
}

#[derive(Debug, Clone, Copy)]
struct LevelSchedule {
    /// `None` past the last representable tower level; such levels cannot
    /// be reached because the level below never fills.
    samples: Option<u64>,
    capacity: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Slot {
    arm: Option<ArmHandle>,
    benchmark: f64,
    processed: u64,
}

#[derive(Debug, Clone)]
pub struct AggressiveSelectivePromotion {
    params: EpsBestParams,
    slots: Vec<Slot>,
    schedule: Vec<LevelSchedule>,
    /// Promoted arm currently being challenged, with its last estimate.
    in_flight: Option<(ArmHandle, f64)>,
}

impl AggressiveSelectivePromotion {
    pub fn new(params: EpsBestParams) -> Self {
        Self {
            params,
            slots: Vec::new(),
            schedule: Vec::new(),
            in_flight: None,
        }
    }

    /// Pulls per stored arm in the closing round: `ceil(32 log*(K) / eps^2)`,
    /// with leading constant 1 in experiment mode.
    pub fn final_samples(params: &EpsBestParams, k: usize) -> u64 {
        let constant = match params.mode {
            Mode::Theory => 32.0,
            Mode::Experiment => 1.0,
        };
        let ls = log_star(k as f64);
        if ls == 0 {
            return 0;
        }
        sample_count(constant * f64::from(ls) / (params.epsilon * params.epsilon))
    }

    fn level_schedule(&self, level: u32) -> Result<LevelSchedule> {
        match param_set_1(level, self.params.epsilon, self.params.delta) {
            Ok(row) => Ok(LevelSchedule {
                samples: Some(match self.params.mode {
                    Mode::Theory => row.s_l,
                    Mode::Experiment => self.params.experiment_samples(level),
                }),
                capacity: row.c_l,
            }),
            Err(Error::TowerOverflow { .. }) => Ok(LevelSchedule {
                samples: match self.params.mode {
                    Mode::Theory => None,
                    Mode::Experiment => Some(self.params.experiment_samples(level)),
                },
                capacity: u64::MAX,
            }),
            Err(e) => Err(e),
        }
    }

    fn challenge(
        &mut self,
        env: &mut BanditEnvironment,
        start: usize,
        arm: ArmHandle,
    ) -> Result<()> {
        let top = self.slots.len() - 1;
        let mut level = start;
        let mut arm = arm;
        loop {
            let samples = self.schedule[level].samples.ok_or(Error::TowerOverflow {
                level: level as u32 + 1,
            })?;
            let mean = env.batch_pull(arm, samples)?;
            let slot = &mut self.slots[level];
            if mean < slot.benchmark {
                env.drop_arm(arm)?;
            } else {
                if let Some(old) = slot.arm.take() {
                    env.drop_arm(old)?;
                }
                env.retain(arm)?;
                slot.arm = Some(arm);
                slot.benchmark = mean;
            }
            self.in_flight = None;
            slot.processed += 1;
            if slot.processed == self.schedule[level].capacity {
                slot.processed = 0;
                if level < top {
                    if let Some(promoted) = slot.arm.take() {
                        self.in_flight = Some((promoted, slot.benchmark));
                        arm = promoted;
                        level += 1;
                        continue;
                    }
                }
            }
            return Ok(());
        }
    }

    /// Best stored arm by last estimate; higher levels win ties.
    fn best_stored(&self) -> Option<ArmHandle> {
        let mut best: Option<(ArmHandle, f64)> = None;
        let candidates = self
            .slots
            .iter()
            .rev()
            .filter_map(|s| s.arm.map(|a| (a, s.benchmark)))
            .chain(self.in_flight);
        for (arm, est) in candidates {
            if best.is_none_or(|(_, b)| est > b) {
                best = Some((arm, est));
            }
        }
        best.map(|(a, _)| a)
    }
}

fn out_of_budget(err: &Error) -> bool {
    matches!(err, Error::Env(e) if e.is_out_of_budget())
}

impl StreamingPolicy for AggressiveSelectivePromotion {
    fn id(&self) -> AlgorithmId {
        AlgorithmId::AspLogStar
    }

    fn explore(&mut self, env: &mut BanditEnvironment) -> Result<ArmHandle> {
        let k = env.num_arms();
        let levels = num_levels(k);
        self.schedule = (1..=levels as u32)
            .map(|l| self.level_schedule(l))
            .collect::<Result<_>>()?;
        self.slots = vec![Slot::default(); levels];
        self.in_flight = None;

        let mut last = None;
        while let Some(arm) = env.next_arm() {
            last = Some(arm);
            match self.challenge(env, 0, arm) {
                Ok(()) => {}
                Err(e) if out_of_budget(&e) => return Ok(self.best_stored().unwrap_or(arm)),
                Err(e) => return Err(e),
            }
        }

        let stored: Vec<ArmHandle> = self.slots.iter().rev().filter_map(|s| s.arm).collect();
        let fallback = self
            .best_stored()
            .or(last)
            .ok_or_else(|| Error::domain("empty stream"))?;
        let n = Self::final_samples(&self.params, k);
        if n == 0 || stored.is_empty() {
            return Ok(fallback);
        }
        let mut best: Option<(ArmHandle, f64)> = None;
        for arm in stored {
            match env.batch_pull(arm, n) {
                Ok(mean) => {
                    if best.is_none_or(|(_, b)| mean > b) {
                        best = Some((arm, mean));
                    }
                }
                Err(e) if e.is_out_of_budget() => return Ok(fallback),
                Err(e) => return Err(e.into()),
            }
        }
        Ok(best.map_or(fallback, |(a, _)| a))
    }
}
