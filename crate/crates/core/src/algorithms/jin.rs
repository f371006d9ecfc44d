use rand::Rng;

use super::params::{param_set_2, sample_count, EpsBestParams, Mode, ParamSet2};
use super::{AlgorithmId, StreamingPolicy};
use crate::env::{ArmHandle, BanditEnvironment};
use crate::error::{Error, Result};

/// Single-arm epsilon-best routine with randomized gaps and a doubling
/// per-level budget.
///
/// The stored arm carries one benchmark. Each challenger draws a gap
/// `alpha` (`eps/4` with probability `p_j`, `eps/2` otherwise) and climbs
/// levels; it is dropped as soon as its running mean falls below
/// `benchmark + alpha`, and replaces the stored arm once it clears a level
/// whose budget exceeds `tau_j`. A replacement starts a new epoch.
#[derive(Debug, Clone)]
pub struct JinSingleArm {
    params: EpsBestParams,
}

/// Level sizes and thresholds for one mode.
#[derive(Debug, Clone, Copy)]
struct Schedule {
    params: EpsBestParams,
    set2: ParamSet2,
}

impl Schedule {
    fn samples(&self, level: u32) -> u64 {
        match self.params.mode {
            Mode::Theory => self.set2.s_level(level),
            Mode::Experiment => self.params.experiment_samples(level),
        }
    }

    fn tau(&self, j: u64) -> u64 {
        match self.params.mode {
            Mode::Theory => self.set2.tau(j),
            Mode::Experiment => {
                let eps = self.params.epsilon;
                let j = j as f64;
                sample_count((j * j / self.params.delta).ln() / (eps * eps))
            }
        }
    }

    /// Whether a challenger that cleared `level` after `pulled` samples may
    /// replace the stored arm.
    fn may_replace(&self, level: u32, pulled: u64, j: u64) -> bool {
        match self.params.mode {
            Mode::Theory => self.set2.level_budget(level) > self.tau(j),
            Mode::Experiment => pulled > self.tau(j),
        }
    }
}

enum Verdict {
    Replace(f64),
    Drop,
}

impl JinSingleArm {
    pub fn new(params: EpsBestParams) -> Self {
        Self { params }
    }

    fn climb(
        sched: &Schedule,
        env: &mut BanditEnvironment,
        arm: ArmHandle,
        bar: f64,
        j: u64,
    ) -> Result<Verdict> {
        let mut pulled = 0u64;
        let mut successes = 0.0;
        for level in 1u32.. {
            let n = sched.samples(level);
            let m = env.batch_pull(arm, n)?;
            pulled += n;
            successes += m * n as f64;
            let running = successes / pulled as f64;
            if running < bar {
                return Ok(Verdict::Drop);
            }
            if sched.may_replace(level, pulled, j) {
                return Ok(Verdict::Replace(running));
            }
        }
        unreachable!("level budget eventually exceeds every threshold")
    }
}

impl StreamingPolicy for JinSingleArm {
    fn id(&self) -> AlgorithmId {
        AlgorithmId::JinSingleArm
    }

    fn explore(&mut self, env: &mut BanditEnvironment) -> Result<ArmHandle> {
        let sched = Schedule {
            params: self.params,
            set2: param_set_2(self.params.epsilon, self.params.delta)?,
        };
        let eps = self.params.epsilon;
        let mut rng = env.policy_rng();

        let Some(first) = env.next_arm() else {
            return Err(Error::domain("empty stream"));
        };
        let mut benchmark = match env.batch_pull(first, sched.samples(1)) {
            Ok(m) => m,
            Err(e) if e.is_out_of_budget() => return Ok(first),
            Err(e) => return Err(e.into()),
        };
        env.retain(first)?;
        let mut stored = first;

        let mut j = 0u64;
        while let Some(arm) = env.next_arm() {
            j += 1;
            let alpha = if rng.random_bool(sched.set2.p(j).clamp(0.0, 1.0)) {
                eps / 4.0
            } else {
                eps / 2.0
            };
            match Self::climb(&sched, env, arm, benchmark + alpha, j) {
                Ok(Verdict::Replace(mean)) => {
                    env.drop_arm(stored)?;
                    env.retain(arm)?;
                    stored = arm;
                    benchmark = mean;
                    j = 0;
                }
                Ok(Verdict::Drop) => {}
                Err(Error::Env(e)) if e.is_out_of_budget() => return Ok(stored),
                Err(e) => return Err(e),
            }
        }
        Ok(stored)
    }
}
