use serde::{Deserialize, Serialize};

use super::{AlgorithmId, StreamingPolicy};
use crate::env::BanditEnvironment;
use crate::error::Result;

/// Which guarantee the default exploration accuracy targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonRule {
    /// `(K/T)^(1/3)`
    #[default]
    Expected,
    /// `(K/T)^(1/3) / 2`
    HighProbability,
}

pub fn default_epsilon(k: usize, horizon: u64, rule: EpsilonRule) -> f64 {
    let base = (k as f64 / horizon as f64).cbrt();
    match rule {
        EpsilonRule::Expected => base,
        EpsilonRule::HighProbability => base / 2.0,
    }
}

/// Result of one explore-and-commit run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyOutcome {
    pub algorithm: AlgorithmId,
    pub committed_index: usize,
    pub committed_mean: f64,
    pub total_regret: f64,
    pub explore_regret: f64,
    pub commit_regret: f64,
    pub explore_pulls: u64,
    pub commit_pulls: u64,
    pub peak_retained: usize,
    /// `best_mean - committed_mean`
    pub gap: f64,
    /// Exploration used the whole horizon.
    pub truncated: bool,
}

/// Runs `policy` on a fresh environment, then pulls its answer for every
/// remaining trial.
pub fn explore_and_commit(
    env: &mut BanditEnvironment,
    policy: &mut dyn StreamingPolicy,
) -> Result<PolicyOutcome> {
    let arm = policy.explore(env)?;
    let explore_pulls = env.pulls_used();
    let explore_regret = env.regret();
    let truncated = env.remaining() == 0;
    let commit_pulls = env.remaining();
    if commit_pulls > 0 {
        env.batch_pull(arm, commit_pulls)?;
    }
    let committed_mean = env.true_mean(arm);
    Ok(PolicyOutcome {
        algorithm: policy.id(),
        committed_index: arm.index(),
        committed_mean,
        total_regret: env.regret(),
        explore_regret,
        commit_regret: env.regret() - explore_regret,
        explore_pulls,
        commit_pulls,
        peak_retained: env.peak_retained(),
        gap: env.instance().best_mean() - committed_mean,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::UniformExploration;
    use crate::env::StreamInstance;

    #[test]
    fn default_epsilon_exact_cube() {
        assert!((default_epsilon(8, 8000, EpsilonRule::Expected) - 0.1).abs() < 1e-15);
        assert!((default_epsilon(8, 8000, EpsilonRule::HighProbability) - 0.05).abs() < 1e-15);
    }

    #[test]
    fn two_point_commit() {
        let inst = StreamInstance::from_means(&[1.0, 0.0]).unwrap();
        let mut env = BanditEnvironment::new(inst, 4, 0);
        let out = explore_and_commit(&mut env, &mut UniformExploration::new(1)).unwrap();
        assert_eq!(out.committed_index, 0);
        assert_eq!(out.explore_pulls, 2);
        assert_eq!(out.commit_pulls, 2);
        assert_eq!(out.total_regret, 1.0);
        assert_eq!(
            out.commit_regret,
            (1.0 - out.committed_mean) * out.commit_pulls as f64
        );
        assert!(!out.truncated);
    }

    #[test]
    fn truncated_run_has_no_commit() {
        let inst = StreamInstance::from_means(&[0.4, 0.6, 0.5]).unwrap();
        let mut env = BanditEnvironment::new(inst, 15, 0);
        let out = explore_and_commit(&mut env, &mut UniformExploration::new(10)).unwrap();
        assert!(out.truncated);
        assert_eq!(out.commit_pulls, 0);
        assert_eq!(out.explore_pulls, 15);
    }
}
