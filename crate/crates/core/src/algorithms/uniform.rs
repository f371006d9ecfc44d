use super::{single_incumbent_scan, AlgorithmId, StreamingPolicy};
use crate::algorithms::params::sample_count;
use crate::env::{ArmHandle, BanditEnvironment};
use crate::error::Result;

/// Pulls every arm the same number of times and keeps the best one seen.
#[derive(Debug, Clone)]
pub struct UniformExploration {
    pulls_per_arm: u64,
}

impl UniformExploration {
    pub fn new(pulls_per_arm: u64) -> Self {
        Self {
            pulls_per_arm: pulls_per_arm.max(1),
        }
    }

    /// `N = ceil((T/K)^(2/3) * (ln T)^(1/3))`.
    pub fn default_pulls(k: usize, horizon: u64) -> u64 {
        let t = horizon as f64;
        let ratio = t / k as f64;
        sample_count(ratio.powf(2.0 / 3.0) * t.ln().max(0.0).cbrt())
    }

    pub fn with_default_pulls(k: usize, horizon: u64) -> Self {
        Self::new(Self::default_pulls(k, horizon))
    }

    pub fn pulls_per_arm(&self) -> u64 {
        self.pulls_per_arm
    }
}

impl StreamingPolicy for UniformExploration {
    fn id(&self) -> AlgorithmId {
        AlgorithmId::UniformExploration
    }

    fn explore(&mut self, env: &mut BanditEnvironment) -> Result<ArmHandle> {
        single_incumbent_scan(env, self.pulls_per_arm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::StreamInstance;

    #[test]
    fn default_pull_count() {
        // 100 * (ln 1e5)^(1/3) = 225.775
        assert_eq!(UniformExploration::default_pulls(100, 100_000), 226);
    }

    #[test]
    fn deterministic_two_arm() {
        let inst = StreamInstance::from_means(&[1.0, 0.0]).unwrap();
        for seed in 0..5 {
            let mut env = BanditEnvironment::new(inst.clone(), 4, seed);
            let arm = UniformExploration::new(1).explore(&mut env).unwrap();
            assert_eq!(arm.index(), 0);
            assert_eq!(env.pulls_used(), 2);
            assert_eq!(env.peak_retained(), 1);
        }
    }

    #[test]
    fn truncated_returns_incumbent() {
        let inst = StreamInstance::from_means(&[0.9, 0.1, 0.5]).unwrap();
        let mut env = BanditEnvironment::new(inst, 15, 0);
        let arm = UniformExploration::new(10).explore(&mut env).unwrap();
        assert_eq!(arm.index(), 0);
        assert_eq!(env.pulls_used(), 15);
    }
}
