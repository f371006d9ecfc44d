use super::params::{sample_count, EpsBestParams, Mode};
use super::{single_incumbent_scan, AlgorithmId, StreamingPolicy};
use crate::env::{ArmHandle, BanditEnvironment};
use crate::error::Result;

/// Uniform elimination with a single stored arm. Every arm gets
/// `ceil((16/eps^2) ln(K/delta))` pulls (leading constant 1 in experiment
/// mode); the incumbent is replaced on a strictly higher empirical mean.
#[derive(Debug, Clone)]
pub struct NaiveElimination {
    params: EpsBestParams,
}

impl NaiveElimination {
    pub fn new(params: EpsBestParams) -> Self {
        Self { params }
    }

    pub fn pulls_per_arm(params: &EpsBestParams, k: usize) -> u64 {
        let constant = match params.mode {
            Mode::Theory => 16.0,
            Mode::Experiment => 1.0,
        };
        let eps = params.epsilon;
        sample_count(constant / (eps * eps) * (k as f64 / params.delta).ln())
    }
}

impl StreamingPolicy for NaiveElimination {
    fn id(&self) -> AlgorithmId {
        AlgorithmId::NaiveElimination
    }

    fn explore(&mut self, env: &mut BanditEnvironment) -> Result<ArmHandle> {
        let pulls = Self::pulls_per_arm(&self.params, env.num_arms());
        single_incumbent_scan(env, pulls)
    }
}
