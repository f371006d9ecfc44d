use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Cell, ExperimentConfig};
use crate::algorithms::{build_policy, explore_and_commit, AlgorithmId, Mode};
use crate::env::{BanditEnvironment, StreamInstance};
use crate::error::{Error, Result};
use crate::instances::{shuffle_stream, InstanceKind, InstanceSpecConfig};

/// Caps the worker count of [`run_experiment`].
pub const THREADS_ENV: &str = "BANDITSTREAM_THREADS";

/// One (cell, seed) run. Failed runs keep their identifying fields, carry
/// the error message and zero everywhere else.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub algorithm: AlgorithmId,
    pub instance: InstanceKind,
    #[serde(rename = "K")]
    pub num_arms: usize,
    #[serde(rename = "T")]
    pub horizon: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub mode: Mode,
    pub total_regret: f64,
    pub explore_pulls: u64,
    pub commit_pulls: u64,
    pub peak_retained: usize,
    pub committed_gap: f64,
    pub wall_time_ms: f64,
    pub error: Option<String>,
}

impl RunRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn cell(&self) -> Cell {
        Cell {
            kind: self.instance,
            num_arms: self.num_arms,
            horizon: self.horizon,
            algorithm: self.algorithm,
        }
    }
}

/// The shuffled stream every algorithm in a cell sees for `seed`.
pub fn build_instance(
    cfg: &ExperimentConfig,
    kind: InstanceKind,
    k: usize,
    horizon: u64,
    seed: u64,
) -> Result<StreamInstance> {
    let spec = InstanceSpecConfig {
        kind,
        num_arms: k,
        beta: cfg.beta,
        horizon,
        standout: cfg.standout,
        seed,
    };
    Ok(shuffle_stream(&spec.generate()?, seed))
}

/// Runs one cell for one seed.
pub fn run_single(cfg: &ExperimentConfig, cell: Cell, seed: u64) -> RunRecord {
    let start = Instant::now();
    let epsilon = cfg.epsilon_for(cell.num_arms, cell.horizon);
    let mut record = RunRecord {
        seed,
        algorithm: cell.algorithm,
        instance: cell.kind,
        num_arms: cell.num_arms,
        horizon: cell.horizon,
        epsilon,
        delta: cfg.delta,
        mode: cfg.mode,
        total_regret: 0.0,
        explore_pulls: 0,
        commit_pulls: 0,
        peak_retained: 0,
        committed_gap: 0.0,
        wall_time_ms: 0.0,
        error: None,
    };
    let outcome = (|| -> Result<_> {
        let instance = build_instance(cfg, cell.kind, cell.num_arms, cell.horizon, seed)?;
        let params = cfg.params_for(cell.num_arms, cell.horizon)?;
        let mut env = BanditEnvironment::new(instance, cell.horizon, seed)
            .with_approx_threshold(cfg.approx_threshold);
        let mut policy = build_policy(cell.algorithm, params, cell.num_arms, cell.horizon);
        explore_and_commit(&mut env, policy.as_mut())
    })();
    match outcome {
        Ok(out) => {
            assert!(
                out.explore_pulls + out.commit_pulls <= cell.horizon,
                "pull accounting exceeded the horizon"
            );
            record.total_regret = out.total_regret;
            record.explore_pulls = out.explore_pulls;
            record.commit_pulls = out.commit_pulls;
            record.peak_retained = out.peak_retained;
            record.committed_gap = out.gap;
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    record
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::config(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(None),
    }
}

/// Runs every cell for every seed. Output is sorted by cell, then seed.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let jobs: Vec<(Cell, u64)> = cfg
        .cells()
        .into_iter()
        .flat_map(|cell| cfg.seeds.iter().map(move |seed| (cell, seed)))
        .collect();
    let work = || -> Vec<RunRecord> {
        jobs.par_iter()
            .map(|&(cell, seed)| run_single(cfg, cell, seed))
            .collect()
    };
    let records = match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::SeedRange;

    fn small() -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(
            vec![InstanceKind::Uniform],
            vec![16],
            vec!["200K".parse().unwrap()],
            vec![AlgorithmId::UniformExploration, AlgorithmId::BucketLog],
        );
        cfg.seeds = SeedRange { start: 0, end: 4 };
        cfg
    }

    #[test]
    fn grid_arithmetic() {
        let recs = run_experiment(&small()).unwrap();
        assert_eq!(recs.len(), 10);
        assert!(recs.iter().all(RunRecord::is_ok));
        assert!(recs
            .iter()
            .all(|r| r.explore_pulls + r.commit_pulls == r.horizon));
        let order: Vec<_> = recs.iter().map(|r| (r.cell(), r.seed)).collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
    }

    #[test]
    fn failures_become_rows() {
        let mut cfg = small();
        cfg.instances = vec![InstanceKind::LowerBoundHard];
        cfg.num_arms = vec![5];
        let recs = run_experiment(&cfg).unwrap();
        assert_eq!(recs.len(), 10);
        assert!(recs
            .iter()
            .all(|r| r.error.as_deref().is_some_and(|e| e.contains("even"))));
    }
}
