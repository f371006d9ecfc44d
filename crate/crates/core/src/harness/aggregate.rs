use std::collections::BTreeMap;

use serde::Serialize;

use super::runner::RunRecord;
use crate::algorithms::AlgorithmId;
use crate::error::{Error, Result};
use crate::instances::InstanceKind;
use crate::stats::{mean, median};

pub const BASELINE: AlgorithmId = AlgorithmId::UniformExploration;

/// A table row group: one instance kind at one `(K, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Setting {
    pub kind: InstanceKind,
    #[serde(rename = "K")]
    pub num_arms: usize,
    #[serde(rename = "T")]
    pub horizon: u64,
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} K={} T={}", self.kind, self.num_arms, self.horizon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeEntry {
    pub setting: Setting,
    pub algorithm: AlgorithmId,
    pub runs: usize,
    pub mean_regret: f64,
    pub median_regret: f64,
    pub relative_mean: f64,
    pub relative_median: f64,
}

/// Regret of every algorithm relative to uniform exploration, per setting.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RelativeTable {
    pub entries: Vec<RelativeEntry>,
}

impl RelativeTable {
    pub fn get(&self, setting: Setting, algorithm: AlgorithmId) -> Option<&RelativeEntry> {
        self.entries
            .iter()
            .find(|e| e.setting == setting && e.algorithm == algorithm)
    }

    pub fn settings(&self) -> Vec<Setting> {
        let mut s: Vec<_> = self.entries.iter().map(|e| e.setting).collect();
        s.dedup();
        s
    }
}

/// Ratio of aggregates: `mean(alg) / mean(baseline)` and
/// `median(alg) / median(baseline)`. Failed runs are skipped.
pub fn aggregate(records: &[RunRecord]) -> Result<RelativeTable> {
    let mut groups: BTreeMap<Setting, BTreeMap<AlgorithmId, Vec<f64>>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_ok()) {
        let setting = Setting {
            kind: r.instance,
            num_arms: r.num_arms,
            horizon: r.horizon,
        };
        groups
            .entry(setting)
            .or_default()
            .entry(r.algorithm)
            .or_default()
            .push(r.total_regret);
    }
    let mut entries = Vec::new();
    for (setting, algos) in groups {
        let base = algos
            .get(&BASELINE)
            .ok_or_else(|| Error::Aggregation(format!("no {BASELINE} runs for {setting}")))?;
        let base_mean = mean(base).unwrap_or(0.0);
        let base_median = median(base).unwrap_or(0.0);
        if !(base_mean > 0.0 && base_median > 0.0) {
            return Err(Error::Aggregation(format!(
                "{BASELINE} regret is zero for {setting}"
            )));
        }
        for (algorithm, regrets) in algos {
            let (m, md) = (
                mean(&regrets).unwrap_or(0.0),
                median(&regrets).unwrap_or(0.0),
            );
            let (relative_mean, relative_median) = if algorithm == BASELINE {
                (1.0, 1.0)
            } else {
                (m / base_mean, md / base_median)
            };
            entries.push(RelativeEntry {
                setting,
                algorithm,
                runs: regrets.len(),
                mean_regret: m,
                median_regret: md,
                relative_mean,
                relative_median,
            });
        }
    }
    Ok(RelativeTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::Mode;

    fn rec(algorithm: AlgorithmId, seed: u64, regret: f64) -> RunRecord {
        RunRecord {
            seed,
            algorithm,
            instance: InstanceKind::Uniform,
            num_arms: 4,
            horizon: 100,
            epsilon: 0.1,
            delta: 0.1,
            mode: Mode::Experiment,
            total_regret: regret,
            explore_pulls: 0,
            commit_pulls: 0,
            peak_retained: 1,
            committed_gap: 0.0,
            wall_time_ms: 0.0,
            error: None,
        }
    }

    fn setting() -> Setting {
        Setting {
            kind: InstanceKind::Uniform,
            num_arms: 4,
            horizon: 100,
        }
    }

    #[test]
    fn ratios() {
        let recs = vec![
            rec(BASELINE, 0, 4.0),
            rec(BASELINE, 1, 8.0),
            rec(AlgorithmId::BucketLog, 0, 2.0),
            rec(AlgorithmId::BucketLog, 1, 4.0),
        ];
        let t = aggregate(&recs).unwrap();
        let b = t.get(setting(), BASELINE).unwrap();
        assert_eq!((b.relative_mean, b.relative_median), (1.0, 1.0));
        let e = t.get(setting(), AlgorithmId::BucketLog).unwrap();
        assert_eq!((e.relative_mean, e.relative_median), (0.5, 0.5));
    }

    #[test]
    fn mean_and_median_diverge() {
        let recs = vec![
            rec(BASELINE, 0, 10.0),
            rec(BASELINE, 1, 10.0),
            rec(BASELINE, 2, 10.0),
            rec(AlgorithmId::BucketLog, 0, 1.0),
            rec(AlgorithmId::BucketLog, 1, 100.0),
            rec(AlgorithmId::BucketLog, 2, 1.0),
        ];
        let e = aggregate(&recs)
            .unwrap()
            .get(setting(), AlgorithmId::BucketLog)
            .unwrap()
            .clone();
        assert!((e.relative_mean - 3.4).abs() < 1e-12);
        assert!((e.relative_median - 0.1).abs() < 1e-12);
    }

    #[test]
    fn missing_baseline_names_cell() {
        let err = aggregate(&[rec(AlgorithmId::BucketLog, 0, 1.0)]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("uniform K=4 T=100"), "{msg}");
    }
}
