//! Streaming policies behind one contract: consume the stream through a
//! [`BanditEnvironment`] and name the arm to commit to.

mod asp;
mod bucket;
mod commit;
mod jin;
mod naive;
pub mod params;
mod uniform;

use serde::{Deserialize, Serialize};

pub use asp::AggressiveSelectivePromotion;
pub use bucket::{BucketLog, BucketLogLog};
pub use commit::{default_epsilon, explore_and_commit, EpsilonRule, PolicyOutcome};
pub use jin::JinSingleArm;
pub use naive::NaiveElimination;
pub use params::{EpsBestParams, Mode};
pub use uniform::UniformExploration;

use crate::env::{ArmHandle, BanditEnvironment};
use crate::error::{Error, Result};

/// A single-pass policy that explores the stream and returns a candidate.
///
/// When the horizon runs out mid-exploration the policy returns its current
/// incumbent instead of failing; only contract violations surface as errors.
pub trait StreamingPolicy {
    fn id(&self) -> AlgorithmId;

    fn explore(&mut self, env: &mut BanditEnvironment) -> Result<ArmHandle>;
}

/// Stable identifiers used on the command line and in result files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmId {
    #[serde(rename = "uniform-exploration")]
    UniformExploration,
    #[serde(rename = "naive-elimination")]
    NaiveElimination,
    #[serde(rename = "asp-logstar")]
    AspLogStar,
    #[serde(rename = "bucket-log")]
    BucketLog,
    #[serde(rename = "bucket-loglog")]
    BucketLogLog,
    #[serde(rename = "jin-single-arm")]
    JinSingleArm,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 6] = [
        AlgorithmId::UniformExploration,
        AlgorithmId::NaiveElimination,
        AlgorithmId::BucketLog,
        AlgorithmId::BucketLogLog,
        AlgorithmId::AspLogStar,
        AlgorithmId::JinSingleArm,
    ];

    /// The five epsilon-best subroutines (everything except the baseline).
    pub const EPS_BEST: [AlgorithmId; 5] = [
        AlgorithmId::NaiveElimination,
        AlgorithmId::BucketLog,
        AlgorithmId::BucketLogLog,
        AlgorithmId::AspLogStar,
        AlgorithmId::JinSingleArm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgorithmId::UniformExploration => "uniform-exploration",
            AlgorithmId::NaiveElimination => "naive-elimination",
            AlgorithmId::AspLogStar => "asp-logstar",
            AlgorithmId::BucketLog => "bucket-log",
            AlgorithmId::BucketLogLog => "bucket-loglog",
            AlgorithmId::JinSingleArm => "jin-single-arm",
        }
    }

    /// Largest number of simultaneously retained arms on a `k`-arm stream.
    pub fn memory_bound(self, k: usize) -> usize {
        match self {
            AlgorithmId::UniformExploration
            | AlgorithmId::NaiveElimination
            | AlgorithmId::JinSingleArm => 1,
            AlgorithmId::AspLogStar => asp::num_levels(k),
            AlgorithmId::BucketLog => 4 * bucket::log_levels(k),
            AlgorithmId::BucketLogLog => 4 * (bucket::loglog_levels(k) - 1) + 1,
        }
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgorithmId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::config(format!("unknown algorithm `{s}`")))
    }
}

/// Builds a policy for a `k`-arm stream with horizon `horizon`.
///
/// `params` is ignored by uniform exploration, which uses its default
/// per-arm pull count.
pub fn build_policy(
    id: AlgorithmId,
    params: EpsBestParams,
    k: usize,
    horizon: u64,
) -> Box<dyn StreamingPolicy + Send> {
    match id {
        AlgorithmId::UniformExploration => {
            Box::new(UniformExploration::with_default_pulls(k, horizon))
        }
        AlgorithmId::NaiveElimination => Box::new(NaiveElimination::new(params)),
        AlgorithmId::AspLogStar => Box::new(AggressiveSelectivePromotion::new(params)),
        AlgorithmId::BucketLog => Box::new(BucketLog::new(params)),
        AlgorithmId::BucketLogLog => Box::new(BucketLogLog::new(params)),
        AlgorithmId::JinSingleArm => Box::new(JinSingleArm::new(params)),
    }
}

/// Keeps one stored arm: samples every arrival `pulls` times and replaces
/// the stored arm on a strictly higher empirical mean. The first arrival is
/// always stored.
pub(crate) fn single_incumbent_scan(env: &mut BanditEnvironment, pulls: u64) -> Result<ArmHandle> {
    let mut incumbent: Option<(ArmHandle, f64)> = None;
    while let Some(arm) = env.next_arm() {
        match env.batch_pull(arm, pulls) {
            Ok(mean) => {
                if incumbent.is_none_or(|(_, best)| mean > best) {
                    if let Some((old, _)) = incumbent {
                        env.drop_arm(old)?;
                    }
                    env.retain(arm)?;
                    incumbent = Some((arm, mean));
                }
            }
            Err(e) if e.is_out_of_budget() => {
                return Ok(incumbent.map_or(arm, |(h, _)| h));
            }
            Err(e) => return Err(e.into()),
        }
    }
    incumbent
        .map(|(h, _)| h)
        .ok_or_else(|| Error::domain("empty stream"))
}
