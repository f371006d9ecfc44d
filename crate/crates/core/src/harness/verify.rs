//! Self-checks behind the `verify` subcommand.

use super::oracle::brute_force_expected_regret;
use crate::algorithms::{
    build_policy, default_epsilon, explore_and_commit, AlgorithmId, EpsBestParams, EpsilonRule,
    Mode, NaiveElimination, UniformExploration,
};
use crate::env::{audit_single_pass, regret_from_log, BanditEnvironment, StreamInstance};
use crate::error::Result;
use crate::instances::{gen_standout, gen_trap, gen_uniform, shuffle_stream, StandoutConfig};
use crate::stats::{mean, std_dev};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Monte Carlo regret of uniform exploration against the enumerated value.
pub fn oracle_agreement(means: &[f64], pulls: u64, horizon: u64, seeds: u64) -> Result<Check> {
    let inst = StreamInstance::from_means(means)?;
    let exact = brute_force_expected_regret(&inst, pulls, horizon)?;
    let mut regrets = Vec::with_capacity(seeds as usize);
    for seed in 0..seeds {
        let mut env = BanditEnvironment::new(inst.clone(), horizon, seed);
        let out = explore_and_commit(&mut env, &mut UniformExploration::new(pulls))?;
        regrets.push(out.total_regret);
    }
    let m = mean(&regrets).unwrap_or(f64::NAN);
    let se = std_dev(&regrets).unwrap_or(0.0) / (seeds as f64).sqrt();
    let passed = (m - exact).abs() <= 3.0 * se.max(1e-12);
    Ok(Check {
        name: format!("oracle agreement {means:?} N={pulls} T={horizon}"),
        passed,
        detail: format!(
            "monte carlo {m:.5} vs exact {exact:.5} (3 se = {:.5}, {seeds} seeds)",
            3.0 * se
        ),
    })
}

/// Memory, budget, single-pass and regret-conservation checks for every
/// algorithm on a few small streams.
pub fn invariant_suite(seeds: u64) -> Result<Vec<Check>> {
    type Generator = Box<dyn Fn(u64) -> Result<StreamInstance>>;
    let streams: Vec<(&str, Generator)> = vec![
        ("uniform K=64", Box::new(|s| gen_uniform(64, s))),
        (
            "standout K=40",
            Box::new(|s| gen_standout(40, s, &StandoutConfig::default())),
        ),
        ("trap K=30", Box::new(|s| gen_trap(30, 0.2, s))),
        ("uniform K=7", Box::new(|s| gen_uniform(7, s))),
    ];

    let mut memory = Vec::new();
    let mut budget = Vec::new();
    let mut single_pass = Vec::new();
    let mut conservation = Vec::new();
    let mut naive = Vec::new();
    for (label, make) in &streams {
        for mode in [Mode::Experiment, Mode::Theory] {
            for seed in 0..seeds {
                let inst = shuffle_stream(&make(seed)?, seed);
                let k = inst.len();
                let horizon = match mode {
                    Mode::Experiment => 2000 * k as u64,
                    Mode::Theory => 50_000_000,
                };
                let eps = match mode {
                    Mode::Experiment => default_epsilon(k, horizon, EpsilonRule::Expected),
                    Mode::Theory => 0.3,
                };
                let params = EpsBestParams::new(eps, 0.1, mode)?;
                for id in AlgorithmId::ALL {
                    let mut env =
                        BanditEnvironment::new(inst.clone(), horizon, seed).with_pull_log();
                    let mut policy = build_policy(id, params, k, horizon);
                    let out = explore_and_commit(&mut env, policy.as_mut())?;
                    let tag = format!("{id} on {label} ({mode}, seed {seed})");
                    if out.peak_retained > id.memory_bound(k) {
                        memory.push(format!(
                            "{tag}: peak {} > {}",
                            out.peak_retained,
                            id.memory_bound(k)
                        ));
                    }
                    if out.explore_pulls + out.commit_pulls != horizon {
                        budget.push(tag.clone());
                    }
                    let log = env.pull_log().expect("log enabled");
                    if let Err(pos) = audit_single_pass(log) {
                        single_pass.push(format!("{tag}: event {pos}"));
                    }
                    let replay = regret_from_log(log, &inst);
                    if (replay - out.total_regret).abs() > 1e-9 * replay.abs().max(1.0) {
                        conservation.push(format!("{tag}: {replay} vs {}", out.total_regret));
                    }
                    if id == AlgorithmId::NaiveElimination {
                        let schedule = k as u64 * NaiveElimination::pulls_per_arm(&params, k);
                        if schedule <= horizon && out.explore_pulls != schedule {
                            naive.push(format!("{tag}: {} vs {schedule}", out.explore_pulls));
                        }
                    }
                }
            }
        }
    }
    let check = |name: &str, failures: Vec<String>| Check {
        name: name.to_owned(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            "no violations".into()
        } else {
            format!("{} violations, first: {}", failures.len(), failures[0])
        },
    };
    Ok(vec![
        check("memory bounds", memory),
        check("pull budget", budget),
        check("single pass", single_pass),
        check("regret conservation", conservation),
        check("naive elimination schedule", naive),
    ])
}

/// Everything `verify` runs.
pub fn run_all() -> Result<Vec<Check>> {
    let mut checks = vec![
        oracle_agreement(&[0.75, 0.25], 1, 3, 2000)?,
        oracle_agreement(&[0.4, 0.6, 0.5], 2, 20, 2000)?,
    ];
    checks.extend(invariant_suite(3)?);
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_check_passes() {
        assert!(oracle_agreement(&[0.75, 0.25], 1, 3, 2000).unwrap().passed);
    }

    #[test]
    fn invariants_hold() {
        for c in invariant_suite(1).unwrap() {
            assert!(c.passed, "{c}");
        }
    }
}
