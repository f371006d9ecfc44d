use proptest::prelude::*;

use banditstream::algorithms::{build_policy, AlgorithmId, EpsBestParams, Mode};
use banditstream::env::{audit_single_pass, regret_from_log, BanditEnvironment, StreamInstance};
use banditstream::explore_and_commit;
use banditstream::harness::io::{format_g6, parse_records, records_to_csv};
use banditstream::harness::{run_experiment, ExperimentConfig, SeedRange};
use banditstream::instances::{
    gen_lower_bound_hard, gen_trap, gen_uniform, shuffle_stream, InstanceKind,
};

fn algorithm() -> impl Strategy<Value = AlgorithmId> {
    prop::sample::select(AlgorithmId::ALL.to_vec())
}

fn mode() -> impl Strategy<Value = Mode> {
    prop_oneof![Just(Mode::Experiment), Just(Mode::Theory)]
}

fn means() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0f64], 1..40)
}

fn run(
    means: &[f64],
    id: AlgorithmId,
    mode: Mode,
    eps: f64,
    horizon: u64,
    seed: u64,
) -> (banditstream::PolicyOutcome, BanditEnvironment) {
    let inst = StreamInstance::from_means(means).unwrap();
    let params = EpsBestParams::new(eps, 0.1, mode).unwrap();
    let mut env = BanditEnvironment::new(inst, horizon, seed)
        .with_pull_log()
        .with_approx_threshold(500);
    let mut policy = build_policy(id, params, means.len(), horizon);
    let out = explore_and_commit(&mut env, policy.as_mut()).unwrap();
    (out, env)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conservation_budget_and_single_pass(
        means in means(),
        id in algorithm(),
        mode in mode(),
        eps in 0.05..0.9f64,
        horizon in 1u64..2_000_000,
        seed in any::<u64>(),
    ) {
        let horizon = horizon.max(means.len() as u64);
        let (out, env) = run(&means, id, mode, eps, horizon, seed);
        let log = env.pull_log().unwrap();
        prop_assert_eq!(audit_single_pass(log), Ok(()));
        let replay = regret_from_log(log, env.instance());
        prop_assert!((replay - out.total_regret).abs() <= 1e-9 * replay.max(1.0));
        prop_assert!(out.total_regret >= 0.0);
        prop_assert_eq!(out.explore_pulls + out.commit_pulls, horizon);
        prop_assert!(out.peak_retained <= id.memory_bound(means.len()));
        let gap = env.instance().best_mean() - out.committed_mean;
        prop_assert!((out.total_regret - (out.explore_regret + gap * out.commit_pulls as f64)).abs()
            <= 1e-6 * out.total_regret.max(1.0));
    }

    #[test]
    fn determinism(
        means in means(),
        id in algorithm(),
        mode in mode(),
        eps in 0.05..0.9f64,
        horizon in 1u64..500_000,
        seed in any::<u64>(),
    ) {
        let horizon = horizon.max(means.len() as u64);
        let (a, env_a) = run(&means, id, mode, eps, horizon, seed);
        let (b, env_b) = run(&means, id, mode, eps, horizon, seed);
        prop_assert_eq!(a.total_regret.to_bits(), b.total_regret.to_bits());
        prop_assert_eq!(a, b);
        prop_assert_eq!(env_a.pull_log(), env_b.pull_log());
    }

    #[test]
    fn generators_stay_in_range(k in 1usize..300, seed in any::<u64>(), beta in 0.001..=0.5f64) {
        let u = gen_uniform(k, seed).unwrap();
        prop_assert!(u.means().iter().all(|&m| m > 0.0 && m < 1.0));
        let t = gen_trap(k, beta, seed).unwrap();
        let hidden = t.means().iter().filter(|&&m| (m - 0.5 - beta).abs() < 1e-12).count();
        let flat = t.means().iter().filter(|&&m| m == 0.5).count();
        prop_assert_eq!(hidden, 1);
        prop_assert_eq!(hidden + flat, k);
    }

    #[test]
    fn hard_composition_values(half in 2usize..100, extra in 0u64..100_000, seed in any::<u64>()) {
        let k = 2 * half;
        let horizon = k as u64 + extra;
        let inst = gen_lower_bound_hard(k, horizon, seed).unwrap();
        let delta = (k as f64 / horizon as f64).cbrt() / 8.0;
        let m = inst.means();
        prop_assert_eq!(m[..half].iter().filter(|&&x| (x - 0.5 - delta).abs() < 1e-12).count(), 1);
        prop_assert!(m[half..k - 1].iter().all(|&x| x == 0.5));
        prop_assert!(m[k - 1] == 0.5 || m[k - 1] == 0.75);
    }

    #[test]
    fn shuffle_preserves_multiset(means in means(), seed in any::<u64>()) {
        let inst = StreamInstance::from_means(&means).unwrap();
        let s = shuffle_stream(&inst, seed);
        let mut a = inst.means();
        let mut b = s.means();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        prop_assert_eq!(a, b);
        prop_assert_eq!(s.best_mean(), inst.best_mean());
        prop_assert_eq!(s.means()[s.best_index()], s.best_mean());
    }

    #[test]
    fn g6_keeps_six_digits(x in prop_oneof![-1e12..1e12f64, -1.0..1.0f64, 1e-9..1e-3f64]) {
        let back: f64 = format_g6(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-6 * x.abs() + f64::MIN_POSITIVE);
    }

    #[test]
    fn batch_pull_truncates_to_horizon(mean in 0.0..=1.0f64, horizon in 1u64..1000, n in 1u64..2000, seed in any::<u64>()) {
        let inst = StreamInstance::from_means(&[mean]).unwrap();
        let mut env = BanditEnvironment::new(inst, horizon, seed);
        let arm = env.next_arm().unwrap();
        let r = env.batch_pull(arm, n);
        prop_assert_eq!(r.is_err(), n > horizon);
        prop_assert_eq!(env.pulls_used(), n.min(horizon));
    }
}

#[test]
fn csv_round_trip_is_stable() {
    let mut cfg = ExperimentConfig::new(
        vec![InstanceKind::Uniform, InstanceKind::Standout],
        vec![12],
        vec!["300K".parse().unwrap()],
        AlgorithmId::ALL.to_vec(),
    );
    cfg.seeds = SeedRange { start: 0, end: 3 };
    let recs = run_experiment(&cfg).unwrap();
    let text = records_to_csv(&recs, false);
    let back = parse_records(&text, std::path::Path::new("mem.csv")).unwrap();
    assert_eq!(back.len(), recs.len());
    assert_eq!(records_to_csv(&back, false), text);
    for (a, b) in recs.iter().zip(&back) {
        assert_eq!(
            (a.seed, a.algorithm, a.explore_pulls, a.commit_pulls),
            (b.seed, b.algorithm, b.explore_pulls, b.commit_pulls)
        );
        assert!((a.total_regret - b.total_regret).abs() <= 5e-6 * a.total_regret.abs());
    }
}

#[test]
fn header_is_byte_stable() {
    let expected =
        "seed,algorithm,instance,K,T,epsilon,delta,mode,total_regret,explore_pulls,commit_pulls,\
                    peak_retained,committed_gap,wall_time_ms,error\n";
    assert_eq!(records_to_csv(&[], true), expected);
}
