use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rwfpp::cli::statistical_plan;
use rwfpp::harness::exact::default_itineraries;
use rwfpp::harness::stats::{mean, std_dev};
use rwfpp::harness::{
    convergence_study, default_exact_plans, ks_one_sample, ks_two_sample, normal_cdf, reflected_bm_draws,
    reflected_bm_oracle, run_distribution_suite, run_exact_suite, trend_check, with_workers, CheckKind,
    ConvergencePlan, ConvergenceRow, DistributionOptions, TrialPlan,
};
use rwfpp_core::{IncrementSpec, JumpSet, Rational64, Side};

#[test]
fn ks_identical_and_disjoint() {
    let a = [0.3, -1.0, 2.5, 2.5];
    assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
    assert_eq!(ks_two_sample(&[0.0], &[1.0]).unwrap(), 1.0);
    assert!(ks_two_sample(&[], &[1.0]).is_err());
}

#[test]
fn ks_same_uniform_law_is_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let a: Vec<f64> = (0..10_000).map(|_| rng.gen()).collect();
    let b: Vec<f64> = (0..10_000).map(|_| rng.gen()).collect();
    assert!(ks_two_sample(&a, &b).unwrap() < 0.027);
}

#[test]
fn ks_one_sample_against_normal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a: Vec<f64> = (0..10_000).map(|_| rng.sample(rand_distr::StandardNormal)).collect();
    assert!(ks_one_sample(&a, normal_cdf).unwrap() < 0.02);
    let shifted: Vec<f64> = a.iter().map(|x| x + 1.0).collect();
    assert!(ks_one_sample(&shifted, normal_cdf).unwrap() > 0.3);
}

#[test]
fn oracle_reflection_stays_on_its_side() {
    for side in [Side::Right, Side::Left] {
        for d in reflected_bm_draws(1.0, side, 500, 3, 1e-3).unwrap() {
            match side {
                Side::Right => assert!(d.reflected >= d.barrier),
                Side::Left => assert!(d.reflected <= d.barrier),
            }
        }
    }
}

#[test]
fn oracle_mean_is_stable_under_grid_refinement() {
    let coarse = reflected_bm_oracle(1.0, Side::Right, 100_000, 1, 1e-3).unwrap();
    let fine = reflected_bm_oracle(1.0, Side::Right, 100_000, 2, 5e-4).unwrap();
    let se = (std_dev(&coarse).powi(2) / coarse.len() as f64 + std_dev(&fine).powi(2) / fine.len() as f64).sqrt();
    assert!((mean(&coarse) - mean(&fine)).abs() <= 3.0 * se);
    // E Λ_R(B₁, B₂)(1) = 2/√π; the grid misses part of the running infimum
    let exact = 2.0 / std::f64::consts::PI.sqrt();
    assert!((mean(&fine) - exact).abs() < 0.05);
}

#[test]
fn oracle_concentrates_for_small_t() {
    let t = 1e-4;
    let s = reflected_bm_oracle(t, Side::Left, 2000, 4, 1e-3 * t).unwrap();
    let within = s.iter().filter(|x| x.abs() <= 3.0 * t.sqrt()).count();
    assert!(within as f64 >= 0.95 * s.len() as f64);
}

#[test]
fn oracle_rejects_coarse_grid() {
    assert!(reflected_bm_oracle(1.0, Side::Right, 10, 0, 0.01).is_err());
    assert!(reflected_bm_oracle(0.0, Side::Right, 10, 0, 1e-6).is_err());
}

#[test]
fn exact_suite_rejects_empty_seed_range() {
    let mut plan = default_exact_plans().remove(0);
    plan.seeds = 5..5;
    assert!(run_exact_suite(&[plan]).is_err());
}

#[test]
fn simple_walk_fig5_single_jump_has_no_violations() {
    let r = Rational64::new;
    let plan = TrialPlan {
        name: "simple-fig5".into(),
        seeds: 0..100,
        n_values: vec![1, 4, 16],
        spec: IncrementSpec::simple(),
        jumps_name: "fig5".into(),
        jumps: JumpSet::fig5(),
        itineraries: default_itineraries().into_iter().filter(|it| it.len() == 1).collect(),
        horizon: r(2, 1),
        window: None,
        allow_non_square: false,
    };
    let report = run_exact_suite(&[plan]).unwrap();
    assert!(report.passed);
    assert!(report.checks.iter().all(|c| c.violations == 0));
    let order = report.check("reflection_order").unwrap();
    assert!(order.worst_margin.unwrap() >= 0.0);
}

#[test]
fn exact_suite_is_independent_of_workers() {
    let plans = default_exact_plans();
    let a = with_workers(Some(1), || run_exact_suite(&plans).unwrap());
    let b = with_workers(Some(4), || run_exact_suite(&plans).unwrap());
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn distribution_suite_flags_unrescaled_runs_informational() {
    let mut plan = statistical_plan(100, 600, IncrementSpec::binom4(), "cross3", JumpSet::cross3());
    plan.n_values = vec![1, 100];
    let opts = DistributionOptions { oracle_trials: 600, ..DistributionOptions::default() };
    let report = run_distribution_suite(&plan, &opts).unwrap();
    for c in &report.checks {
        let want = if c.id.ends_with("_n1") || c.id.contains("_n1_") { CheckKind::Informational } else { CheckKind::Statistical };
        assert_eq!(c.kind, want, "{}", c.id);
    }
    for id in ["boundary_right_n100_mismatch", "boundary_left_n100_mismatch"] {
        let c = report.check(id).unwrap();
        assert!(c.passed && c.statistic.unwrap() > 0.3, "{id}");
    }
    let again = run_distribution_suite(&plan, &opts).unwrap();
    assert_eq!(report.to_json().unwrap(), again.to_json().unwrap());
}

fn small_convergence(n_values: Vec<u64>, n_ref: u64) -> ConvergencePlan {
    let mut plan = ConvergencePlan::standard(IncrementSpec::binom4(), JumpSet::cross3());
    plan.n_values = n_values;
    plan.n_ref = n_ref;
    plan.seeds = 0..200;
    plan.dstar_seeds = 0..4;
    plan
}

#[test]
fn convergence_against_itself_is_zero() {
    let rows = convergence_study(&small_convergence(vec![16], 16)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].journey_statistic, 0.0);
    assert_eq!(rows[0].dstar_statistic, 0.0);
}

#[test]
fn convergence_row_count_and_validation() {
    let rows = convergence_study(&small_convergence(vec![4, 16, 64], 256)).unwrap();
    assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![4, 16, 64]);
    assert!(convergence_study(&small_convergence(vec![16, 4], 64)).is_err());
    assert!(convergence_study(&small_convergence(vec![4, 128], 64)).is_err());
}

#[test]
fn trend_check_counts_decreasing_steps() {
    let row = |n, s| ConvergenceRow { n, journey_statistic: s, dstar_statistic: 0.0 };
    assert!(trend_check(&[row(25, 0.3), row(100, 0.2), row(400, 0.2)]).passed);
    let up = trend_check(&[row(25, 0.3), row(100, 0.4), row(400, 0.2)]);
    assert!(!up.passed);
    assert_eq!(up.kind, CheckKind::Soft);
}
