//! Monte Carlo drivers, the reflected Brownian motion oracle, KS statistics,
//! exact invariant suites and convergence-trend studies.

pub mod convergence;
pub mod distribution;
pub mod exact;
pub mod oracle;
pub mod plan;
pub mod report;
pub mod stats;

pub use convergence::{convergence_csv, convergence_study, trend_check, ConvergencePlan, ConvergenceRow};
pub use distribution::{donsker_check, run_distribution_suite, DistributionOptions};
pub use exact::{default_exact_plans, reflection_modulus_pairs, run_exact_suite};
pub use oracle::{reflected_bm_draws, reflected_bm_oracle, OracleDraw};
pub use plan::{auto_window, TrialPlan};
pub use report::{CheckKind, CheckResult, SuiteReport, ViolationRecord};
pub use stats::{ks_one_sample, ks_two_sample, normal_cdf};

/// Run `f` on a dedicated pool of `workers` threads (all cores if `None`).
///
/// Results never depend on the worker count: every parallel map collects in
/// input order before folding.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    builder.build().expect("thread pool").install(f)
}
