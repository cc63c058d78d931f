//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! The process fails when an exact criterion fails. Statistical criteria
//! print their statistics and a FAIL line when out of tolerance, but only
//! fail the process when `RWFPP_STRICT_STATS` is set; the soft convergence
//! trend only ever warns.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use rwfpp::cli::statistical_plan;
use rwfpp::harness::distribution::boundary_samples;
use rwfpp::harness::stats::mean;
use rwfpp::harness::{
    convergence_study, default_exact_plans, donsker_check, reflected_bm_oracle, reflection_modulus_pairs,
    run_distribution_suite, run_exact_suite, trend_check, ConvergencePlan, DistributionOptions, SuiteReport,
};
use rwfpp_core::{
    propagate_in_window, rescaled_distance, walk_position, Distance, IncrementField, IncrementSpec, JumpSet,
    Rational64, Scale, Side, Site, Window,
};

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Exact,
    Statistical,
    Soft,
}

struct Outcome {
    id: u32,
    kind: Kind,
    passed: bool,
}

fn report(outcomes: &mut Vec<Outcome>, id: u32, kind: Kind, passed: bool, title: &str, detail: String) {
    let tag = match (passed, kind) {
        (true, _) => "PASS",
        (false, Kind::Soft) => "WARN",
        (false, _) => "FAIL",
    };
    println!("[{tag}] criterion {id:>2}: {title}: {detail}");
    outcomes.push(Outcome { id, kind, passed });
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn dijkstra_equivalence() -> (bool, String) {
    let start = Instant::now();
    let window = Window::new(-20, 20, 0, 39).expect("window");
    let mut compared = 0usize;
    let mut mismatches = Vec::new();
    for spec in [IncrementSpec::simple(), IncrementSpec::uniform4()] {
        for (jname, jumps) in [("fig5", JumpSet::fig5()), ("cross3", JumpSet::cross3())] {
            for seed in 0..100u64 {
                let field = IncrementField::new(seed, spec.clone());
                let source = Site::new(0, 0);
                let oracle = common::dijkstra(&field, &jumps, source, window.t_max, window);
                let frontier = propagate_in_window(&field, &jumps, source, u32::MAX, window.t_max, window)
                    .expect("propagate");
                compared += 1;
                if common::frontier_map(&frontier) != oracle {
                    mismatches.push(format!("{}/{jname}/seed {seed}", spec.name()));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = mismatches.is_empty() && elapsed < Duration::from_secs(30);
    (ok, format!("{compared} frontiers, {} mismatches {:?}, {}", mismatches.len(), mismatches, secs(elapsed)))
}

fn exact_check_line(report: &SuiteReport, ids: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ids {
        match report.check(id) {
            Some(c) => {
                ok &= c.passed;
                parts.push(format!("{id}: {} trials, {} violations", c.trials, c.violations));
            }
            None => {
                ok = false;
                parts.push(format!("{id}: missing"));
            }
        }
    }
    (ok, parts.join("; "))
}

fn zero_cost_and_asymmetry() -> (bool, String) {
    let scale = Scale::new(16).expect("scale");
    let r = Rational64::new;
    let window = Window::new(-200, 200, 0, 32).expect("window");
    let mut bad = Vec::new();
    for seed in 0..50u64 {
        let field = IncrementField::new(seed, IncrementSpec::simple());
        let jumps = JumpSet::fig5();
        let y = walk_position(&field, 0, 0, 16);
        let origin = (r(0, 1), r(0, 1));
        let on_path = (r(y, 4), r(1, 1));
        let forward = rescaled_distance(&field, &jumps, scale, origin, on_path, window).expect("forward");
        let back = rescaled_distance(&field, &jumps, scale, on_path, origin, window).expect("reverse");
        if forward != Distance::Finite(0) || back != Distance::Infinite {
            bad.push(seed);
        }
    }
    (bad.is_empty(), format!("50 seeds, failing seeds {bad:?}"))
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_rwfpp")).args(args).output().expect("spawn rwfpp")
}

fn determinism() -> (bool, String) {
    let dirs = [tempfile::tempdir().expect("tempdir"), tempfile::tempdir().expect("tempdir")];
    for (dir, workers) in dirs.iter().zip(["1", "4"]) {
        let out = run_cli(&[
            "--workers",
            workers,
            "--seed",
            "11",
            "--out-dir",
            dir.path().to_str().expect("utf8"),
            "verify",
            "--statistical",
            "--trials",
            "1000",
            "--stat-n",
            "100",
        ]);
        if out.status.code() != Some(0) {
            return (false, format!("verify with {workers} workers exited {:?}", out.status.code()));
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path())
        .expect("read dir")
        .map(|e| e.expect("entry").file_name())
        .collect();
    names.sort();
    let mut differing = Vec::new();
    for name in &names {
        let a = std::fs::read(dirs[0].path().join(name)).expect("read");
        let b = std::fs::read(dirs[1].path().join(name)).unwrap_or_default();
        if a != b {
            differing.push(name.to_string_lossy().into_owned());
        }
    }
    let count = std::fs::read_dir(dirs[1].path()).expect("read dir").count();
    let ok = differing.is_empty() && count == names.len();
    (ok, format!("{} files compared across 1 and 4 workers, differing {differing:?}", names.len()))
}

fn main() {
    let mut outcomes = Vec::new();

    let (ok, detail) = dijkstra_equivalence();
    report(&mut outcomes, 1, Kind::Exact, ok, "frontier equals Dijkstra oracle", detail);

    let start = Instant::now();
    let exact = run_exact_suite(&default_exact_plans()).expect("exact suite");
    let exact_time = start.elapsed();
    let (ok, detail) = exact_check_line(&exact, &["increment_domination", "reflection_order"]);
    let enough = exact.check("increment_domination").is_some_and(|c| c.trials >= 7200);
    report(
        &mut outcomes,
        2,
        Kind::Exact,
        ok && enough && exact_time < Duration::from_secs(120),
        "increment domination and reflection order",
        format!("{detail}; {}", secs(exact_time)),
    );
    let (ok, detail) = exact_check_line(&exact, &["disjoint_increments"]);
    report(&mut outcomes, 3, Kind::Exact, ok, "disjoint increments", detail);
    let (ok, detail) =
        exact_check_line(&exact, &["error_bound_d0.1", "error_bound_d0.5", "push_monotone", "window_margin"]);
    report(&mut outcomes, 4, Kind::Exact, ok, "error bound and push monotonicity", detail);

    let pairs = reflection_modulus_pairs(5, 200).expect("pairs");
    report(
        &mut outcomes,
        5,
        Kind::Exact,
        pairs.passed,
        "reflection modulus bound",
        format!("{} pair/side checks, {} violations", pairs.trials, pairs.violations),
    );

    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for spec in [IncrementSpec::simple(), IncrementSpec::uniform4()] {
        let c = donsker_check(&spec, 400, 0..10_000, 0.05).expect("donsker");
        ok &= c.passed;
        parts.push(format!("{} KS {:.4}", spec.name(), c.statistic.unwrap_or(f64::NAN)));
    }
    let elapsed = start.elapsed();
    report(
        &mut outcomes,
        6,
        Kind::Statistical,
        ok && elapsed < Duration::from_secs(60),
        "Donsker marginal at n = 400 (tol 0.05)",
        format!("{}; {}", parts.join(", "), secs(elapsed)),
    );

    let plan = statistical_plan(400, 5000, IncrementSpec::binom4(), "cross3", JumpSet::cross3());
    let opts = DistributionOptions::default();
    let dist = run_distribution_suite(&plan, &opts).expect("distribution suite");
    let stat = |id: &str| dist.check(id).and_then(|c| c.statistic).unwrap_or(f64::NAN);
    let ids = [
        "boundary_right_n400",
        "boundary_left_n400",
        "boundary_right_n400_mismatch",
        "boundary_left_n400_mismatch",
        "reflection_increment_it0_n400",
    ];
    let ok = ids.iter().all(|id| dist.check(id).is_some_and(|c| c.passed));
    let scale = Scale::new(400).expect("scale");
    let right = boundary_samples(&plan, scale, Side::Right).expect("samples");
    let oracle = reflected_bm_oracle(1.0, Side::Right, opts.oracle_trials, opts.oracle_seed, opts.oracle_dt)
        .expect("oracle");
    report(
        &mut outcomes,
        7,
        Kind::Statistical,
        ok,
        "boundary and reflection laws vs reflected BM (binom4, cross3, n = 400, tol 0.05)",
        format!(
            "KS right {:.4}, left {:.4}, reflection increment {:.4}; mismatch right {:.4}, left {:.4} (need > 0.3); \
             right boundary mean {:.4} vs oracle {:.4}",
            stat(ids[0]),
            stat(ids[1]),
            stat(ids[4]),
            stat(ids[2]),
            stat(ids[3]),
            mean(&right),
            mean(&oracle),
        ),
    );

    let (ok, detail) = zero_cost_and_asymmetry();
    report(&mut outcomes, 8, Kind::Exact, ok, "zero-cost path and reversed-time infinity", detail);

    let conv = ConvergencePlan::standard(IncrementSpec::binom4(), JumpSet::cross3());
    let rows = convergence_study(&conv).expect("convergence");
    let trend = trend_check(&rows);
    let data: Vec<String> =
        rows.iter().map(|r| format!("n {}: {:.4} (d* {:.4})", r.n, r.journey_statistic, r.dstar_statistic)).collect();
    report(&mut outcomes, 9, Kind::Soft, trend.passed, "convergence trend (soft)", data.join(", "));

    let (ok, detail) = determinism();
    report(&mut outcomes, 10, Kind::Exact, ok, "verify reports identical across worker counts", detail);

    let strict = std::env::var_os("RWFPP_STRICT_STATS").is_some();
    let fatal: Vec<u32> = outcomes
        .iter()
        .filter(|o| !o.passed && (o.kind == Kind::Exact || (strict && o.kind == Kind::Statistical)))
        .map(|o| o.id)
        .collect();
    let stat_failed: Vec<u32> =
        outcomes.iter().filter(|o| !o.passed && o.kind == Kind::Statistical).map(|o| o.id).collect();
    if !stat_failed.is_empty() && !strict {
        println!("statistical criteria out of tolerance (reported, not fatal): {stat_failed:?}");
    }
    if fatal.is_empty() {
        println!("acceptance: all exact criteria hold");
    } else {
        println!("acceptance: failing criteria {fatal:?}");
        std::process::exit(1);
    }
}
