use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rwfpp_core::journey::EXACT_SLACK;
use rwfpp_core::{
    approximation_bundle, journey_lattice, modulus, skorokhod_reflect, Error, IncrementField, IncrementSpec,
    Itinerary, JumpSet, Path, Rational64, Scale, Side,
};

use super::plan::{with_window, ItineraryLabel, TrialPlan};
use super::report::{CheckKind, CheckResult, SuiteReport, ViolationRecord};
use crate::error::Result;

const MAX_EXAMPLES: usize = 20;
const DELTAS: [f64; 2] = [0.1, 0.5];

/// Check ids of the per-trial exact suite, in report order.
pub const EXACT_CHECKS: [&str; 10] = [
    "zero_length_journey",
    "increment_domination",
    "reflection_order",
    "disjoint_increments",
    "push_monotone",
    "error_bound_d0.1",
    "error_bound_d0.5",
    "reflection_modulus_d0.1",
    "reflection_modulus_d0.5",
    "window_margin",
];

struct Probe {
    id: &'static str,
    margin: Option<f64>,
    violated: bool,
    time: i64,
    detail: String,
}

impl Probe {
    fn new(id: &'static str, margin: Option<f64>, violated: bool) -> Self {
        Probe { id, margin, violated, time: 0, detail: String::new() }
    }

    fn at(mut self, time: i64, detail: String) -> Self {
        self.time = time;
        self.detail = detail;
        self
    }
}

fn r(p: i64, q: i64) -> Rational64 {
    Rational64::new(p, q)
}

/// Itineraries of the default matrix: lengths 0 to 3, both sides.
pub fn default_itineraries() -> Vec<Itinerary> {
    let it = |sigma: &[(i64, i64)], eta: &[Side]| {
        Itinerary::new(r(0, 1), r(0, 1), sigma.iter().map(|&(p, q)| r(p, q)).collect(), eta.to_vec())
            .expect("valid default itinerary")
    };
    vec![
        Itinerary::start(r(0, 1), r(0, 1)),
        it(&[(1, 2)], &[Side::Right]),
        it(&[(1, 2)], &[Side::Left]),
        it(&[(1, 4), (3, 4)], &[Side::Right, Side::Left]),
        it(&[(1, 4), (3, 4), (5, 4)], &[Side::Left, Side::Right, Side::Right]),
    ]
}

/// The default matrix: three increment specs × two jump sets, each over
/// `n ∈ {1, 4, 16}`, seeds `0..100`, the default itineraries, horizon 2.
pub fn default_exact_plans() -> Vec<TrialPlan> {
    let specs = [IncrementSpec::simple(), IncrementSpec::uniform4(), IncrementSpec::binom4()];
    let jumps = [("fig5", JumpSet::fig5()), ("cross3", JumpSet::cross3())];
    let mut plans = Vec::new();
    for spec in &specs {
        for (jname, j) in &jumps {
            plans.push(TrialPlan {
                name: format!("{}-{}", spec.name(), jname),
                seeds: 0..100,
                n_values: vec![1, 4, 16],
                spec: spec.clone(),
                jumps_name: jname.to_string(),
                jumps: j.clone(),
                itineraries: default_itineraries(),
                horizon: r(2, 1),
                window: None,
                allow_non_square: false,
            });
        }
    }
    plans
}

fn run_trial(plan: &TrialPlan, scale: Scale, it: &Itinerary, seed: u64) -> rwfpp_core::Result<Vec<Probe>> {
    let field = IncrementField::new(seed, plan.spec.clone());
    let window = plan.window_for(scale, it);
    let fixed = plan.window.is_some();
    let h = plan.horizon;
    let m_horizon = *h.numer() as f64 / *h.denom() as f64;

    if it.is_empty() {
        let g = with_window(window, fixed, |w| journey_lattice(&field, &plan.jumps, scale, it, h, w))?;
        let y = rwfpp_core::walk::walk_lattice(&field, g.values[0], g.start, g.end());
        let first = g.values.iter().zip(&y.values).position(|(a, b)| a != b);
        let mut p = Probe::new("zero_length_journey", None, first.is_some());
        if let Some(m) = first {
            p = p.at(g.start + m as i64, "journey leaves the walk".into());
        }
        return Ok(vec![p]);
    }

    let b = with_window(window, fixed, |w| approximation_bundle(&field, &plan.jumps, scale, it, h, w))?;
    let mut out = Vec::new();

    let m = b.increment_domination_margin();
    let mut p = Probe::new("increment_domination", Some(m as f64), m < 0);
    if let Some(&(w, t)) = b.increment_domination_violations().first() {
        p = p.at(t, format!("w = {w}"));
    }
    out.push(p);

    let m = b.order_margin();
    let mut p = Probe::new("reflection_order", Some(m as f64), m < 0);
    if let Some(&t) = b.order_violations().first() {
        p = p.at(t, "R on the wrong side of G".into());
    }
    out.push(p);

    let m = b.disjointness_margin();
    let margin = (m != i64::MAX).then_some(m as f64);
    out.push(Probe::new("disjoint_increments", margin, !rwfpp_core::check_disjoint_increments(&b)));

    let m = b.push_increment_margin();
    let mut p = Probe::new("push_monotone", Some(m as f64), m < 0);
    if let Some(&t) = b.push_monotonicity_violations().first() {
        p = p.at(t, "push decreases".into());
    }
    out.push(p);

    for (delta, id) in DELTAS.iter().zip(["error_bound_d0.1", "error_bound_d0.5"]) {
        let m = b.error_bound_margin(*delta, m_horizon);
        let margin = m.is_finite().then_some(m);
        let mut p = Probe::new(id, margin, m < -EXACT_SLACK);
        if let Some(&(w, t)) = b.error_bound_violations(*delta, m_horizon).first() {
            p = p.at(t, format!("w = {w}"));
        }
        out.push(p);
    }
    for (delta, id) in DELTAS.iter().zip(["reflection_modulus_d0.1", "reflection_modulus_d0.5"]) {
        let m = b.modulus_bound_margin(*delta, m_horizon);
        out.push(Probe::new(id, Some(m), m < -EXACT_SLACK));
    }
    Ok(out)
}

struct Acc {
    trials: u64,
    violations: u64,
    worst: Option<f64>,
    examples: Vec<ViolationRecord>,
}

/// Run every exact per-realization check over the plans.
pub fn run_exact_suite(plans: &[TrialPlan]) -> Result<SuiteReport> {
    for p in plans {
        p.validate()?;
    }
    let mut tasks = Vec::new();
    for (pi, plan) in plans.iter().enumerate() {
        for scale in plan.scales()? {
            for (ii, _) in plan.itineraries.iter().enumerate() {
                for seed in plan.seeds.clone() {
                    tasks.push((pi, scale, ii, seed));
                }
            }
        }
    }
    let results: Vec<rwfpp_core::Result<Vec<Probe>>> = tasks
        .par_iter()
        .map(|&(pi, scale, ii, seed)| run_trial(&plans[pi], scale, &plans[pi].itineraries[ii], seed))
        .collect();

    let mut acc: Vec<Acc> =
        EXACT_CHECKS.iter().map(|_| Acc { trials: 0, violations: 0, worst: None, examples: Vec::new() }).collect();
    let slot = |id: &str| EXACT_CHECKS.iter().position(|&c| c == id).expect("known check id");
    let mut advice = None;

    for (&(pi, scale, ii, seed), res) in tasks.iter().zip(results) {
        let plan = &plans[pi];
        let record = |time_index: i64, detail: String| ViolationRecord {
            plan: plan.name.clone(),
            spec: plan.spec.name().to_string(),
            jumps: plan.jumps_name.clone(),
            seed,
            n: scale.n(),
            itinerary: ItineraryLabel(&plan.itineraries[ii]).to_string(),
            time_index,
            detail,
        };
        let probes = match res {
            Ok(p) => {
                let a = &mut acc[slot("window_margin")];
                a.trials += 1;
                p
            }
            Err(Error::MarginViolation { site, margin, window }) => {
                let a = &mut acc[slot("window_margin")];
                a.trials += 1;
                a.violations += 1;
                if a.examples.len() < MAX_EXAMPLES {
                    a.examples.push(record(site.t, format!("frontier at x = {} within {margin} of {window:?}", site.x)));
                }
                advice = Some("enlarge the plan window or remove it so trials size their own".to_string());
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        for p in probes {
            let a = &mut acc[slot(p.id)];
            a.trials += 1;
            if let Some(m) = p.margin {
                a.worst = Some(a.worst.map_or(m, |w: f64| w.min(m)));
            }
            if p.violated {
                a.violations += 1;
                if a.examples.len() < MAX_EXAMPLES {
                    a.examples.push(record(p.time, p.detail));
                }
            }
        }
    }

    let mut report = SuiteReport::new("exact");
    for (id, a) in EXACT_CHECKS.iter().zip(acc) {
        if a.trials == 0 {
            continue;
        }
        let mut c = CheckResult {
            id: id.to_string(),
            kind: CheckKind::Exact,
            trials: a.trials,
            violations: a.violations,
            worst_margin: a.worst,
            statistic: None,
            tolerance: None,
            passed: a.violations == 0,
            note: None,
            examples: a.examples,
        };
        if *id == "window_margin" {
            c.note = advice.clone();
        }
        report.push(c);
    }
    Ok(report)
}

fn random_pair(rng: &mut ChaCha8Rng) -> (Path, Path) {
    let len = rng.gen_range(2..60);
    let dt = [0.125, 0.25, 0.5, 1.0][rng.gen_range(0..4)];
    let start = rng.gen_range(-16i32..=16) as f64 * dt / 4.0;
    let mut walk = |x0: f64| {
        let mut v = vec![x0];
        for _ in 1..len {
            let last = *v.last().expect("nonempty");
            v.push(last + rng.gen_range(-16i32..=16) as f64 / 8.0);
        }
        v
    };
    let x0 = 0.0;
    let f = walk(x0);
    let g = walk(x0);
    (Path::new(start, dt, f).expect("valid"), Path::new(start, dt, g).expect("valid"))
}

/// Modulus bound for reflections of random common-start piecewise-linear
/// pairs, both sides; every value is dyadic so the comparison is exact.
pub fn reflection_modulus_pairs(seed: u64, pairs: usize) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let mut examples = Vec::new();
    for k in 0..pairs {
        let (f, g) = random_pair(&mut rng);
        let delta = rng.gen_range(1..=64) as f64 / 16.0;
        let m = rng.gen_range(1..=64) as f64 / 8.0;
        for side in [Side::Right, Side::Left] {
            let h = skorokhod_reflect(&f, &g, side)?;
            let slack = 2.0 * modulus(&f, delta, m) + modulus(&g, delta, m) - modulus(&h, delta, m);
            worst = worst.min(slack);
            if slack < -EXACT_SLACK {
                violations += 1;
                if examples.len() < MAX_EXAMPLES {
                    examples.push(ViolationRecord {
                        plan: "random_pairs".into(),
                        spec: String::new(),
                        jumps: String::new(),
                        seed,
                        n: 0,
                        itinerary: String::new(),
                        time_index: k as i64,
                        detail: format!("pair {k}, side {side:?}, delta {delta}, M {m}"),
                    });
                }
            }
        }
    }
    Ok(CheckResult {
        id: "reflection_modulus_random_pairs".into(),
        kind: CheckKind::Exact,
        trials: 2 * pairs as u64,
        violations,
        worst_margin: worst.is_finite().then_some(worst),
        statistic: None,
        tolerance: None,
        passed: violations == 0,
        note: None,
        examples,
    })
}
