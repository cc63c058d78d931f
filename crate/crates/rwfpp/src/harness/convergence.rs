use std::ops::Range;

use rayon::prelude::*;
use rwfpp_core::{
    epigraph_distance, journey_lattice, propagate, Distance, DistanceSample, IncrementField, IncrementSpec,
    Itinerary, JumpSet, Rational64, Scale, Side, Site,
};

use super::distribution::trial_seed;
use super::plan::{auto_window, with_window};
use super::report::{finish, CheckKind, CheckResult};
use super::stats::{ks_two_sample, median};
use crate::error::{AppError, Result};

/// Discrete-to-discrete trend study against a reference scale `n_ref`.
#[derive(Debug, Clone)]
pub struct ConvergencePlan {
    pub spec: IncrementSpec,
    pub jumps: JumpSet,
    pub n_values: Vec<u64>,
    pub n_ref: u64,
    /// Seeds for the journey-endpoint laws.
    pub seeds: Range<u64>,
    /// Seeds for the epigraph statistic.
    pub dstar_seeds: Range<u64>,
    pub itinerary: Itinerary,
    pub horizon: Rational64,
    /// Distances above this are treated as `∞` in the epigraph statistic.
    pub max_dist: u32,
}

impl ConvergencePlan {
    /// `n ∈ {25, 100, 400}` against `n_ref = 1600`, journey `(0, 0; 1/5; +1)`
    /// to horizon 1.
    pub fn standard(spec: IncrementSpec, jumps: JumpSet) -> Self {
        let r = Rational64::new;
        ConvergencePlan {
            spec,
            jumps,
            n_values: vec![25, 100, 400],
            n_ref: 1600,
            seeds: 0..4000,
            dstar_seeds: 0..60,
            itinerary: Itinerary::new(r(0, 1), r(0, 1), vec![r(1, 5)], vec![Side::Right]).expect("valid"),
            horizon: r(1, 1),
            max_dist: 3,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AppError::Config("convergence n values must increase".into()));
        }
        if self.n_values.last().is_some_and(|&n| n > self.n_ref) {
            return Err(AppError::Config("reference n must be at least every n".into()));
        }
        if self.seeds.is_empty() || self.dstar_seeds.is_empty() {
            return Err(AppError::Config("convergence seed ranges must be nonempty".into()));
        }
        if self.horizon <= self.itinerary.last_time() {
            return Err(AppError::Config("horizon must exceed the itinerary's last jump".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: u64,
    /// KS distance between journey-endpoint laws at `n` and at `n_ref`.
    pub journey_statistic: f64,
    /// Median over seeds of `d⋆` between sampled distance functions.
    pub dstar_statistic: f64,
}

fn journey_endpoints(plan: &ConvergencePlan, n: u64) -> Result<Vec<f64>> {
    let scale = Scale::new(n)?;
    let it = &plan.itinerary;
    let window = auto_window(&plan.spec, &plan.jumps, scale, it.x(), it.s(), plan.horizon);
    let norm = plan.spec.std_dev() * scale.sqrt_n();
    let seeds: Vec<u64> = plan.seeds.clone().collect();
    let out: rwfpp_core::Result<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| {
            let field = IncrementField::new(trial_seed(seed, n), plan.spec.clone());
            let g = with_window(window, false, |w| journey_lattice(&field, &plan.jumps, scale, it, plan.horizon, w))?;
            Ok(*g.values.last().expect("nonempty") as f64 / norm)
        })
        .collect();
    Ok(out?)
}

/// Keys `u = (0, 0)`, `v = (y, t)` with `y ∈ {−1, −4/5, …, 1}`,
/// `t ∈ {1/5, …, 1}`.
pub fn key_grid() -> Vec<(Rational64, Rational64)> {
    let mut keys = Vec::new();
    for ty in 1..=5 {
        for y in -5..=5 {
            keys.push((Rational64::new(y, 5), Rational64::new(ty, 5)));
        }
    }
    keys
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `D^n((0, 0), v)` over the key grid, truncated at `max_dist`.
pub fn distance_sample(plan: &ConvergencePlan, n: u64, seed: u64) -> Result<DistanceSample> {
    let scale = Scale::new(n)?;
    let keys = key_grid();
    let t_max = keys.iter().map(|k| k.1).max().expect("nonempty grid");
    let zero = Rational64::from_integer(0);
    let window = auto_window(&plan.spec, &plan.jumps, scale, zero, zero, t_max);
    let field = IncrementField::new(trial_seed(seed, n), plan.spec.clone());
    let end = scale.time_step(t_max);
    let frontier =
        with_window(window, false, |w| propagate(&field, &plan.jumps, Site::new(0, 0), plan.max_dist, end, w))?;
    let points = keys
        .iter()
        .map(|&(y, t)| {
            let site = scale.space_lattice(y).zip(scale.time_lattice(t));
            let d = site
                .and_then(|(x, t)| frontier.get(Site::new(x, t)))
                .map_or(Distance::Infinite, Distance::Finite);
            ((0.0, 0.0), (to_f64(y), to_f64(t)), d)
        })
        .collect();
    Ok(DistanceSample::new(points)?)
}

/// One row per `n`: journey-endpoint KS against `n_ref` and the median
/// epigraph distance to the `n_ref` sample with the same seed.
pub fn convergence_study(plan: &ConvergencePlan) -> Result<Vec<ConvergenceRow>> {
    plan.validate()?;
    let reference = journey_endpoints(plan, plan.n_ref)?;
    let dstar_seeds: Vec<u64> = plan.dstar_seeds.clone().collect();
    let ref_samples: Result<Vec<DistanceSample>> =
        dstar_seeds.par_iter().map(|&s| distance_sample(plan, plan.n_ref, s)).collect();
    let ref_samples = ref_samples?;

    let mut rows = Vec::new();
    for &n in &plan.n_values {
        let ends = journey_endpoints(plan, n)?;
        let journey_statistic = ks_two_sample(&ends, &reference)?;
        let d: Result<Vec<f64>> = dstar_seeds
            .par_iter()
            .zip(&ref_samples)
            .map(|(&s, reference)| Ok(epigraph_distance(&distance_sample(plan, n, s)?, reference)?))
            .collect();
        let dstar_statistic = median(&d?).expect("nonempty seeds");
        rows.push(ConvergenceRow { n, journey_statistic, dstar_statistic });
    }
    Ok(rows)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "statistic", "dstar"])?;
    for r in rows {
        w.write_record([r.n.to_string(), r.journey_statistic.to_string(), r.dstar_statistic.to_string()])?;
    }
    finish(w)
}

/// Soft trend check: the journey statistic weakly decreases on at least
/// `min(2, steps)` consecutive steps.
pub fn trend_check(rows: &[ConvergenceRow]) -> CheckResult {
    let steps = rows.len().saturating_sub(1);
    let down = rows.windows(2).filter(|w| w[1].journey_statistic <= w[0].journey_statistic).count();
    let required = steps.min(2);
    let data: Vec<String> = rows.iter().map(|r| format!("n={}: {:.4}", r.n, r.journey_statistic)).collect();
    CheckResult {
        id: "convergence_trend".into(),
        kind: CheckKind::Soft,
        trials: steps as u64,
        violations: (steps - down) as u64,
        worst_margin: None,
        statistic: Some(down as f64),
        tolerance: Some(required as f64),
        passed: down >= required,
        note: Some(data.join(", ")),
        examples: Vec::new(),
    }
}
