use std::collections::BTreeMap;

use rayon::prelude::*;
use rwfpp_core::increment::derive_seed;
use rwfpp_core::walk::walk_lattice;
use rwfpp_core::{
    approximation_bundle, boundary_lattice, Curve, IncrementField, IncrementSpec, Rational64, Scale, Side, Site,
};

use super::oracle::reflected_bm_oracle;
use super::plan::{auto_window, with_window, ItineraryLabel, TrialPlan};
use super::report::{finish, CheckKind, CheckResult, Sample, SuiteReport};
use super::stats::{ks_one_sample, ks_two_sample, normal_cdf};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct DistributionOptions {
    pub oracle_trials: usize,
    pub oracle_dt: f64,
    pub oracle_seed: u64,
    /// Largest KS statistic accepted against the matching oracle.
    pub tolerance: f64,
    /// Smallest KS statistic required against the wrong-side oracle.
    pub mismatch_threshold: f64,
}

impl Default for DistributionOptions {
    fn default() -> Self {
        DistributionOptions {
            oracle_trials: 5000,
            oracle_dt: 1e-3,
            oracle_seed: 0x0b5e_55ed,
            tolerance: 0.05,
            mismatch_threshold: 0.3,
        }
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Right => "right",
        Side::Left => "left",
    }
}

/// Field seed for a statistical trial: independent across `n`.
pub fn trial_seed(seed: u64, n: u64) -> u64 {
    derive_seed(seed, n)
}

/// `(σ√n)⁻¹`-normalized terminal value of the distance-one boundary curve
/// from the origin, one per seed.
pub fn boundary_samples(plan: &TrialPlan, scale: Scale, side: Side) -> Result<Vec<f64>> {
    let zero = Rational64::from_integer(0);
    let window = plan.window.unwrap_or_else(|| auto_window(&plan.spec, &plan.jumps, scale, zero, zero, plan.horizon));
    let end = scale.time_step(plan.horizon);
    let norm = plan.spec.std_dev() * scale.sqrt_n();
    let seeds: Vec<u64> = plan.seeds.clone().collect();
    let out: rwfpp_core::Result<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| {
            let field = IncrementField::new(trial_seed(seed, scale.n()), plan.spec.clone());
            let b = with_window(window, plan.window.is_some(), |w| {
                boundary_lattice(&field, &plan.jumps, Site::new(0, 0), side, end, w)
            })?;
            Ok(*b.values.last().expect("nonempty") as f64 / norm)
        })
        .collect();
    Ok(out?)
}

/// Normalized increments `R(end) − R(⌈σ_k⌉)` of the reflection curve for
/// one itinerary.
pub fn reflection_samples(plan: &TrialPlan, scale: Scale, itinerary: usize) -> Result<Vec<f64>> {
    let it = &plan.itineraries[itinerary];
    let window = plan.window_for(scale, it);
    let norm = plan.spec.std_dev() * scale.sqrt_n();
    let seeds: Vec<u64> = plan.seeds.clone().collect();
    let out: rwfpp_core::Result<Vec<f64>> = seeds
        .par_iter()
        .map(|&seed| {
            let field = IncrementField::new(trial_seed(seed, scale.n()), plan.spec.clone());
            let b = with_window(window, plan.window.is_some(), |w| {
                approximation_bundle(&field, &plan.jumps, scale, it, plan.horizon, w)
            })?;
            let r = b.lattice(Curve::Reflected);
            Ok((r.values[r.values.len() - 1] - r.values[0]) as f64 / norm)
        })
        .collect();
    Ok(out?)
}

/// `Y(⌈n t⌉)/(σ√(⌈n t⌉))` for walks from the origin.
pub fn walk_samples(spec: &IncrementSpec, scale: Scale, t: Rational64, seeds: std::ops::Range<u64>) -> Vec<f64> {
    let end = scale.time_step(t);
    let norm = spec.std_dev() * (end as f64).sqrt();
    let seeds: Vec<u64> = seeds.collect();
    seeds
        .par_iter()
        .map(|&seed| {
            let field = IncrementField::new(trial_seed(seed, scale.n()), spec.clone());
            *walk_lattice(&field, 0, 0, end).values.last().expect("nonempty") as f64 / norm
        })
        .collect()
}

/// KS distance of normalized walk values against the standard normal.
pub fn donsker_check(spec: &IncrementSpec, n: u64, seeds: std::ops::Range<u64>, tolerance: f64) -> Result<CheckResult> {
    let scale = Scale::new(n)?;
    let samples = walk_samples(spec, scale, Rational64::from_integer(1), seeds);
    let d = ks_one_sample(&samples, normal_cdf)?;
    Ok(CheckResult::statistical(
        format!("donsker_{}_n{n}", spec.name()),
        CheckKind::Statistical,
        samples.len() as u64,
        d,
        tolerance,
        d <= tolerance,
    ))
}

fn column_csv(values: &[f64]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["value"])?;
    for v in values {
        w.write_record([v.to_string()])?;
    }
    finish(w)
}

/// Compare boundary-curve and reflection-increment laws against the
/// reflected Brownian motion oracle, for every `n` in the plan.
///
/// `n = 1` runs are unrescaled and reported as informational.
pub fn run_distribution_suite(plan: &TrialPlan, opts: &DistributionOptions) -> Result<SuiteReport> {
    plan.validate()?;
    let mut report = SuiteReport::new("distribution");
    let mut oracle: BTreeMap<(u64, bool), Vec<f64>> = BTreeMap::new();
    let mut oracle_at = |t: f64, side: Side| -> Result<Vec<f64>> {
        let key = (t.to_bits(), side == Side::Right);
        if let Some(v) = oracle.get(&key) {
            return Ok(v.clone());
        }
        let dt = opts.oracle_dt.min(1e-3 * t);
        let v = reflected_bm_oracle(t, side, opts.oracle_trials, opts.oracle_seed, dt)?;
        oracle.insert(key, v.clone());
        Ok(v)
    };

    for scale in plan.scales()? {
        let n = scale.n();
        let kind = if n == 1 { CheckKind::Informational } else { CheckKind::Statistical };
        let t = scale.time_step(plan.horizon) as f64 / n as f64;
        for side in [Side::Right, Side::Left] {
            let samples = boundary_samples(plan, scale, side)?;
            let same = ks_two_sample(&samples, &oracle_at(t, side)?)?;
            let wrong = ks_two_sample(&samples, &oracle_at(t, side.flip())?)?;
            let id = format!("boundary_{}_n{n}", side_name(side));
            report.push(
                CheckResult::statistical(&id, kind, samples.len() as u64, same, opts.tolerance, same <= opts.tolerance)
                    .with_note(format!("terminal value at t = {t}")),
            );
            report.push(
                CheckResult::statistical(
                    format!("{id}_mismatch"),
                    kind,
                    samples.len() as u64,
                    wrong,
                    opts.mismatch_threshold,
                    wrong > opts.mismatch_threshold,
                )
                .with_note("against the opposite-side oracle; must exceed the tolerance"),
            );
            report.samples.push(Sample { name: format!("{id}_samples"), csv: column_csv(&samples)? });
        }
        for (j, it) in plan.itineraries.iter().enumerate() {
            let (Some(&sigma), Some(&side)) = (it.sigma().last(), it.eta().last()) else { continue };
            let tk = scale.time_step(sigma);
            let span = (scale.time_step(plan.horizon) - tk) as f64 / n as f64;
            if span <= 0.0 {
                continue;
            }
            let samples = reflection_samples(plan, scale, j)?;
            let d = ks_two_sample(&samples, &oracle_at(span, side)?)?;
            report.push(
                CheckResult::statistical(
                    format!("reflection_increment_it{j}_n{n}"),
                    kind,
                    samples.len() as u64,
                    d,
                    opts.tolerance,
                    d <= opts.tolerance,
                )
                .with_note(format!("itinerary {}, increment over {span}", ItineraryLabel(it))),
            );
        }
        let walk = walk_samples(&plan.spec, scale, plan.horizon, plan.seeds.clone());
        let d = ks_one_sample(&walk, normal_cdf)?;
        report.push(CheckResult::statistical(
            format!("donsker_{}_n{n}", plan.spec.name()),
            kind,
            walk.len() as u64,
            d,
            opts.tolerance,
            d <= opts.tolerance,
        ));
    }
    Ok(report)
}
