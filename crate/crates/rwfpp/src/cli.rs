//! Command-line interface. Every command is a pure function of its flags,
//! the config file and the seed.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rwfpp_core::{
    approximation_bundle, boundary_lattice, journey_lattice, propagate, rescaled_distance, Distance, Rational64, Scale,
    Side, Site, Window,
};

use crate::config::{parse_itinerary, parse_rational, RunConfig};
use crate::csv_io::{bundle_csv, frontier_csv, path_csv};
use crate::error::{AppError, Result};
use crate::harness::plan::{auto_half_width, auto_window, with_window};
use crate::harness::{
    convergence_csv, convergence_study, default_exact_plans, reflected_bm_oracle, reflection_modulus_pairs,
    run_distribution_suite, run_exact_suite, trend_check, with_workers, ConvergencePlan, DistributionOptions,
    SuiteReport, TrialPlan,
};

/// Exit status for a run whose checks failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for usage and configuration errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rwfpp", version, about = "First passage percolation on coalescing random-walk webs")]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed; overrides the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory; overrides the config file.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write walk paths from evenly spaced lattice sites.
    Simulate(SimulateArgs),
    /// Print the rescaled first passage distance between two points.
    Distance(DistanceArgs),
    /// Write a journey as a path CSV.
    Journey(JourneyArgs),
    /// Write the approximation curves around a journey's last switch.
    Bundle(JourneyArgs),
    /// Write a distance-one boundary curve.
    Boundary(BoundaryArgs),
    /// Run the exact invariant suite (and optionally the statistical one).
    Verify(VerifyArgs),
    /// Run the convergence-trend study.
    Converge(ConvergeArgs),
    /// Sample the reflected Brownian motion oracle.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SideArg {
    Right,
    Left,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Right => Side::Right,
            SideArg::Left => Side::Left,
        }
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Increment spec name.
    #[arg(long, default_value = "binom4")]
    pub spec: String,
    /// Jump set name.
    #[arg(long, default_value = "fig5")]
    pub jumps: String,
    /// Scaling parameter n.
    #[arg(long, default_value_t = 1)]
    pub n: u64,
    /// Allow n that is not a perfect square.
    #[arg(long)]
    pub allow_non_square: bool,
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Named window from the config file (fixed, never widened).
    #[arg(long, conflicts_with = "half_width")]
    pub window: Option<String>,
    /// Fixed half width around the start site, in lattice units.
    #[arg(long)]
    pub half_width: Option<i64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of walks.
    #[arg(long, default_value_t = 10)]
    pub count: u64,
    /// Lattice position of the first walk.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub x_min: i64,
    /// Lattice spacing between consecutive walks.
    #[arg(long, default_value_t = 1)]
    pub stride: i64,
    /// Lattice start time.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub t_start: i64,
    /// Lattice end time.
    #[arg(long, default_value_t = 100, allow_hyphen_values = true)]
    pub t_end: i64,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Source point `x,t` (rationals, rescaled coordinates).
    #[arg(long, allow_hyphen_values = true)]
    pub u: String,
    /// Target point `x,t`.
    #[arg(long, allow_hyphen_values = true)]
    pub v: String,
    /// Also write `frontier.csv` with entries up to this distance.
    #[arg(long)]
    pub frontier: Option<u32>,
}

#[derive(Debug, Args)]
pub struct JourneyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s: String,
    /// Jump times, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub sigma: Vec<String>,
    /// Sides (+1 right, -1 left), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eta: Vec<i8>,
    #[arg(long, default_value = "2")]
    pub horizon: String,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub s: String,
    #[arg(long, value_enum, default_value = "right")]
    pub side: SideArg,
    #[arg(long, default_value = "1")]
    pub horizon: String,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Use the config file's plans instead of the default matrix.
    #[arg(long)]
    pub from_config: bool,
    /// Random pairs for the reflection modulus check.
    #[arg(long, default_value_t = 200)]
    pub pairs: usize,
    /// Also run the statistical suite.
    #[arg(long)]
    pub statistical: bool,
    /// Trials per statistical check.
    #[arg(long, default_value_t = 5000)]
    pub trials: u64,
    /// n for the statistical suite.
    #[arg(long, default_value_t = 400)]
    pub stat_n: u64,
    /// Increment spec for the statistical suite.
    #[arg(long, default_value = "binom4")]
    pub stat_spec: String,
    /// Jump set for the statistical suite.
    #[arg(long, default_value = "cross3")]
    pub stat_jumps: String,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long, default_value = "binom4")]
    pub spec: String,
    #[arg(long, default_value = "cross3")]
    pub jumps: String,
    #[arg(long, value_delimiter = ',', default_value = "25,100,400")]
    pub n_values: Vec<u64>,
    #[arg(long, default_value_t = 1600)]
    pub n_ref: u64,
    /// Trials for the journey-endpoint laws.
    #[arg(long, default_value_t = 4000)]
    pub trials: u64,
    /// Seeds for the epigraph statistic.
    #[arg(long, default_value_t = 60)]
    pub dstar_seeds: u64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, value_enum, default_value = "right")]
    pub side: SideArg,
    #[arg(long, default_value_t = 5000)]
    pub trials: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
}

struct Context {
    config: RunConfig,
    seed: u64,
    out_dir: PathBuf,
}

impl Context {
    fn write(&self, name: &str, body: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir).map_err(|e| AppError::io(&self.out_dir, e))?;
        let path = self.out_dir.join(name);
        fs::write(&path, body).map_err(|e| AppError::io(&path, e))?;
        Ok(path)
    }

    fn scale(&self, m: &ModelArgs) -> Result<Scale> {
        let scale = Scale::new(m.n)?;
        if !scale.is_perfect_square() && !m.allow_non_square {
            return Err(AppError::Usage(format!("n = {} is not a perfect square (pass --allow-non-square)", m.n)));
        }
        Ok(scale)
    }

    /// Fixed window if requested, otherwise an automatic one.
    fn window(&self, w: &WindowArgs, center: i64, t0: i64, t1: i64, auto: Window) -> Result<(Window, bool)> {
        if let Some(name) = &w.window {
            return Ok((self.config.window(name)?, true));
        }
        if let Some(h) = w.half_width {
            return Ok((Window::new(center - h, center + h, t0, t1.max(t0 + 1))?, true));
        }
        Ok((auto, false))
    }
}

fn rational(s: &str) -> Result<Rational64> {
    parse_rational(s).map_err(AppError::Usage)
}

fn point(s: &str) -> Result<(Rational64, Rational64)> {
    let (x, t) = s.split_once(',').ok_or_else(|| AppError::Usage(format!("expected `x,t`, got `{s}`")))?;
    Ok((rational(x)?, rational(t)?))
}

/// Parse flags, run, and map the outcome to an exit status.
pub fn main_with(cli: Cli) -> i32 {
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(h) = e.hint() {
                eprintln!("{h}");
            }
            EXIT_USAGE
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(config.seed).unwrap_or(0);
    let out_dir = cli.out_dir.clone().or_else(|| config.out_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    let ctx = Context { config, seed, out_dir };
    let workers = cli.workers;
    with_workers(workers, move || dispatch(&ctx, cli.command))
}

fn dispatch(ctx: &Context, command: Command) -> Result<i32> {
    match command {
        Command::Simulate(a) => cmd_simulate(ctx, &a),
        Command::Distance(a) => cmd_distance(ctx, &a),
        Command::Journey(a) => cmd_journey(ctx, &a, false),
        Command::Bundle(a) => cmd_journey(ctx, &a, true),
        Command::Boundary(a) => cmd_boundary(ctx, &a),
        Command::Verify(a) => cmd_verify(ctx, &a),
        Command::Converge(a) => cmd_converge(ctx, &a),
        Command::Oracle(a) => cmd_oracle(ctx, &a),
    }
}

fn field(ctx: &Context, m: &ModelArgs) -> Result<rwfpp_core::IncrementField> {
    Ok(rwfpp_core::IncrementField::new(ctx.seed, ctx.config.spec(&m.spec)?.clone()))
}

fn cmd_simulate(ctx: &Context, a: &SimulateArgs) -> Result<i32> {
    if a.t_end < a.t_start {
        return Err(AppError::Usage("--t-end precedes --t-start".into()));
    }
    let scale = ctx.scale(&a.model)?;
    let field = field(ctx, &a.model)?;
    let mut manifest = csv::Writer::from_writer(Vec::new());
    manifest.write_record(["index", "x", "t", "file"])?;
    for k in 0..a.count {
        let x = a.x_min + k as i64 * a.stride;
        let walk = rwfpp_core::walk::walk_lattice(&field, x, a.t_start, a.t_end);
        let name = format!("walk_{k}.csv");
        ctx.write(&name, &path_csv(&walk.to_path(scale))?)?;
        manifest.write_record([k.to_string(), x.to_string(), a.t_start.to_string(), name])?;
    }
    ctx.write("manifest.csv", &crate::harness::report::finish(manifest)?)?;
    Ok(0)
}

fn cmd_distance(ctx: &Context, a: &DistanceArgs) -> Result<i32> {
    let scale = ctx.scale(&a.model)?;
    let field = field(ctx, &a.model)?;
    let jumps = ctx.config.jumps(&a.model.jumps)?;
    let (u, v) = (point(&a.u)?, point(&a.v)?);
    let lift = |p: (Rational64, Rational64)| Some(Site::new(scale.space_lattice(p.0)?, scale.time_lattice(p.1)?));
    let (Some(us), Some(vs)) = (lift(u), lift(v)) else {
        // off-lattice points are at infinite distance
        println!("{}", Distance::Infinite);
        return Ok(0);
    };
    let t0 = us.t.min(vs.t);
    let t1 = us.t.max(vs.t).max(t0 + 1);
    let half = auto_half_width(field.spec(), jumps, t1 - t0) + (vs.x - us.x).abs();
    let auto = Window { x_min: us.x - half, x_max: us.x + half, t_min: t0, t_max: t1 };
    let (window, fixed) = ctx.window(&a.window, us.x, t0, t1, auto)?;
    let d = with_window(window, fixed, |w| rescaled_distance(&field, jumps, scale, u, v, w))?;
    println!("{d}");
    if let Some(max_dist) = a.frontier {
        let f = with_window(window, fixed, |w| propagate(&field, jumps, us, max_dist, t1.min(w.t_max), w))?;
        ctx.write("frontier.csv", &frontier_csv(&f)?)?;
    }
    Ok(0)
}

fn cmd_journey(ctx: &Context, a: &JourneyArgs, bundle: bool) -> Result<i32> {
    let scale = ctx.scale(&a.model)?;
    let field = field(ctx, &a.model)?;
    let jumps = ctx.config.jumps(&a.model.jumps)?;
    let sigma = a.sigma.iter().map(|s| rational(s)).collect::<Result<Vec<_>>>()?;
    let it = parse_itinerary(rational(&a.x)?, rational(&a.s)?, sigma, &a.eta).map_err(|e| AppError::Usage(e.to_string()))?;
    let horizon = rational(&a.horizon)?;
    let auto = auto_window(field.spec(), jumps, scale, it.x(), it.s(), horizon);
    let center = scale.space_site(it.x());
    let (window, fixed) = ctx.window(&a.window, center, auto.t_min, auto.t_max, auto)?;
    if bundle {
        let b = with_window(window, fixed, |w| approximation_bundle(&field, jumps, scale, &it, horizon, w))?;
        ctx.write("bundle.csv", &bundle_csv(&b)?)?;
    } else {
        let g = with_window(window, fixed, |w| journey_lattice(&field, jumps, scale, &it, horizon, w))?;
        ctx.write("journey.csv", &path_csv(&g.to_path(scale))?)?;
    }
    Ok(0)
}

fn cmd_boundary(ctx: &Context, a: &BoundaryArgs) -> Result<i32> {
    let scale = ctx.scale(&a.model)?;
    let field = field(ctx, &a.model)?;
    let jumps = ctx.config.jumps(&a.model.jumps)?;
    let (x, s, horizon) = (rational(&a.x)?, rational(&a.s)?, rational(&a.horizon)?);
    if horizon <= s {
        return Err(AppError::Usage("--horizon must exceed --s".into()));
    }
    let auto = auto_window(field.spec(), jumps, scale, x, s, horizon);
    let src = Site::new(scale.space_site(x), scale.time_step(s));
    let (window, fixed) = ctx.window(&a.window, src.x, auto.t_min, auto.t_max, auto)?;
    let end = scale.time_step(horizon);
    let b = with_window(window, fixed, |w| boundary_lattice(&field, jumps, src, a.side.into(), end, w))?;
    ctx.write("boundary.csv", &path_csv(&b.to_path(scale))?)?;
    Ok(0)
}

/// Statistical plan used by `verify --statistical`: boundary laws from the
/// origin and the reflection increment after a single right switch at 0.
pub fn statistical_plan(
    n: u64,
    trials: u64,
    spec: rwfpp_core::IncrementSpec,
    jumps_name: &str,
    jumps: rwfpp_core::JumpSet,
) -> TrialPlan {
    let r = Rational64::new;
    let it = rwfpp_core::Itinerary::new(r(0, 1), r(-1, 1), vec![r(0, 1)], vec![Side::Right]).expect("valid");
    TrialPlan {
        name: "statistical".into(),
        seeds: 0..trials,
        n_values: vec![n],
        spec,
        jumps_name: jumps_name.into(),
        jumps,
        itineraries: vec![it],
        horizon: r(1, 1),
        window: None,
        allow_non_square: false,
    }
}

/// The full verification report: exact suite plus the random-pair
/// reflection check, optionally followed by the statistical suite.
pub fn verify_report(config: &RunConfig, plans: &[TrialPlan], seed: u64, a: &VerifyArgs) -> Result<SuiteReport> {
    let mut report = run_exact_suite(plans)?;
    report.suite = "verify".into();
    report.push(reflection_modulus_pairs(seed, a.pairs)?);
    if a.statistical {
        let opts = DistributionOptions { oracle_seed: seed, ..DistributionOptions::default() };
        let spec = config.spec(&a.stat_spec)?.clone();
        let jumps = config.jumps(&a.stat_jumps)?.clone();
        let plan = statistical_plan(a.stat_n, a.trials, spec, &a.stat_jumps, jumps);
        report.merge(run_distribution_suite(&plan, &opts)?);
    }
    Ok(report)
}

fn cmd_verify(ctx: &Context, a: &VerifyArgs) -> Result<i32> {
    let plans = if a.from_config {
        if ctx.config.plans.is_empty() {
            return Err(AppError::Config("no [[plan]] entries in the config".into()));
        }
        ctx.config.plans.clone()
    } else {
        default_exact_plans()
    };
    let report = verify_report(&ctx.config, &plans, ctx.seed, a)?;
    report.write(&ctx.out_dir, "verify")?;
    for c in &report.checks {
        println!(
            "{:<40} {:>6} trials {:>4} violations  {}",
            c.id,
            c.trials,
            c.violations,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if report.exact_passed() && !report.passed {
        eprintln!("warning: statistical checks failed; see verify_checks.csv");
    }
    Ok(if report.exact_passed() { 0 } else { EXIT_CHECK_FAILED })
}

fn cmd_converge(ctx: &Context, a: &ConvergeArgs) -> Result<i32> {
    let spec = ctx.config.spec(&a.spec)?.clone();
    let jumps = ctx.config.jumps(&a.jumps)?.clone();
    let mut plan = ConvergencePlan::standard(spec, jumps);
    plan.n_values = a.n_values.clone();
    plan.n_ref = a.n_ref;
    plan.seeds = ctx.seed..ctx.seed + a.trials;
    plan.dstar_seeds = ctx.seed..ctx.seed + a.dstar_seeds;
    let rows = convergence_study(&plan)?;
    ctx.write("convergence.csv", &convergence_csv(&rows)?)?;
    for r in &rows {
        println!("n = {:>6}  statistic = {:.6}  dstar = {:.6}", r.n, r.journey_statistic, r.dstar_statistic);
    }
    let trend = trend_check(&rows);
    if !trend.passed {
        eprintln!("warning: journey statistic is not decreasing ({})", trend.note.unwrap_or_default());
    }
    Ok(0)
}

fn cmd_oracle(ctx: &Context, a: &OracleArgs) -> Result<i32> {
    let samples = reflected_bm_oracle(a.t, a.side.into(), a.trials, ctx.seed, a.dt)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["value"])?;
    for s in samples {
        w.write_record([s.to_string()])?;
    }
    ctx.write("oracle.csv", &crate::harness::report::finish(w)?)?;
    Ok(0)
}
