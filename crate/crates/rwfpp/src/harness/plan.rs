use std::fmt;
use std::ops::Range;

use rwfpp_core::{Error, IncrementSpec, Itinerary, JumpSet, Rational64, Scale, Window};

use crate::error::{AppError, Result};

/// A batch of trials: every seed × every `n` × every itinerary.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub name: String,
    pub seeds: Range<u64>,
    pub n_values: Vec<u64>,
    pub spec: IncrementSpec,
    pub jumps_name: String,
    pub jumps: JumpSet,
    pub itineraries: Vec<Itinerary>,
    pub horizon: Rational64,
    /// Fixed lattice window; `None` sizes one per trial and widens on demand.
    pub window: Option<Window>,
    pub allow_non_square: bool,
}

impl TrialPlan {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(AppError::Config(format!("plan `{}`: {msg}", self.name)));
        if self.seeds.is_empty() {
            return bad("seed range is empty".into());
        }
        if self.n_values.is_empty() {
            return bad("no n values".into());
        }
        for &n in &self.n_values {
            let scale = Scale::new(n).map_err(AppError::from)?;
            if !scale.is_perfect_square() && !self.allow_non_square {
                return bad(format!("n = {n} is not a perfect square (set allow_non_square)"));
            }
        }
        for it in &self.itineraries {
            if self.horizon <= it.last_time() {
                return bad(format!("horizon {} does not exceed itinerary {}", self.horizon, ItineraryLabel(it)));
            }
        }
        Ok(())
    }

    pub fn scales(&self) -> Result<Vec<Scale>> {
        self.n_values.iter().map(|&n| Ok(Scale::new(n)?)).collect()
    }

    /// Window for one trial; the explicit one if set.
    pub fn window_for(&self, scale: Scale, it: &Itinerary) -> Window {
        self.window
            .unwrap_or_else(|| auto_window(&self.spec, &self.jumps, scale, it.x(), it.s(), self.horizon))
    }
}

/// A window centered on `⌈√n x⌉` covering lattice times `⌈n s⌉..=⌈n·horizon⌉`,
/// wide enough that a frontier of small distance rarely reaches its margin.
pub fn auto_window(
    spec: &IncrementSpec,
    jumps: &JumpSet,
    scale: Scale,
    x: Rational64,
    s: Rational64,
    horizon: Rational64,
) -> Window {
    let t0 = scale.time_step(s);
    let t1 = scale.time_step(horizon).max(t0 + 1);
    let center = scale.space_site(x);
    let half = auto_half_width(spec, jumps, t1 - t0);
    Window { x_min: center - half, x_max: center + half, t_min: t0, t_max: t1 }
}

/// Default half width for a frontier spanning `steps` lattice times.
pub fn auto_half_width(spec: &IncrementSpec, jumps: &JumpSet, steps: i64) -> i64 {
    let spread = 10.0 * spec.std_dev() * (steps.max(1) as f64).sqrt();
    spread.ceil() as i64 + 20 * (jumps.max_abs_dx() + spec.max_step()) + 10
}

/// Run `f`, doubling the window's half width after each margin violation
/// when the window was sized automatically.
pub fn with_window<T>(
    window: Window,
    fixed: bool,
    mut f: impl FnMut(Window) -> rwfpp_core::Result<T>,
) -> rwfpp_core::Result<T> {
    let mut w = window;
    let mut attempts = 0;
    loop {
        match f(w) {
            Err(Error::MarginViolation { .. }) if !fixed && attempts < 6 => {
                let half = (w.x_max - w.x_min) / 2 + 1;
                let center = w.x_min + (w.x_max - w.x_min) / 2;
                w = Window { x_min: center - 2 * half, x_max: center + 2 * half, ..w };
                attempts += 1;
            }
            r => return r,
        }
    }
}

/// `(x, s; σ₁, …; η₁, …)` in compact form for reports.
pub struct ItineraryLabel<'a>(pub &'a Itinerary);

impl fmt::Display for ItineraryLabel<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let it = self.0;
        write!(f, "({},{};", it.x(), it.s())?;
        let sigma: Vec<String> = it.sigma().iter().map(|s| s.to_string()).collect();
        let eta: Vec<String> = it.eta().iter().map(|e| format!("{:+}", e.eta())).collect();
        write!(f, "{};{})", sigma.join(" "), eta.join(" "))
    }
}
