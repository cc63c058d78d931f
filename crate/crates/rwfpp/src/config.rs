//! TOML run configuration.
//!
//! Model parameters are exact rationals written as `[num, den]` (a bare
//! integer is also accepted). Presets `simple`, `uniform4`, `binom4`, `fig5`
//! and `cross3` are always defined; a file may add more or override them.
//!
//! ```toml
//! seed = 7
//!
//! [[increment]]
//! name = "skew"
//! support = [[-1, 2, 3], [2, 1, 3]]   # value, probability num, den
//!
//! [[jump_set]]
//! name = "wide"
//! offsets = [[-2, 0], [2, 0], [0, 1]]
//!
//! [[plan]]
//! name = "smoke"
//! seeds = [0, 20]
//! n_values = [1, 4]
//! spec = "skew"
//! jumps = "fig5"
//! horizon = [2, 1]
//!
//! [[plan.itinerary]]
//! x = 0
//! s = 0
//! sigma = [[1, 2]]
//! eta = [1]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rwfpp_core::{IncrementSpec, Itinerary, JumpSet, Rational64, Side, Window};
use serde::Deserialize;

use crate::error::{AppError, Result};
use crate::harness::TrialPlan;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum RationalInput {
    Int(i64),
    Pair([i64; 2]),
}

impl RationalInput {
    pub fn resolve(self, what: &str) -> Result<Rational64> {
        match self {
            RationalInput::Int(v) => Ok(Rational64::from_integer(v)),
            RationalInput::Pair([_, 0]) => Err(AppError::Config(format!("{what}: zero denominator"))),
            RationalInput::Pair([p, q]) => Ok(Rational64::new(p, q)),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IncrementEntry {
    name: String,
    support: Vec<[i64; 3]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JumpEntry {
    name: String,
    offsets: Vec<[i64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowEntry {
    name: String,
    x_min: i64,
    x_max: i64,
    t_min: i64,
    t_max: i64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItineraryEntry {
    x: RationalInput,
    s: RationalInput,
    #[serde(default)]
    sigma: Vec<RationalInput>,
    #[serde(default)]
    eta: Vec<i8>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanEntry {
    name: String,
    seeds: [u64; 2],
    n_values: Vec<u64>,
    spec: String,
    jumps: String,
    horizon: RationalInput,
    window: Option<String>,
    #[serde(default)]
    allow_non_square: bool,
    #[serde(default)]
    itinerary: Vec<ItineraryEntry>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    #[serde(default)]
    increment: Vec<IncrementEntry>,
    #[serde(default)]
    jump_set: Vec<JumpEntry>,
    #[serde(default)]
    window: Vec<WindowEntry>,
    #[serde(default)]
    plan: Vec<PlanEntry>,
}

/// Resolved configuration: every name in every plan refers to a definition.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub specs: BTreeMap<String, IncrementSpec>,
    pub jump_sets: BTreeMap<String, JumpSet>,
    pub windows: BTreeMap<String, Window>,
    pub plans: Vec<TrialPlan>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self::from_raw(RawConfig::default()).expect("presets resolve")
    }
}

pub fn parse_itinerary(x: Rational64, s: Rational64, sigma: Vec<Rational64>, eta: &[i8]) -> Result<Itinerary> {
    let eta = eta
        .iter()
        .map(|&e| Side::from_eta(e).ok_or_else(|| AppError::Config(format!("eta must be +1 or -1, got {e}"))))
        .collect::<Result<Vec<Side>>>()?;
    Ok(Itinerary::new(x, s, sigma, eta)?)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            AppError::Config(msg) => AppError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let mut specs = BTreeMap::new();
        for s in [IncrementSpec::simple(), IncrementSpec::uniform4(), IncrementSpec::binom4()] {
            specs.insert(s.name().to_string(), s);
        }
        for e in raw.increment {
            let support = e
                .support
                .iter()
                .map(|&[v, p, q]| {
                    if q == 0 {
                        Err(AppError::Config(format!("increment `{}`: zero denominator", e.name)))
                    } else {
                        Ok((v, Rational64::new(p, q)))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let spec = IncrementSpec::new(&e.name, &support)?;
            specs.insert(e.name, spec);
        }

        let mut jump_sets = BTreeMap::new();
        jump_sets.insert("fig5".to_string(), JumpSet::fig5());
        jump_sets.insert("cross3".to_string(), JumpSet::cross3());
        for e in raw.jump_set {
            let offsets: Vec<(i64, i64)> = e.offsets.iter().map(|&[dx, dt]| (dx, dt)).collect();
            let set = JumpSet::new(&offsets)
                .map_err(|err| AppError::Config(format!("jump_set `{}`: {err}", e.name)))?;
            jump_sets.insert(e.name, set);
        }

        let mut windows = BTreeMap::new();
        for e in raw.window {
            let w = Window::new(e.x_min, e.x_max, e.t_min, e.t_max)
                .map_err(|err| AppError::Config(format!("window `{}`: {err}", e.name)))?;
            windows.insert(e.name, w);
        }

        let mut plans = Vec::new();
        for p in raw.plan {
            let ctx = |msg: String| AppError::Config(format!("plan `{}`: {msg}", p.name));
            let spec = specs.get(&p.spec).ok_or_else(|| ctx(format!("unknown increment spec `{}`", p.spec)))?;
            let jumps = jump_sets.get(&p.jumps).ok_or_else(|| ctx(format!("unknown jump set `{}`", p.jumps)))?;
            let window = match &p.window {
                Some(name) => Some(*windows.get(name).ok_or_else(|| ctx(format!("unknown window `{name}`")))?),
                None => None,
            };
            let mut itineraries = Vec::new();
            for (k, it) in p.itinerary.iter().enumerate() {
                let what = format!("plan `{}` itinerary {k}", p.name);
                let sigma =
                    it.sigma.iter().map(|s| s.resolve(&what)).collect::<Result<Vec<Rational64>>>()?;
                let parsed = parse_itinerary(it.x.resolve(&what)?, it.s.resolve(&what)?, sigma, &it.eta)
                    .map_err(|e| AppError::Config(format!("{what}: {e}")))?;
                itineraries.push(parsed);
            }
            if itineraries.is_empty() {
                return Err(ctx("no itineraries".into()));
            }
            let plan = TrialPlan {
                name: p.name.clone(),
                seeds: p.seeds[0]..p.seeds[1],
                n_values: p.n_values.clone(),
                spec: spec.clone(),
                jumps_name: p.jumps.clone(),
                jumps: jumps.clone(),
                itineraries,
                horizon: p.horizon.resolve(&format!("plan `{}` horizon", p.name))?,
                window,
                allow_non_square: p.allow_non_square,
            };
            plan.validate()?;
            plans.push(plan);
        }

        Ok(RunConfig { seed: raw.seed, out_dir: raw.out_dir, specs, jump_sets, windows, plans })
    }

    pub fn spec(&self, name: &str) -> Result<&IncrementSpec> {
        self.specs.get(name).ok_or_else(|| AppError::Config(format!("unknown increment spec `{name}`")))
    }

    pub fn jumps(&self, name: &str) -> Result<&JumpSet> {
        self.jump_sets.get(name).ok_or_else(|| AppError::Config(format!("unknown jump set `{name}`")))
    }

    pub fn window(&self, name: &str) -> Result<Window> {
        self.windows.get(name).copied().ok_or_else(|| AppError::Config(format!("unknown window `{name}`")))
    }
}

/// Parse `3`, `-1/4` or `2/1` as an exact rational.
pub fn parse_rational(s: &str) -> std::result::Result<Rational64, String> {
    let s = s.trim();
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: i64 = p.parse().map_err(|_| format!("`{s}` is not a rational"))?;
    let q: i64 = q.parse().map_err(|_| format!("`{s}` is not a rational"))?;
    if q == 0 {
        return Err(format!("`{s}` has a zero denominator"));
    }
    Ok(Rational64::new(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_present() {
        let c = RunConfig::default();
        assert!(c.spec("binom4").is_ok());
        assert!(c.jumps("fig5").is_ok());
        assert!(c.spec("nope").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("-1/4").unwrap(), Rational64::new(-1, 4));
        assert_eq!(parse_rational("3").unwrap(), Rational64::from_integer(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
