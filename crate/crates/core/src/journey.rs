//! Journeys and their reflection-based approximation curves.
//!
//! A journey follows the walk from its start point, and at each jump time
//! `σ_i` switches to the right (`η_i = +1`) or left (`η_i = −1`) distance-one
//! boundary curve of the point it has reached. For the last switch, the
//! [`ReflectionBundle`] collects the auxiliary walk `S` (a walk whose every
//! increment copies the increment field at the journey's current site), the
//! base walk `Y` leaving the switch point, the Skorokhod reflection `R` of
//! `S` off `Y`, its extension `Rext` (journey before the switch, `R` after),
//! the push process `I = |R − S|` and the error process `E = |G − Rext|`.
//!
//! All of these are integer-valued on the lattice; the exact checks run on
//! those integers and [`Path`] views are produced only for output.

use alloc::vec::Vec;
use core::ops::{Add, Sub};

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::fpp::{boundary_lattice, JumpSet, Side};
use crate::increment::IncrementField;
use crate::metrics::modulus;
use crate::scale::Scale;
use crate::walk::{walk_lattice, LatticePath, Path, Site, Window};

/// Start point `(x, s)`, strictly increasing jump times `σ` and sides `η`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Itinerary {
    x: Rational64,
    s: Rational64,
    sigma: Vec<Rational64>,
    eta: Vec<Side>,
}

impl Itinerary {
    pub fn new(x: Rational64, s: Rational64, sigma: Vec<Rational64>, eta: Vec<Side>) -> Result<Self> {
        if sigma.len() != eta.len() {
            return Err(Error::InvalidItinerary("sigma and eta lengths differ".into()));
        }
        let mut prev = s;
        for &t in &sigma {
            if t <= prev {
                return Err(Error::InvalidItinerary(
                    "jump times must strictly increase from s".into(),
                ));
            }
            prev = t;
        }
        Ok(Itinerary { x, s, sigma, eta })
    }

    /// Length-zero itinerary: just follow the walk from `(x, s)`.
    pub fn start(x: Rational64, s: Rational64) -> Self {
        Itinerary { x, s, sigma: Vec::new(), eta: Vec::new() }
    }

    pub fn x(&self) -> Rational64 {
        self.x
    }

    pub fn s(&self) -> Rational64 {
        self.s
    }

    pub fn sigma(&self) -> &[Rational64] {
        &self.sigma
    }

    pub fn eta(&self) -> &[Side] {
        &self.eta
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    /// Last jump time, or `s` for a length-zero itinerary.
    pub fn last_time(&self) -> Rational64 {
        self.sigma.last().copied().unwrap_or(self.s)
    }
}

/// The length-`j` restriction: first `j` jumps kept.
pub fn restrict(it: &Itinerary, j: usize) -> Result<Itinerary> {
    if j > it.len() {
        return Err(Error::Precondition(alloc::format!(
            "cannot restrict a length-{} itinerary to length {j}",
            it.len()
        )));
    }
    Ok(Itinerary {
        x: it.x,
        s: it.s,
        sigma: it.sigma[..j].to_vec(),
        eta: it.eta[..j].to_vec(),
    })
}

/// Journey on the lattice, from step `⌈n s⌉` to `⌈n·horizon⌉`.
pub fn journey_lattice(
    field: &IncrementField,
    jumps: &JumpSet,
    scale: Scale,
    it: &Itinerary,
    horizon: Rational64,
    window: Window,
) -> Result<LatticePath> {
    if horizon <= it.last_time() {
        return Err(Error::Precondition("horizon must exceed the last jump time".into()));
    }
    let t0 = scale.time_step(it.s);
    let end = scale.time_step(horizon);
    let mut path = walk_lattice(field, scale.space_site(it.x), t0, end);
    for (sigma, &side) in it.sigma.iter().zip(&it.eta) {
        let tk = scale.time_step(*sigma);
        let idx = (tk - t0) as usize;
        let from = Site::new(path.values[idx], tk);
        let boundary = boundary_lattice(field, jumps, from, side, end, window)?;
        // the switch slice itself keeps the previous journey's value
        path.values.truncate(idx + 1);
        path.values.extend_from_slice(&boundary.values[1..]);
    }
    Ok(path)
}

/// Rescaled journey `G^n` on the grid `1/n`.
pub fn journey(
    field: &IncrementField,
    jumps: &JumpSet,
    scale: Scale,
    it: &Itinerary,
    horizon: Rational64,
    window: Window,
) -> Result<Path> {
    Ok(journey_lattice(field, jumps, scale, it, horizon, window)?.to_path(scale))
}

/// Skorokhod reflection of `f` off `g` on a shared grid, started at index 0:
/// `h = f − inf (f − g)` (right) or `f − sup (f − g)` (left), running over
/// grid points.
pub fn reflect_values<T>(f: &[T], g: &[T], side: Side) -> Vec<T>
where
    T: Copy + PartialOrd + Sub<Output = T> + Add<Output = T>,
{
    let n = f.len().min(g.len());
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let mut ext = f[0] - g[0];
    for k in 0..n {
        let d = f[k] - g[k];
        match side {
            Side::Right if d < ext => ext = d,
            Side::Left if d > ext => ext = d,
            _ => {}
        }
        out.push(f[k] - ext);
    }
    out
}

/// `Λ_R(f, g)` or `Λ_L(f, g)` on the overlap of the two domains.
pub fn skorokhod_reflect(f: &Path, g: &Path, side: Side) -> Result<Path> {
    let offset = f.grid_offset(g)?;
    let (fi, gi) = if offset >= 0 { (offset as usize, 0) } else { (0, (-offset) as usize) };
    if fi >= f.len() || gi >= g.len() {
        return Err(Error::GridMismatch("domains do not overlap".into()));
    }
    let values = reflect_values(&f.values()[fi..], &g.values()[gi..], side);
    let start = f.start_time().max(g.start_time());
    Path::new(start, f.dt(), values)
}

/// Approximation curves around the last switch of a journey.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionBundle {
    scale: Scale,
    side: Side,
    journey: LatticePath,
    walk: LatticePath,
    reflected: LatticePath,
    extension: LatticePath,
    push: LatticePath,
    error: LatticePath,
    base_walk: LatticePath,
}

/// Curve selector for [`ReflectionBundle::path`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curve {
    Journey,
    Walk,
    Reflected,
    Extension,
    Push,
    Error,
    BaseWalk,
}

impl Curve {
    pub const ALL: [Curve; 7] = [
        Curve::Journey,
        Curve::Walk,
        Curve::Reflected,
        Curve::Extension,
        Curve::Push,
        Curve::Error,
        Curve::BaseWalk,
    ];

    /// CSV column name.
    pub fn column(self) -> &'static str {
        match self {
            Curve::Journey => "G",
            Curve::Walk => "S",
            Curve::Reflected => "R",
            Curve::Extension => "Rext",
            Curve::Push => "I",
            Curve::Error => "E",
            Curve::BaseWalk => "base_walk",
        }
    }
}

pub fn approximation_bundle(
    field: &IncrementField,
    jumps: &JumpSet,
    scale: Scale,
    it: &Itinerary,
    horizon: Rational64,
    window: Window,
) -> Result<ReflectionBundle> {
    let Some(&side) = it.eta.last() else {
        return Err(Error::Precondition("approximation curves need at least one jump".into()));
    };
    let g = journey_lattice(field, jumps, scale, it, horizon, window)?;
    let tk = scale.time_step(*it.sigma.last().expect("nonempty"));
    let end = g.end();
    let k0 = (tk - g.start) as usize;
    let tail = &g.values[k0..];

    let mut s = Vec::with_capacity(tail.len());
    s.push(tail[0]);
    for m in 0..tail.len() - 1 {
        let t = tk + m as i64;
        s.push(s[m] + field.sample(tail[m], t));
    }
    let base = walk_lattice(field, tail[0], tk, end);
    let r = reflect_values(&s, &base.values, side);

    let mut ext = g.values[..=k0].to_vec();
    ext.extend_from_slice(&r[1..]);
    let push: Vec<i64> = r.iter().zip(&s).map(|(a, b)| (a - b).abs()).collect();
    let err: Vec<i64> = g.values.iter().zip(&ext).map(|(a, b)| (a - b).abs()).collect();

    Ok(ReflectionBundle {
        scale,
        side,
        walk: LatticePath { start: tk, values: s },
        reflected: LatticePath { start: tk, values: r },
        extension: LatticePath { start: g.start, values: ext },
        push: LatticePath { start: tk, values: push },
        error: LatticePath { start: g.start, values: err },
        base_walk: base,
        journey: g,
    })
}

impl ReflectionBundle {
    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Lattice time of the last switch, `⌈n σ_k⌉`.
    pub fn switch_step(&self) -> i64 {
        self.walk.start
    }

    pub fn lattice(&self, curve: Curve) -> &LatticePath {
        match curve {
            Curve::Journey => &self.journey,
            Curve::Walk => &self.walk,
            Curve::Reflected => &self.reflected,
            Curve::Extension => &self.extension,
            Curve::Push => &self.push,
            Curve::Error => &self.error,
            Curve::BaseWalk => &self.base_walk,
        }
    }

    /// Rescaled view of one curve.
    pub fn path(&self, curve: Curve) -> Path {
        self.lattice(curve).to_path(self.scale)
    }

    fn sign(&self) -> i64 {
        self.side.eta() as i64
    }

    /// Grid pairs `(w, t)`, `w ≤ t`, after the switch where the increment of
    /// `S` is not dominated by that of `G` (oriented by `η`).
    pub fn increment_domination_violations(&self) -> Vec<(i64, i64)> {
        let tk = self.switch_step();
        let s = &self.walk.values;
        let g = &self.journey.values[(tk - self.journey.start) as usize..];
        let eta = self.sign();
        let mut out = Vec::new();
        for w in 0..s.len() {
            for t in w..s.len() {
                if eta * (s[t] - s[w]) > eta * (g[t] - g[w]) {
                    out.push((tk + w as i64, tk + t as i64));
                }
            }
        }
        out
    }

    /// Grid times where `R` lies on the wrong side of `G`.
    pub fn order_violations(&self) -> Vec<i64> {
        let tk = self.switch_step();
        let g = &self.journey.values[(tk - self.journey.start) as usize..];
        let eta = self.sign();
        self.reflected
            .values
            .iter()
            .zip(g)
            .enumerate()
            .filter(|(_, (r, g))| eta * (*g - *r) < 0)
            .map(|(m, _)| tk + m as i64)
            .collect()
    }

    /// `min_t η·(G − R)` over the reflection domain, in lattice units.
    pub fn order_margin(&self) -> i64 {
        let tk = self.switch_step();
        let g = &self.journey.values[(tk - self.journey.start) as usize..];
        let eta = self.sign();
        self.reflected.values.iter().zip(g).map(|(r, g)| eta * (g - r)).min().unwrap_or(0)
    }

    /// Grid times where the push process decreases.
    pub fn push_monotonicity_violations(&self) -> Vec<i64> {
        let p = &self.push.values;
        (1..p.len()).filter(|&m| p[m] < p[m - 1]).map(|m| self.push.start + m as i64).collect()
    }

    /// Grid pairs `(w, t)` with `⌈σ_k⌉ ≤ w ≤ t ≤ M`, `t − w < δ` (rescaled)
    /// where `sup_{[w,t]} E > E(t) + ℳ_{δ,M}(I)`.
    pub fn error_bound_violations(&self, delta: f64, horizon_m: f64) -> Vec<(i64, i64)> {
        let n = self.scale.n() as f64;
        let slack = modulus(&self.push.to_unit_path(), delta * n, horizon_m * n);
        let tk = self.switch_step();
        let e = &self.error.values[(tk - self.error.start) as usize..];
        let mut out = Vec::new();
        for w in 0..e.len() {
            let mut running = e[w];
            for t in w..e.len() {
                let tt = tk + t as i64;
                if (tt as f64) > horizon_m * n || ((t - w) as f64) >= delta * n {
                    break;
                }
                running = running.max(e[t]);
                if running as f64 > e[t] as f64 + slack + EXACT_SLACK {
                    out.push((tk + w as i64, tt));
                }
            }
        }
        out
    }

    /// Whether `ℳ_{δ,M}(R) ≤ 2ℳ_{δ,M}(S) + ℳ_{δ,M}(Y)` holds, with the three
    /// moduli in lattice units.
    pub fn modulus_bound_holds(&self, delta: f64, horizon_m: f64) -> bool {
        let n = self.scale.n() as f64;
        let m = |p: &LatticePath| modulus(&p.to_unit_path(), delta * n, horizon_m * n);
        m(&self.reflected) <= 2.0 * m(&self.walk) + m(&self.base_walk) + EXACT_SLACK
    }

    /// `min η·((G(t) − G(w)) − (S(t) − S(w)))` over `w ≤ t`; negative iff
    /// increment domination fails.
    pub fn increment_domination_margin(&self) -> i64 {
        let tk = self.switch_step();
        let s = &self.walk.values;
        let g = &self.journey.values[(tk - self.journey.start) as usize..];
        let eta = self.sign();
        let mut best = 0;
        for w in 0..s.len() {
            for t in w + 1..s.len() {
                best = best.min(eta * ((g[t] - g[w]) - (s[t] - s[w])));
            }
        }
        best
    }

    /// Smallest one-step change of the push process.
    pub fn push_increment_margin(&self) -> i64 {
        self.push.values.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(0)
    }

    /// `min_{m ≥ 1} η·(G − Y)` after the switch; must be positive.
    pub fn disjointness_margin(&self) -> i64 {
        let tk = self.switch_step();
        let g = &self.journey.values[(tk - self.journey.start) as usize..];
        let eta = self.sign();
        (1..g.len()).map(|m| eta * (g[m] - self.base_walk.values[m])).min().unwrap_or(i64::MAX)
    }

    /// Least slack of the error bound over admissible `(w, t)`, lattice units.
    pub fn error_bound_margin(&self, delta: f64, horizon_m: f64) -> f64 {
        let n = self.scale.n() as f64;
        let slack = modulus(&self.push.to_unit_path(), delta * n, horizon_m * n);
        let tk = self.switch_step();
        let e = &self.error.values[(tk - self.error.start) as usize..];
        let mut best = f64::INFINITY;
        for w in 0..e.len() {
            let mut running = e[w];
            for t in w..e.len() {
                if ((tk + t as i64) as f64) > horizon_m * n || ((t - w) as f64) >= delta * n {
                    break;
                }
                running = running.max(e[t]);
                best = best.min(e[t] as f64 + slack - running as f64);
            }
        }
        best
    }

    /// `2ℳ(S) + ℳ(Y) − ℳ(R)` in lattice units.
    pub fn modulus_bound_margin(&self, delta: f64, horizon_m: f64) -> f64 {
        let n = self.scale.n() as f64;
        let m = |p: &LatticePath| modulus(&p.to_unit_path(), delta * n, horizon_m * n);
        2.0 * m(&self.walk) + m(&self.base_walk) - m(&self.reflected)
    }
}

/// Comparison slack for quantities that are exact multiples of a small
/// rational step; far below that step, so decisions are exact.
pub const EXACT_SLACK: f64 = 1e-9;

/// Whether, for every `m ≥ 1`, the site driving `S`'s `m`-th increment lies
/// strictly on the `η` side of the base walk at the same time, so the two
/// draw on disjoint increment variables after the first step.
pub fn check_disjoint_increments(bundle: &ReflectionBundle) -> bool {
    let tk = bundle.switch_step();
    let g = &bundle.journey.values[(tk - bundle.journey.start) as usize..];
    let base = &bundle.base_walk.values;
    let eta = bundle.sign();
    (1..g.len()).all(|m| eta * (g[m] - base[m]) > 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increment::IncrementSpec;
    use crate::walk::rescaled_walk;
    use alloc::vec;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    fn wide() -> Window {
        Window::new(-400, 400, -100, 400).unwrap()
    }

    #[test]
    fn itinerary_validation_and_restriction() {
        assert!(Itinerary::new(r(0, 1), r(0, 1), vec![r(0, 1)], vec![Side::Right]).is_err());
        assert!(Itinerary::new(r(0, 1), r(0, 1), vec![r(1, 1)], vec![]).is_err());
        assert!(Itinerary::new(r(0, 1), r(0, 1), vec![r(2, 1), r(1, 1)], vec![Side::Right; 2]).is_err());
        let it = Itinerary::new(r(1, 2), r(0, 1), vec![r(1, 1), r(2, 1)], vec![Side::Right, Side::Left])
            .unwrap();
        assert_eq!(restrict(&it, 2).unwrap(), it);
        let base = restrict(&it, 0).unwrap();
        assert_eq!(base, Itinerary::start(r(1, 2), r(0, 1)));
        assert_eq!(restrict(&restrict(&it, 1).unwrap(), 0).unwrap(), base);
        assert!(restrict(&it, 3).is_err());
    }

    #[test]
    fn reflection_examples() {
        let f = Path::new(0.0, 1.0, vec![0.0, 1.0, -2.0, 3.0]).unwrap();
        assert_eq!(skorokhod_reflect(&f, &f, Side::Right).unwrap(), f);
        let down = Path::new(0.0, 0.5, (0..10).map(|m| -(m as f64) * 0.5).collect()).unwrap();
        let zero = Path::new(0.0, 0.5, vec![0.0; 10]).unwrap();
        let h = skorokhod_reflect(&down, &zero, Side::Right).unwrap();
        assert!(h.values().iter().all(|&v| v == 0.0));
        let h = skorokhod_reflect(&zero, &down, Side::Left).unwrap();
        assert_eq!(h.values(), down.values());
        let coarse = Path::new(0.0, 1.0, vec![0.0; 3]).unwrap();
        assert!(matches!(skorokhod_reflect(&down, &coarse, Side::Right), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn reflection_with_offset_starts() {
        let f = Path::new(0.0, 1.0, vec![5.0, 4.0, 3.0, 2.0, 1.0]).unwrap();
        let g = Path::new(2.0, 1.0, vec![3.0, 3.0, 3.0]).unwrap();
        let h = skorokhod_reflect(&f, &g, Side::Right).unwrap();
        assert_eq!(h.start_time(), 2.0);
        assert_eq!(h.values(), &[3.0, 3.0, 3.0]);
    }

    #[test]
    fn zero_length_journey_is_the_rescaled_walk() {
        let f = IncrementField::new(4, IncrementSpec::uniform4());
        let k = JumpSet::fig5();
        let scale = Scale::new(16).unwrap();
        let it = Itinerary::start(r(1, 3), r(1, 5));
        let g = journey(&f, &k, scale, &it, r(2, 1), wide()).unwrap();
        assert_eq!(g, rescaled_walk(&f, scale, r(1, 3), r(1, 5), r(2, 1)).unwrap());
    }

    #[test]
    fn journey_agrees_with_restriction_then_boundary() {
        let f = IncrementField::new(8, IncrementSpec::binom4());
        let k = JumpSet::fig5();
        let scale = Scale::new(4).unwrap();
        let it = Itinerary::new(r(0, 1), r(0, 1), vec![r(1, 2), r(3, 2)], vec![Side::Right, Side::Left])
            .unwrap();
        let h = r(4, 1);
        let g = journey_lattice(&f, &k, scale, &it, h, wide()).unwrap();
        let prev = journey_lattice(&f, &k, scale, &restrict(&it, 1).unwrap(), h, wide()).unwrap();
        let tk = scale.time_step(r(3, 2));
        let idx = (tk - g.start) as usize;
        assert_eq!(g.values[..=idx], prev.values[..=idx]);
        let b = boundary_lattice(&f, &k, Site::new(prev.values[idx], tk), Side::Left, g.end(), wide())
            .unwrap();
        assert_eq!(g.values[idx + 1..], b.values[1..]);
    }

    #[test]
    fn bundle_invariants() {
        let f = IncrementField::new(21, IncrementSpec::uniform4());
        let k = JumpSet::cross3();
        let scale = Scale::new(16).unwrap();
        for side in [Side::Right, Side::Left] {
            let it = Itinerary::new(r(0, 1), r(0, 1), vec![r(1, 3)], vec![side]).unwrap();
            let b = approximation_bundle(&f, &k, scale, &it, r(3, 1), wide()).unwrap();
            let tk = b.switch_step();
            assert_eq!(b.lattice(Curve::Walk).at(tk), b.lattice(Curve::Journey).at(tk));
            assert_eq!(b.lattice(Curve::Push).values[0], 0);
            for t in b.lattice(Curve::Journey).start..=tk {
                assert_eq!(b.lattice(Curve::Error).at(t), Some(0));
            }
            assert!(b.increment_domination_violations().is_empty());
            assert!(b.order_violations().is_empty());
            assert!(b.push_monotonicity_violations().is_empty());
            assert!(b.error_bound_violations(0.5, 3.0).is_empty());
            assert!(b.modulus_bound_holds(0.5, 3.0));
            assert!(check_disjoint_increments(&b));
        }
        let it0 = Itinerary::start(r(0, 1), r(0, 1));
        assert!(approximation_bundle(&f, &k, scale, &it0, r(1, 1), wide()).is_err());
    }
}
