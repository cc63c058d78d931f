//! First passage percolation over the walk web.
//!
//! Following a walk costs nothing; a jump by an offset in the [`JumpSet`]
//! costs one. Every edge goes weakly forward in time, so distances from a
//! source can be computed slice by slice: seed slice `t + 1` from the walk
//! successors of slice `t` and from pending forward jumps, then close each
//! slice under same-slice jumps with a level-ordered relaxation.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::increment::IncrementField;
use crate::scale::Scale;
use crate::walk::{LatticePath, Path, Site, Window};

/// Finite set of `(dx, dt)` offsets reachable at cost one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpSet {
    offsets: Vec<(i64, i64)>,
}

impl JumpSet {
    /// Validate: some `(x, 0)` with `x > 0`, some with `x < 0`, and `dt ≥ 0`
    /// throughout.
    pub fn new(offsets: &[(i64, i64)]) -> Result<Self> {
        let mut offsets = offsets.to_vec();
        offsets.sort_unstable_by_key(|&(dx, dt)| (dt, dx));
        offsets.dedup();
        if let Some(&(dx, dt)) = offsets.iter().find(|&&(_, dt)| dt < 0) {
            return Err(Error::InvalidJumpSet(alloc::format!(
                "offset ({dx}, {dt}) goes backwards in time"
            )));
        }
        if !offsets.iter().any(|&(dx, dt)| dt == 0 && dx > 0) {
            return Err(Error::InvalidJumpSet("needs some (x, 0) with x > 0".into()));
        }
        if !offsets.iter().any(|&(dx, dt)| dt == 0 && dx < 0) {
            return Err(Error::InvalidJumpSet("needs some (x, 0) with x < 0".into()));
        }
        Ok(JumpSet { offsets })
    }

    /// The five sites adjacent to and above the origin.
    pub fn fig5() -> Self {
        Self::new(&[(-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)]).expect("valid preset")
    }

    /// Left, right, and straight up.
    pub fn cross3() -> Self {
        Self::new(&[(-1, 0), (1, 0), (0, 1)]).expect("valid preset")
    }

    pub fn offsets(&self) -> &[(i64, i64)] {
        &self.offsets
    }

    pub fn contains(&self, dx: i64, dt: i64) -> bool {
        self.offsets.binary_search_by_key(&(dt, dx), |&(x, t)| (t, x)).is_ok()
    }

    pub fn max_abs_dx(&self) -> i64 {
        self.offsets.iter().map(|&(dx, _)| dx.abs()).max().unwrap_or(0)
    }

    pub fn max_dt(&self) -> i64 {
        self.offsets.iter().map(|&(_, dt)| dt).max().unwrap_or(0)
    }

    /// Largest `dx` among same-slice offsets (positive by construction).
    pub fn max_same_slice_dx(&self) -> i64 {
        self.offsets.iter().filter(|o| o.1 == 0).map(|o| o.0).max().unwrap_or(0)
    }

    /// Smallest `dx` among same-slice offsets (negative by construction).
    pub fn min_same_slice_dx(&self) -> i64 {
        self.offsets.iter().filter(|o| o.1 == 0).map(|o| o.0).min().unwrap_or(0)
    }
}

/// A first passage distance: a jump count or `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Distance::Infinite)
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Distance::Finite(d) => d as f64,
            Distance::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// Which extremal boundary of a reachable set to follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// `η = +1` for right, `−1` for left.
    pub fn from_eta(eta: i8) -> Option<Side> {
        match eta {
            1 => Some(Side::Right),
            -1 => Some(Side::Left),
            _ => None,
        }
    }

    pub fn eta(self) -> i8 {
        match self {
            Side::Right => 1,
            Side::Left => -1,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
        }
    }
}

/// Weight of the directed edge `u → v`: 0 along the walk (or staying put),
/// 1 across a jump, `∞` otherwise.
pub fn edge_weight(field: &IncrementField, jumps: &JumpSet, u: Site, v: Site) -> Distance {
    if v == u || (v.t == u.t + 1 && v.x == u.x + field.sample(u.x, u.t)) {
        return Distance::Finite(0);
    }
    if jumps.contains(v.x - u.x, v.t - u.t) {
        return Distance::Finite(1);
    }
    Distance::Infinite
}

/// Distances from one source, by time slice. Each slice is a sparse map from
/// position to jump count; absent positions are farther than `max_dist`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceFrontier {
    source: Site,
    horizon: i64,
    window: Window,
    max_dist: u32,
    slices: Vec<BTreeMap<i64, u32>>,
}

impl DistanceFrontier {
    pub fn source(&self) -> Site {
        self.source
    }

    pub fn horizon(&self) -> i64 {
        self.horizon
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn max_dist(&self) -> u32 {
        self.max_dist
    }

    /// The slice at lattice time `t`, if `source.t ≤ t ≤ horizon`.
    pub fn slice(&self, t: i64) -> Option<&BTreeMap<i64, u32>> {
        if t < self.source.t {
            return None;
        }
        self.slices.get((t - self.source.t) as usize)
    }

    /// Recorded distance at a site, `None` if absent.
    pub fn get(&self, site: Site) -> Option<u32> {
        self.slice(site.t).and_then(|s| s.get(&site.x).copied())
    }

    /// `(t, position, distance)` for every recorded entry, time-major.
    pub fn entries(&self) -> impl Iterator<Item = (i64, i64, u32)> + '_ {
        self.slices.iter().enumerate().flat_map(move |(k, s)| {
            let t = self.source.t + k as i64;
            s.iter().map(move |(&x, &d)| (t, x, d))
        })
    }

    pub fn len(&self) -> usize {
        self.slices.iter().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First recorded entry lying within `margin` of a spatial window edge.
    pub fn margin_violation(&self, margin: i64) -> Option<Site> {
        let lo = self.window.x_min + margin;
        let hi = self.window.x_max - margin;
        for (k, s) in self.slices.iter().enumerate() {
            let t = self.source.t + k as i64;
            if let Some((&x, _)) = s.iter().next() {
                if x < lo {
                    return Some(Site::new(x, t));
                }
            }
            if let Some((&x, _)) = s.iter().next_back() {
                if x > hi {
                    return Some(Site::new(x, t));
                }
            }
        }
        None
    }

    /// Extremal position with distance `≤ level` at each slice.
    pub fn extremes(&self, level: u32, side: Side) -> Vec<i64> {
        self.slices
            .iter()
            .map(|s| {
                let mut it = s.iter().filter(|(_, &d)| d <= level).map(|(&x, _)| x);
                match side {
                    Side::Right => it.next_back(),
                    Side::Left => it.next(),
                }
                .expect("slice contains the distance-0 walk")
            })
            .collect()
    }
}

/// Margin a frontier must keep from the window edge for window-restricted
/// distances to equal unrestricted ones: the farthest a single edge moves.
pub fn required_margin(field: &IncrementField, jumps: &JumpSet) -> i64 {
    jumps.max_abs_dx().max(field.spec().max_step())
}

fn relax(slice: &mut BTreeMap<i64, u32>, x: i64, d: u32) {
    slice.entry(x).and_modify(|e| *e = (*e).min(d)).or_insert(d);
}

/// Exact minimal weights over paths that stay inside `window`, truncated at
/// `max_dist`. No margin check; see [`propagate`].
pub fn propagate_in_window(
    field: &IncrementField,
    jumps: &JumpSet,
    source: Site,
    max_dist: u32,
    horizon: i64,
    window: Window,
) -> Result<DistanceFrontier> {
    if !window.contains(source) {
        return Err(Error::OutsideWindow { site: source, window });
    }
    if horizon > window.t_max {
        return Err(Error::Precondition("horizon exceeds the window".into()));
    }
    if horizon < source.t {
        return Err(Error::Precondition("horizon precedes the source".into()));
    }
    let span = (horizon - source.t) as usize + 1;
    let same: Vec<i64> = jumps
        .offsets()
        .iter()
        .filter(|&&(dx, dt)| dt == 0 && dx != 0)
        .map(|&(dx, _)| dx)
        .collect();
    let forward: Vec<(i64, usize)> = jumps
        .offsets()
        .iter()
        .filter(|&&(_, dt)| dt > 0)
        .map(|&(dx, dt)| (dx, dt as usize))
        .collect();

    let mut slices: Vec<BTreeMap<i64, u32>> = vec![BTreeMap::new(); span];
    slices[0].insert(source.x, 0);
    let mut level_buf: Vec<i64> = Vec::new();

    for k in 0..span {
        let t = source.t + k as i64;
        let mut cur = core::mem::take(&mut slices[k]);

        // same-slice chains, processed level by level
        if !same.is_empty() {
            for level in 0..max_dist {
                level_buf.clear();
                level_buf.extend(cur.iter().filter(|(_, &d)| d == level).map(|(&x, _)| x));
                if level_buf.is_empty() && cur.values().all(|&d| d <= level) {
                    break;
                }
                for &x in &level_buf {
                    for &dx in &same {
                        let y = x + dx;
                        if window.contains_x(y) {
                            relax(&mut cur, y, level + 1);
                        }
                    }
                }
            }
        }

        for (&x, &d) in &cur {
            if k + 1 < span {
                let y = x + field.sample(x, t);
                if window.contains_x(y) {
                    relax(&mut slices[k + 1], y, d);
                }
            }
            if d < max_dist {
                for &(dx, dt) in &forward {
                    let y = x + dx;
                    if k + dt < span && window.contains_x(y) {
                        relax(&mut slices[k + dt], y, d + 1);
                    }
                }
            }
        }
        slices[k] = cur;
    }

    Ok(DistanceFrontier { source, horizon, window, max_dist, slices })
}

/// [`propagate_in_window`] plus a margin check, so that every recorded value
/// equals the unrestricted first passage distance.
pub fn propagate(
    field: &IncrementField,
    jumps: &JumpSet,
    source: Site,
    max_dist: u32,
    horizon: i64,
    window: Window,
) -> Result<DistanceFrontier> {
    let frontier = propagate_in_window(field, jumps, source, max_dist, horizon, window)?;
    let margin = required_margin(field, jumps);
    if let Some(site) = frontier.margin_violation(margin) {
        return Err(Error::MarginViolation { site, margin, window });
    }
    Ok(frontier)
}

/// Lattice first passage distance from `u` to `v`.
///
/// Searches with a truncation that doubles until `v` is reached; a margin
/// violation means the window is too small for the answer.
pub fn distance(
    field: &IncrementField,
    jumps: &JumpSet,
    u: Site,
    v: Site,
    window: Window,
) -> Result<Distance> {
    for p in [u, v] {
        if !window.contains(p) {
            return Err(Error::OutsideWindow { site: p, window });
        }
    }
    if v == u {
        return Ok(Distance::Finite(0));
    }
    if v.t < u.t {
        return Ok(Distance::Infinite);
    }
    let mut max_dist = 3u32;
    loop {
        let frontier = propagate(field, jumps, u, max_dist, v.t, window)?;
        if let Some(d) = frontier.get(v) {
            return Ok(Distance::Finite(d));
        }
        // truncation never bound: everything reachable was recorded
        if frontier.slices.iter().all(|s| s.values().all(|&d| d < max_dist)) {
            return Ok(Distance::Infinite);
        }
        max_dist = max_dist.saturating_mul(2);
    }
}

/// Distance on the `(√n, n)`-rescaled lattice; `∞` for off-lattice points.
pub fn rescaled_distance(
    field: &IncrementField,
    jumps: &JumpSet,
    scale: Scale,
    u: (Rational64, Rational64),
    v: (Rational64, Rational64),
    window: Window,
) -> Result<Distance> {
    let lift = |p: (Rational64, Rational64)| -> Option<Site> {
        Some(Site::new(scale.space_lattice(p.0)?, scale.time_lattice(p.1)?))
    };
    match (lift(u), lift(v)) {
        (Some(a), Some(b)) => distance(field, jumps, a, b, window),
        _ => Ok(Distance::Infinite),
    }
}

/// Extremal distance-`≤ 1` positions from `source` at each lattice time up
/// to `horizon`.
pub fn boundary_lattice(
    field: &IncrementField,
    jumps: &JumpSet,
    source: Site,
    side: Side,
    horizon: i64,
    window: Window,
) -> Result<LatticePath> {
    let frontier = propagate(field, jumps, source, 1, horizon, window)?;
    Ok(LatticePath { start: source.t, values: frontier.extremes(1, side) })
}

/// The right or left distance-one boundary curve from `source`, on the unit
/// grid.
pub fn boundary_curve(
    field: &IncrementField,
    jumps: &JumpSet,
    source: Site,
    side: Side,
    horizon: i64,
    window: Window,
) -> Result<Path> {
    Ok(boundary_lattice(field, jumps, source, side, horizon, window)?.to_unit_path())
}
