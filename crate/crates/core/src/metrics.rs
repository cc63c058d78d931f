//! Path-space and epigraph metrics.
//!
//! Paths are compared through `Φ(x, t) = tanh(x)/(1 + |t|)`, which maps the
//! extended plane into a compact set; `Φ` vanishes at `t = ±∞`. The sup in the
//! path distance runs over a finite [`EvalGrid`]; the remaining quantities
//! (modulus, variation) are computed exactly for piecewise-linear paths.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fpp::Distance;
use crate::walk::Path;

/// `Φ(x, t)`, with `tanh(±∞) = ±1` and `Φ = 0` at `t = ±∞`.
pub fn phi(x: f64, t: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    libm::tanh(x) / (1.0 + libm::fabs(t))
}

/// Finite evaluation times for the path distance, plus the point at `+∞`.
///
/// The point at infinity contributes nothing, since every path is 0 there,
/// and is kept implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalGrid {
    times: Vec<f64>,
}

impl EvalGrid {
    /// Default subdivision count per linear segment.
    pub const SUBDIVISIONS: usize = 8;

    pub fn new(mut times: Vec<f64>) -> Self {
        times.retain(|t| t.is_finite());
        times.sort_by(f64::total_cmp);
        times.dedup();
        EvalGrid { times }
    }

    /// Breakpoints of every path, `subdivisions − 1` interior points per
    /// segment, and `t = 0`.
    ///
    /// Outside the union of the domains each hat-extended path is constant,
    /// so `|ΔΦ|` is largest at the nearest breakpoint or at `t = 0`; the
    /// residual inside segments is second order in the segment length.
    pub fn for_paths(paths: &[&Path], subdivisions: usize) -> Self {
        let sub = subdivisions.max(1);
        let mut times = Vec::new();
        times.push(0.0);
        for p in paths {
            for m in 0..p.len() {
                let t = p.time_at(m);
                times.push(t);
                if m + 1 < p.len() {
                    for k in 1..sub {
                        times.push(t + p.dt() * k as f64 / sub as f64);
                    }
                }
            }
        }
        Self::new(times)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// `d(p₁, p₂) = sup_t |Φ(p̂₁(t), t) − Φ(p̂₂(t), t)| ∨ |tanh t₁ − tanh t₂|`.
pub fn path_distance(p1: &Path, p2: &Path, grid: &EvalGrid) -> f64 {
    let starts = libm::fabs(libm::tanh(p1.start_time()) - libm::tanh(p2.start_time()));
    profile_distance(p1, p2, grid).max(starts)
}

/// The sup term of [`path_distance`] alone.
pub fn profile_distance(p1: &Path, p2: &Path, grid: &EvalGrid) -> f64 {
    let mut d: f64 = 0.0;
    for &t in grid.times() {
        d = d.max(libm::fabs(phi(p1.eval(t), t) - phi(p2.eval(t), t)));
    }
    d
}

/// Hausdorff distance between two nonempty finite path sets under
/// [`path_distance`].
pub fn hausdorff(set1: &[Path], set2: &[Path], grid: &EvalGrid) -> Result<f64> {
    if set1.is_empty() || set2.is_empty() {
        return Err(Error::Precondition("hausdorff needs nonempty sets".into()));
    }
    let directed = |a: &[Path], b: &[Path]| {
        a.iter()
            .map(|p| b.iter().map(|q| path_distance(p, q, grid)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(set1, set2).max(directed(set2, set1)))
}

/// `ℳ_{δ,M}(f) = sup { |f̂(w) − f̂(s)| : |w|, |s| ≤ M, |w − s| ≤ δ }`.
///
/// On each cell of the breakpoint grid the objective is the absolute value of
/// an affine function, so the sup is attained at a vertex of the constraint
/// polygon. Those vertices are breakpoints, breakpoints shifted by `±δ`, and
/// `±M`; a sliding window over that candidate set gives the exact value.
pub fn modulus(f: &Path, delta: f64, m: f64) -> f64 {
    if !(delta > 0.0) || !(m >= 0.0) {
        return 0.0;
    }
    let mut cand = Vec::with_capacity(3 * f.len() + 2);
    cand.push(-m);
    cand.push(m);
    for t in f.times() {
        for c in [t, t - delta, t + delta] {
            if -m < c && c < m {
                cand.push(c);
            }
        }
    }
    cand.sort_by(f64::total_cmp);
    cand.dedup();
    let vals: Vec<f64> = cand.iter().map(|&t| f.eval(t)).collect();
    let eps = 1e-12 * (1.0 + m.max(delta));

    // monotone deques of indices over the window [i, j)
    let mut maxq: alloc::collections::VecDeque<usize> = Default::default();
    let mut minq: alloc::collections::VecDeque<usize> = Default::default();
    let mut j = 0;
    let mut best: f64 = 0.0;
    for i in 0..cand.len() {
        while j < cand.len() && cand[j] <= cand[i] + delta + eps {
            while maxq.back().is_some_and(|&k| vals[k] <= vals[j]) {
                maxq.pop_back();
            }
            maxq.push_back(j);
            while minq.back().is_some_and(|&k| vals[k] >= vals[j]) {
                minq.pop_back();
            }
            minq.push_back(j);
            j += 1;
        }
        while maxq.front().is_some_and(|&k| k < i) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&k| k < i) {
            minq.pop_front();
        }
        let hi = vals[*maxq.front().expect("window holds i")];
        let lo = vals[*minq.front().expect("window holds i")];
        best = best.max(hi - vals[i]).max(vals[i] - lo);
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variation {
    Positive,
    Negative,
}

/// `P_{w,s}(f)` or `N_{w,s}(f)`: total positive or negative variation of `f̂`
/// on `[w, s]`, summed over breakpoint increments.
pub fn variation(f: &Path, w: f64, s: f64, sign: Variation) -> Result<f64> {
    if !(w < s) {
        return Err(Error::Precondition("variation needs w < s".into()));
    }
    let mut prev = f.eval(w);
    let mut total = 0.0;
    let times = f.times().filter(|&t| w < t && t < s).chain(core::iter::once(s));
    for t in times {
        let v = f.eval(t);
        let inc = v - prev;
        match sign {
            Variation::Positive if inc > 0.0 => total += inc,
            Variation::Negative if inc < 0.0 => total -= inc,
            _ => {}
        }
        prev = v;
    }
    Ok(total)
}

/// `E((u, v), value)`: the key `r = (u, v)` followed by
/// `|u − v|·e^{−|r|}·value/(1 + |value|)`, or `±|u − v|·e^{−|r|}` at `±∞`.
pub fn epigraph_embed(u: (f64, f64), v: (f64, f64), value: f64) -> [f64; 5] {
    let r = [u.0, u.1, v.0, v.1];
    let norm = libm::sqrt(r.iter().map(|c| c * c).sum());
    let sep = libm::hypot(u.0 - v.0, u.1 - v.1);
    let scale = sep * libm::exp(-norm);
    let last = if value.is_infinite() {
        scale * value.signum()
    } else {
        scale * value / (1.0 + libm::fabs(value))
    };
    [r[0], r[1], r[2], r[3], last]
}

type Key = ((f64, f64), (f64, f64));

/// Finite sample of a distance function: values at distinct `(u, v)` keys.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceSample {
    points: Vec<(Key, Distance)>,
}

fn key_bits(k: &Key) -> [u64; 4] {
    [k.0 .0.to_bits(), k.0 .1.to_bits(), k.1 .0.to_bits(), k.1 .1.to_bits()]
}

impl DistanceSample {
    pub fn new(points: Vec<((f64, f64), (f64, f64), Distance)>) -> Result<Self> {
        let points: Vec<(Key, Distance)> = points.into_iter().map(|(u, v, d)| ((u, v), d)).collect();
        let mut keys: Vec<[u64; 4]> = points.iter().map(|(k, _)| key_bits(k)).collect();
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Precondition("duplicate (u, v) key in distance sample".into()));
        }
        Ok(DistanceSample { points })
    }

    pub fn points(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64), Distance)> + '_ {
        self.points.iter().map(|&((u, v), d)| (u, v, d))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn sorted_keys(&self) -> Vec<[u64; 4]> {
        let mut keys: Vec<[u64; 4]> = self.points.iter().map(|(k, _)| key_bits(k)).collect();
        keys.sort_unstable();
        keys
    }

    /// Embedded epigraph rays: levels `value, ⌊value⌋+1, …, cap` and `∞`.
    pub fn embedded_rays(&self, cap: u32) -> Vec<[f64; 5]> {
        let mut out = Vec::new();
        for &((u, v), d) in &self.points {
            if let Distance::Finite(level) = d {
                out.push(epigraph_embed(u, v, level as f64));
                for l in level + 1..=cap {
                    out.push(epigraph_embed(u, v, l as f64));
                }
            }
            out.push(epigraph_embed(u, v, f64::INFINITY));
        }
        out
    }
}

/// Default ray discretization cap.
pub const EPIGRAPH_CAP: u32 = 8;

/// Euclidean Hausdorff distance between finite point sets in `ℝ⁵`.
pub fn point_hausdorff(a: &[[f64; 5]], b: &[[f64; 5]]) -> f64 {
    let dist = |p: &[f64; 5], q: &[f64; 5]| {
        libm::sqrt(p.iter().zip(q).map(|(x, y)| (x - y) * (x - y)).sum())
    };
    let directed = |a: &[[f64; 5]], b: &[[f64; 5]]| {
        a.iter()
            .map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// `d⋆` between two samples on the same key grid, rays capped at
/// [`EPIGRAPH_CAP`].
pub fn epigraph_distance(d1: &DistanceSample, d2: &DistanceSample) -> Result<f64> {
    epigraph_distance_capped(d1, d2, EPIGRAPH_CAP)
}

pub fn epigraph_distance_capped(d1: &DistanceSample, d2: &DistanceSample, cap: u32) -> Result<f64> {
    if d1.sorted_keys() != d2.sorted_keys() {
        return Err(Error::KeyMismatch);
    }
    if d1.is_empty() {
        return Ok(0.0);
    }
    Ok(point_hausdorff(&d1.embedded_rays(cap), &d2.embedded_rays(cap)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn path(start: f64, dt: f64, v: &[f64]) -> Path {
        Path::new(start, dt, v.to_vec()).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(0.0, 0.0), 0.0);
        assert_eq!(phi(f64::INFINITY, 0.0), 1.0);
        assert_eq!(phi(f64::NEG_INFINITY, 1.0), -0.5);
        assert_eq!(phi(3.0, f64::INFINITY), 0.0);
    }

    #[test]
    fn path_distance_examples() {
        let a = path(0.0, 1.0, &[0.0, 0.0, 0.0]);
        let b = path(1.0, 1.0, &[0.0, 0.0, 0.0]);
        let g = EvalGrid::for_paths(&[&a, &b], 8);
        assert_eq!(path_distance(&a, &a, &g), 0.0);
        assert_eq!(path_distance(&a, &b, &g), libm::tanh(1.0));
        assert!((path_distance(&a, &b, &g) - 0.761594).abs() < 1e-6);
    }

    #[test]
    fn hausdorff_singletons() {
        let a = path(0.0, 0.5, &[0.0, 1.0, -1.0]);
        let b = path(0.0, 0.5, &[0.0, 2.0, 0.0]);
        let g = EvalGrid::for_paths(&[&a, &b], 8);
        let d = path_distance(&a, &b, &g);
        assert_eq!(hausdorff(std::slice::from_ref(&a), std::slice::from_ref(&b), &g).unwrap(), d);
        assert_eq!(hausdorff(&[a.clone(), b.clone()], &[b, a.clone()], &g).unwrap(), 0.0);
        assert!(hausdorff(&[], &[a], &g).is_err());
    }

    #[test]
    fn modulus_examples() {
        assert_eq!(modulus(&path(-1.0, 0.5, &[2.0; 5]), 0.3, 1.0), 0.0);
        let id = path(-1.0, 1.0, &[-1.0, 0.0, 1.0]);
        assert_eq!(modulus(&id, 0.5, 1.0), 0.5);
        assert_eq!(modulus(&id, 5.0, 1.0), 2.0);
        // a spike narrower than δ
        let spike = path(0.0, 1.0, &[0.0, 3.0, 0.0, 0.0]);
        assert_eq!(modulus(&spike, 0.25, 10.0), 0.75);
        assert_eq!(modulus(&spike, 1.0, 10.0), 3.0);
        // clipping to [−M, M]
        assert_eq!(modulus(&spike, 1.0, 0.5), 1.5);
    }

    #[test]
    fn variation_examples() {
        let up = path(0.0, 1.0, &[0.0, 1.0, 3.0, 6.0]);
        assert_eq!(variation(&up, 0.0, 3.0, Variation::Positive).unwrap(), 6.0);
        assert_eq!(variation(&up, 0.0, 3.0, Variation::Negative).unwrap(), 0.0);
        assert_eq!(variation(&up, 0.5, 2.5, Variation::Positive).unwrap(), 4.0);
        let zig = path(0.0, 1.0, &[0.0, 2.0, -1.0, 1.0]);
        let p = variation(&zig, -1.0, 4.0, Variation::Positive).unwrap();
        let n = variation(&zig, -1.0, 4.0, Variation::Negative).unwrap();
        assert_eq!((p, n), (4.0, 3.0));
        assert!(variation(&zig, 1.0, 1.0, Variation::Positive).is_err());
    }

    #[test]
    fn embed_examples() {
        let (u, v) = ((0.0, 0.0), (1.0, 1.0));
        let c = 2f64.sqrt() * (-(2f64.sqrt())).exp();
        assert_eq!(epigraph_embed(u, v, 0.0)[4], 0.0);
        assert!((epigraph_embed(u, v, f64::INFINITY)[4] - c).abs() < 1e-15);
        assert!((epigraph_embed(u, v, 1.0)[4] - c / 2.0).abs() < 1e-15);
        for val in [0.0, 3.0, f64::INFINITY] {
            assert_eq!(epigraph_embed(v, v, val)[4], 0.0);
        }
    }

    #[test]
    fn epigraph_distance_examples() {
        let (u, v) = ((0.0, 0.0), (0.5, 1.0));
        let d0 = DistanceSample::new(vec![(u, v, Distance::Finite(0))]).unwrap();
        let dinf = DistanceSample::new(vec![(u, v, Distance::Infinite)]).unwrap();
        assert_eq!(epigraph_distance(&d0, &d0).unwrap(), 0.0);
        let c = epigraph_embed(u, v, f64::INFINITY)[4];
        assert!((epigraph_distance(&d0, &dinf).unwrap() - c).abs() < 1e-15);
        let other = DistanceSample::new(vec![(u, (0.5, 2.0), Distance::Finite(0))]).unwrap();
        assert_eq!(epigraph_distance(&d0, &other), Err(Error::KeyMismatch));
        assert!(DistanceSample::new(vec![(u, v, Distance::Finite(0)), (u, v, Distance::Finite(1))]).is_err());
    }
}
