//! Coalescing walk trajectories and the piecewise-linear [`Path`] they live in.

use alloc::vec::Vec;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::increment::IncrementField;
use crate::scale::Scale;

/// A lattice point: space `x`, time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub x: i64,
    pub t: i64,
}

impl Site {
    pub const fn new(x: i64, t: i64) -> Self {
        Site { x, t }
    }
}

/// Finite space-time box bounding what the percolation engine enumerates.
///
/// Walks themselves are defined everywhere; the window only limits the
/// frontier search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub x_min: i64,
    pub x_max: i64,
    pub t_min: i64,
    pub t_max: i64,
}

impl Window {
    pub fn new(x_min: i64, x_max: i64, t_min: i64, t_max: i64) -> Result<Self> {
        if x_min >= x_max || t_min >= t_max {
            return Err(Error::InvalidWindow { x_min, x_max, t_min, t_max });
        }
        Ok(Window { x_min, x_max, t_min, t_max })
    }

    /// Window `[center − half_width, center + half_width] × [t_min, t_max]`.
    pub fn around(center: i64, half_width: i64, t_min: i64, t_max: i64) -> Result<Self> {
        Self::new(center - half_width, center + half_width, t_min, t_max)
    }

    #[inline]
    pub fn contains_x(&self, x: i64) -> bool {
        self.x_min <= x && x <= self.x_max
    }

    #[inline]
    pub fn contains(&self, site: Site) -> bool {
        self.contains_x(site.x) && self.t_min <= site.t && site.t <= self.t_max
    }

    pub fn width(&self) -> u64 {
        (self.x_max - self.x_min) as u64 + 1
    }
}

/// A path sampled on the uniform grid `start_time + m·dt`, linearly
/// interpolated in between.
///
/// Evaluation uses the hat-extension: constant `values[0]` before the start.
/// Past the last grid point the final value is held, since every path here
/// has a finite horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    start_time: f64,
    dt: f64,
    values: Vec<f64>,
}

impl Path {
    pub fn new(start_time: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidPath("no values".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidPath("grid spacing must be positive and finite".into()));
        }
        if !start_time.is_finite() {
            return Err(Error::InvalidPath("start time must be finite".into()));
        }
        Ok(Path { start_time, dt, values })
    }

    pub fn start_time(&self) -> f64 {
        self.start_time
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn end_time(&self) -> f64 {
        self.time_at(self.values.len() - 1)
    }

    pub fn time_at(&self, m: usize) -> f64 {
        self.start_time + m as f64 * self.dt
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Grid times, in order.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |m| self.time_at(m))
    }

    /// `f̂(t)`: linear interpolation on the grid, constant outside it.
    pub fn eval(&self, t: f64) -> f64 {
        let u = (t - self.start_time) / self.dt;
        if !(u > 0.0) {
            return self.values[0];
        }
        let last = self.values.len() - 1;
        if u >= last as f64 {
            return self.values[last];
        }
        let m = libm::floor(u) as usize;
        let frac = u - m as f64;
        if frac == 0.0 {
            return self.values[m];
        }
        let a = self.values[m];
        let b = self.values[m + 1];
        a + (b - a) * frac
    }

    /// Number of grid steps from `self`'s start to `other`'s start, if the two
    /// grids coincide.
    pub fn grid_offset(&self, other: &Path) -> Result<i64> {
        let tol = 1e-9;
        if ((self.dt - other.dt) / self.dt).abs() > 1e-12 {
            return Err(Error::GridMismatch(alloc::format!(
                "spacings {} and {} differ",
                self.dt, other.dt
            )));
        }
        let u = (other.start_time - self.start_time) / self.dt;
        let k = libm::round(u);
        if (u - k).abs() > tol {
            return Err(Error::GridMismatch("start times are not grid-aligned".into()));
        }
        Ok(k as i64)
    }
}

/// Integer-valued path on an integer time grid, the exact form of walks,
/// journeys and reflections before rescaling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePath {
    /// Lattice time index of `values[0]`.
    pub start: i64,
    pub values: Vec<i64>,
}

impl LatticePath {
    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    /// Value at lattice time `t`, if inside the domain.
    pub fn at(&self, t: i64) -> Option<i64> {
        if t < self.start {
            return None;
        }
        self.values.get((t - self.start) as usize).copied()
    }

    /// Rescaled view: time `t/n`, space `x/√n`.
    pub fn to_path(&self, scale: Scale) -> Path {
        let root = scale.sqrt_n();
        Path {
            start_time: scale.time_of(self.start),
            dt: 1.0 / scale.n() as f64,
            values: self.values.iter().map(|&v| v as f64 / root).collect(),
        }
    }

    /// Unscaled view on the unit grid; exact for integer data.
    pub fn to_unit_path(&self) -> Path {
        Path {
            start_time: self.start as f64,
            dt: 1.0,
            values: self.values.iter().map(|&v| v as f64).collect(),
        }
    }
}

/// `Y_{i,j}(t)` for `t ≥ j`.
pub fn walk_position(field: &IncrementField, i: i64, j: i64, t: i64) -> i64 {
    assert!(t >= j, "walk_position requires t >= j");
    let mut x = i;
    for s in j..t {
        x += field.sample(x, s);
    }
    x
}

/// Lattice values `Y_{i,j}(j..=t_end)`.
pub fn walk_lattice(field: &IncrementField, i: i64, j: i64, t_end: i64) -> LatticePath {
    assert!(t_end >= j, "walk requires t_end >= j");
    let mut values = Vec::with_capacity((t_end - j) as usize + 1);
    let mut x = i;
    values.push(x);
    for s in j..t_end {
        x += field.sample(x, s);
        values.push(x);
    }
    LatticePath { start: j, values }
}

/// The interpolated walk from `(i, j)` up to `t_end`, on the unit grid.
pub fn walk_path(field: &IncrementField, i: i64, j: i64, t_end: i64) -> Path {
    walk_lattice(field, i, j, t_end).to_unit_path()
}

/// `Y^n` started from `(⌈x⌉_√n, ⌈s⌉_n)` and run to `⌈t_end⌉_n`.
pub fn rescaled_walk(
    field: &IncrementField,
    scale: Scale,
    x: Rational64,
    s: Rational64,
    t_end: Rational64,
) -> Result<Path> {
    if t_end < s {
        return Err(Error::Precondition("t_end must not precede s".into()));
    }
    let j = scale.time_step(s);
    let i = scale.space_site(x);
    let end = scale.time_step(t_end);
    Ok(walk_lattice(field, i, j, end).to_path(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increment::{IncrementSpec, sample_increment};

    fn field() -> IncrementField {
        IncrementField::new(11, IncrementSpec::uniform4())
    }

    #[test]
    fn walk_base_and_step() {
        let f = field();
        assert_eq!(walk_position(&f, 5, 0, 0), 5);
        for (i, j) in [(0, 0), (3, -4), (-7, 9)] {
            assert_eq!(walk_position(&f, i, j, j + 1) - i, sample_increment(&f, i, j));
        }
    }

    #[test]
    fn walk_path_consistency() {
        let f = field();
        let p = walk_path(&f, 2, 3, 3);
        assert_eq!(p.values(), &[2.0]);
        let p = walk_path(&f, 2, 3, 20);
        for t in 3..=20 {
            assert_eq!(p.eval(t as f64), walk_position(&f, 2, 3, t) as f64);
        }
        let mid = p.eval(3.5);
        assert_eq!(mid, 0.5 * (p.values()[0] + p.values()[1]));
    }

    #[test]
    fn rescaled_walk_n1_matches_walk() {
        let f = field();
        let p = rescaled_walk(&f, Scale::unit(), Rational64::from_integer(4), Rational64::from_integer(-2), Rational64::from_integer(10)).unwrap();
        assert_eq!(p, walk_path(&f, 4, -2, 10));
    }

    #[test]
    fn rescaled_walk_grid() {
        let f = field();
        let scale = Scale::new(4).unwrap();
        let p = rescaled_walk(&f, scale, Rational64::new(3, 4), Rational64::new(1, 3), Rational64::from_integer(2)).unwrap();
        assert_eq!(p.dt(), 0.25);
        assert_eq!(p.start_time(), 0.5);
        assert_eq!(p.first(), 1.0); // ⌈2·3/4⌉/2
        for &v in p.values() {
            assert_eq!((v * 2.0).fract(), 0.0);
        }
        assert_eq!(p.end_time(), 2.0);
    }

    #[test]
    fn hat_extension() {
        let p = Path::new(1.0, 0.5, alloc::vec![3.0, 5.0, 4.0]).unwrap();
        assert_eq!(p.eval(-10.0), 3.0);
        assert_eq!(p.eval(1.25), 4.0);
        assert_eq!(p.eval(2.0), 4.0);
        assert_eq!(p.eval(50.0), 4.0);
        assert!(Path::new(0.0, 0.0, alloc::vec![1.0]).is_err());
        assert!(Path::new(0.0, 1.0, alloc::vec![]).is_err());
    }

    #[test]
    fn coalescence_is_absorbing() {
        let f = field();
        let mut met = 0;
        for a in -30..30 {
            let b = a + 1;
            let pa = walk_lattice(&f, a, 0, 60);
            let pb = walk_lattice(&f, b, 0, 60);
            if let Some(k) = (0..pa.values.len()).find(|&k| pa.values[k] == pb.values[k]) {
                met += 1;
                assert_eq!(pa.values[k..], pb.values[k..]);
            }
        }
        assert!(met > 0);
    }
}
