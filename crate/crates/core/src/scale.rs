//! Exact rational rounding onto the rescaled lattice.
//!
//! Time is rescaled by `n` and space by `√n`. All roundings are computed in
//! integer arithmetic, including `⌈√n·x⌉` for non-square `n`.

use num_rational::Rational64;

use crate::error::{Error, Result};

/// Smallest `r` with `r² ≥ a`.
pub fn isqrt_ceil(a: u128) -> u128 {
    let r = isqrt_floor(a);
    if r * r == a {
        r
    } else {
        r + 1
    }
}

/// Largest `r` with `r² ≤ a`.
pub fn isqrt_floor(a: u128) -> u128 {
    if a < 2 {
        return a;
    }
    let mut x = libm::sqrt(a as f64) as u128;
    // float estimate is within a few units; settle it exactly
    while x * x > a {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= a {
        x += 1;
    }
    x
}

fn ceil_div(p: i128, q: i128) -> i128 {
    debug_assert!(q > 0);
    let d = p.div_euclid(q);
    if p.rem_euclid(q) != 0 {
        d + 1
    } else {
        d
    }
}

/// `⌈r⌉` for a rational.
pub fn ceil_rational(r: Rational64) -> i64 {
    ceil_div(*r.numer() as i128, *r.denom() as i128) as i64
}

/// Space-time rescaling: time by `n`, space by `√n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    n: u64,
    root: Option<u64>,
}

impl Scale {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidScale(n));
        }
        let r = isqrt_floor(n as u128) as u64;
        let root = if r * r == n { Some(r) } else { None };
        Ok(Scale { n, root })
    }

    /// The unscaled lattice, `n = 1`.
    pub fn unit() -> Self {
        Scale { n: 1, root: Some(1) }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn is_perfect_square(&self) -> bool {
        self.root.is_some()
    }

    pub fn sqrt_n(&self) -> f64 {
        match self.root {
            Some(r) => r as f64,
            None => libm::sqrt(self.n as f64),
        }
    }

    /// Lattice time index `⌈n·s⌉`, so that `⌈s⌉_n = step / n`.
    pub fn time_step(&self, s: Rational64) -> i64 {
        let p = *s.numer() as i128 * self.n as i128;
        ceil_div(p, *s.denom() as i128) as i64
    }

    /// Lattice site `⌈√n·x⌉`, so that `⌈x⌉_√n = site / √n`.
    pub fn space_site(&self, x: Rational64) -> i64 {
        let p = *x.numer() as i128;
        let q = *x.denom() as i128;
        if let Some(r) = self.root {
            return ceil_div(p * r as i128, q) as i64;
        }
        // m ≥ √n·p/q  ⇔  m·q ≥ √(n p²) with sign handled separately
        let a = (self.n as u128) * (p.unsigned_abs() * p.unsigned_abs());
        if p >= 0 {
            let r = isqrt_ceil(a) as i128;
            ceil_div(r, q) as i64
        } else {
            let r = isqrt_floor(a) as i128;
            -(r.div_euclid(q) as i64)
        }
    }

    /// `n·s` when it is an integer.
    pub fn time_lattice(&self, s: Rational64) -> Option<i64> {
        let p = *s.numer() as i128 * self.n as i128;
        let q = *s.denom() as i128;
        (p % q == 0).then(|| (p / q) as i64)
    }

    /// `√n·x` when it is an integer.
    pub fn space_lattice(&self, x: Rational64) -> Option<i64> {
        let p = *x.numer() as i128;
        let q = *x.denom() as i128;
        if let Some(r) = self.root {
            let v = p * r as i128;
            return (v % q == 0).then(|| (v / q) as i64);
        }
        if p == 0 {
            return Some(0);
        }
        let a = (self.n as u128) * (p.unsigned_abs() * p.unsigned_abs());
        let r = isqrt_floor(a);
        if r * r != a || r % (q as u128) != 0 {
            return None;
        }
        let m = (r / q as u128) as i64;
        Some(if p < 0 { -m } else { m })
    }

    /// Rescaled time of a lattice time index.
    pub fn time_of(&self, step: i64) -> f64 {
        step as f64 / self.n as f64
    }

    /// Rescaled position of a lattice site.
    pub fn position_of(&self, site: i64) -> f64 {
        site as f64 / self.sqrt_n()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational64 {
        Rational64::new(p, q)
    }

    #[test]
    fn ceil_time_matches_definition() {
        let s = Scale::new(4).unwrap();
        assert_eq!(s.time_step(r(1, 3)), 2);
        assert_eq!(s.time_step(r(-1, 3)), -1);
        assert_eq!(s.time_step(r(1, 2)), 2);
        assert_eq!(ceil_rational(r(-7, 2)), -3);
    }

    #[test]
    fn ceil_space_square_and_non_square() {
        let s4 = Scale::new(4).unwrap();
        assert_eq!(s4.space_site(r(3, 4)), 2);
        assert_eq!(s4.space_site(r(-3, 4)), -1);

        // √2 · 1 = 1.414… → 2 ; √2 · (−1) → −1 ; √2 · 3/2 = 2.12… → 3
        let s2 = Scale::new(2).unwrap();
        assert_eq!(s2.space_site(r(1, 1)), 2);
        assert_eq!(s2.space_site(r(-1, 1)), -1);
        assert_eq!(s2.space_site(r(3, 2)), 3);
        assert_eq!(s2.space_site(r(0, 1)), 0);
        // brute force against floating point away from ties
        for p in -40..=40 {
            for q in 1..7 {
                let x = r(p, q);
                let f = libm::sqrt(2.0) * (p as f64) / (q as f64);
                assert_eq!(s2.space_site(x), libm::ceil(f) as i64, "p={p} q={q}");
            }
        }
    }

    #[test]
    fn lattice_membership() {
        let s = Scale::new(16).unwrap();
        assert_eq!(s.space_lattice(r(1, 4)), Some(1));
        assert_eq!(s.space_lattice(r(1, 3)), None);
        assert_eq!(s.time_lattice(r(3, 16)), Some(3));
        assert_eq!(s.time_lattice(r(1, 3)), None);
        let s2 = Scale::new(2).unwrap();
        assert_eq!(s2.space_lattice(r(0, 1)), Some(0));
        assert_eq!(s2.space_lattice(r(1, 1)), None);
    }

    #[test]
    fn isqrt_exact() {
        for a in 0u128..2000 {
            let f = isqrt_floor(a);
            assert!(f * f <= a && (f + 1) * (f + 1) > a);
            let c = isqrt_ceil(a);
            assert!(c * c >= a && (c == 0 || (c - 1) * (c - 1) < a));
        }
    }
}
