//! The increment field: a pure, keyed map from lattice sites to i.i.d. samples
//! of a centered integer distribution.
//!
//! Nothing is stored per site. A sample at `(i, j)` is obtained by hashing
//! `(seed, i, j)` to a 64-bit uniform and pushing it through a fixed cumulative
//! table built from the exact rational probabilities, so results are
//! bit-identical on every platform and independent of query order.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::{Ratio, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Keyed hash of a lattice site; uniform on `u64`.
#[inline]
pub fn site_hash(seed: u64, i: i64, j: i64) -> u64 {
    let mut h = mix64(seed.wrapping_add(GOLDEN));
    h = mix64(h ^ mix64((i as u64).wrapping_add(GOLDEN.rotate_left(17))));
    h = mix64(h ^ mix64((j as u64).wrapping_add(GOLDEN.rotate_left(41))));
    h
}

/// Derive an independent seed for a sub-stream (trial index, scale, ...).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(mix64(seed ^ 0xD1B5_4A32_D192_ED03).wrapping_add(stream.wrapping_mul(GOLDEN)))
}

/// A finite-support, centered, integer-valued increment distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSpec {
    name: String,
    support: Vec<(i64, Rational64)>,
    // cumulative thresholds ⌊2⁶⁴·F(v_k)⌋; the last entry is 2⁶⁴
    thresholds: Vec<u128>,
}

impl IncrementSpec {
    /// Build and validate a spec from `(value, probability)` pairs.
    ///
    /// Probabilities must be strictly positive and sum to one; the mean must
    /// vanish exactly and the variance must be positive.
    pub fn new(name: &str, support: &[(i64, Rational64)]) -> Result<Self> {
        let bad = |reason: String| Error::InvalidSpec { name: name.to_string(), reason };
        if support.is_empty() {
            return Err(bad("empty support".into()));
        }
        let mut sorted: Vec<(i64, Rational64)> = support.to_vec();
        sorted.sort_by_key(|&(v, _)| v);
        if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(bad("duplicate support value".into()));
        }
        let mut total = Ratio::<i128>::zero();
        let mut mean = Ratio::<i128>::zero();
        let mut second = Ratio::<i128>::zero();
        for &(v, p) in &sorted {
            if *p.numer() <= 0 {
                return Err(bad(format!("probability of {v} is not strictly positive")));
            }
            let p = widen(p);
            let v = v as i128;
            total += p;
            mean += p * v;
            second += p * (v * v);
        }
        if total != Ratio::from_integer(1) {
            return Err(bad(format!("probabilities sum to {total}, not 1")));
        }
        if !mean.is_zero() {
            return Err(bad(format!("mean is {mean}, not 0")));
        }
        if !second.is_positive() {
            return Err(bad("variance is zero".into()));
        }

        let mut thresholds = Vec::with_capacity(sorted.len());
        let mut cum = Ratio::<i128>::zero();
        for (k, &(_, p)) in sorted.iter().enumerate() {
            cum += widen(p);
            if k + 1 == sorted.len() {
                thresholds.push(1u128 << 64);
            } else {
                let num = *cum.numer() as u128;
                let den = *cum.denom() as u128;
                if den >= 1u128 << 62 {
                    return Err(bad("probability denominators too large".into()));
                }
                thresholds.push(wide_mul_div(num, den));
            }
        }
        Ok(IncrementSpec { name: name.to_string(), support: sorted, thresholds })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Support values with their probabilities, ascending by value.
    pub fn support(&self) -> &[(i64, Rational64)] {
        &self.support
    }

    pub fn contains(&self, v: i64) -> bool {
        self.support.iter().any(|&(s, _)| s == v)
    }

    pub fn variance(&self) -> Rational64 {
        let mut second = Rational64::zero();
        for &(v, p) in &self.support {
            second += p * Rational64::from_integer(v * v);
        }
        second
    }

    pub fn variance_f64(&self) -> f64 {
        self.variance().to_f64().unwrap_or(f64::NAN)
    }

    pub fn std_dev(&self) -> f64 {
        libm::sqrt(self.variance_f64())
    }

    /// Largest `|v|` over the support.
    pub fn max_step(&self) -> i64 {
        self.support.iter().map(|&(v, _)| v.abs()).max().unwrap_or(0)
    }

    /// Map a uniform 64-bit word to a support value.
    #[inline]
    pub fn quantile(&self, u: u64) -> i64 {
        let u = u as u128;
        for (k, &t) in self.thresholds.iter().enumerate() {
            if u < t {
                return self.support[k].0;
            }
        }
        self.support[self.support.len() - 1].0
    }

    /// Simple symmetric walk, `±1` with probability ½.
    pub fn simple() -> Self {
        let h = Rational64::new(1, 2);
        Self::new("simple", &[(-1, h), (1, h)]).expect("valid preset")
    }

    /// Uniform on `{−2, −1, 1, 2}`; crossing walks, variance 5/2.
    pub fn uniform4() -> Self {
        let q = Rational64::new(1, 4);
        Self::new("uniform4", &[(-2, q), (-1, q), (1, q), (2, q)]).expect("valid preset")
    }

    /// `Binomial(4, ½) − 2`; crossing, aperiodic, unit variance.
    pub fn binom4() -> Self {
        Self::new(
            "binom4",
            &[
                (-2, Rational64::new(1, 16)),
                (-1, Rational64::new(1, 4)),
                (0, Rational64::new(3, 8)),
                (1, Rational64::new(1, 4)),
                (2, Rational64::new(1, 16)),
            ],
        )
        .expect("valid preset")
    }
}

fn widen(p: Rational64) -> Ratio<i128> {
    Ratio::new(*p.numer() as i128, *p.denom() as i128)
}

// ⌊num · 2⁶⁴ / den⌋ for num ≤ den < 2⁶²
fn wide_mul_div(num: u128, den: u128) -> u128 {
    let hi = (num << 32) / den;
    let rem = (num << 32) % den;
    (hi << 32) + (rem << 32) / den
}

/// Return-time period of the walk: `g / gcd(c, g)` where `g` is the gcd of
/// pairwise support differences and `c` any support value.
pub fn period(spec: &IncrementSpec) -> u64 {
    let base = spec.support[0].0;
    let g = spec
        .support
        .iter()
        .fold(0i64, |acc, &(v, _)| acc.gcd(&(v - base)))
        .unsigned_abs();
    if g == 0 {
        return 1;
    }
    let c = base.rem_euclid(g as i64) as u64;
    g / c.gcd(&g)
}

/// Whether the walk with this increment is aperiodic (return-time period 1).
///
/// Only ever used to flag a configuration; periodic specs still simulate.
pub fn check_aperiodicity(spec: &IncrementSpec) -> bool {
    period(spec) == 1
}

/// The i.i.d. field `{ζ_{i,j}}` addressed by lattice site.
#[derive(Debug, Clone)]
pub struct IncrementField {
    seed: u64,
    spec: IncrementSpec,
}

impl IncrementField {
    pub fn new(seed: u64, spec: IncrementSpec) -> Self {
        IncrementField { seed, spec }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &IncrementSpec {
        &self.spec
    }

    /// `ζ_{i,j}` at space `i`, time `j`.
    #[inline]
    pub fn sample(&self, i: i64, j: i64) -> i64 {
        self.spec.quantile(site_hash(self.seed, i, j))
    }
}

/// Free-function form of [`IncrementField::sample`].
pub fn sample_increment(field: &IncrementField, i: i64, j: i64) -> i64 {
    field.sample(i, j)
}
