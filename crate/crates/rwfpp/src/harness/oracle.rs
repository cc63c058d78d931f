use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rwfpp_core::increment::derive_seed;
use rwfpp_core::{Error, Side};

use crate::error::Result;

/// Terminal values of one Euler trajectory pair and its reflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDraw {
    pub reflected: f64,
    pub driver: f64,
    pub barrier: f64,
}

/// `Λ_side(B₁, B₂)(t)` for independent standard Brownian motions from 0,
/// with the full draw kept for pathwise checks.
pub fn reflected_bm_draws(t: f64, side: Side, trials: usize, seed: u64, dt: f64) -> Result<Vec<OracleDraw>> {
    if !(t > 0.0) || !(dt > 0.0) || dt > 1e-3 * t * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("oracle needs 0 < dt <= 1e-3 t (t = {t}, dt = {dt})")).into());
    }
    let steps = (t / dt - 1e-9).ceil() as usize;
    let h = (t / steps as f64).sqrt();
    let draws = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, k as u64));
            let (mut f, mut g) = (0.0f64, 0.0f64);
            let mut ext = 0.0f64;
            for _ in 0..steps {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                f += h * z1;
                g += h * z2;
                let d = f - g;
                ext = match side {
                    Side::Right => ext.min(d),
                    Side::Left => ext.max(d),
                };
            }
            // g + (d − ext) rather than f − ext keeps the side condition
            // exact in floating point
            OracleDraw { reflected: g + ((f - g) - ext), driver: f, barrier: g }
        })
        .collect();
    Ok(draws)
}

/// Samples of `Λ_side(B₁, B₂)(t)` on an Euler grid of spacing at most `dt`.
pub fn reflected_bm_oracle(t: f64, side: Side, trials: usize, seed: u64, dt: f64) -> Result<Vec<f64>> {
    Ok(reflected_bm_draws(t, side, trials, seed, dt)?.into_iter().map(|d| d.reflected).collect())
}
