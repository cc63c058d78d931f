use crate::error::{AppError, Result};

fn sorted(a: &[f64]) -> Vec<f64> {
    let mut v = a.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a − F_b|`.
///
/// Ties are handled by stepping both empirical CDFs past a shared value before
/// comparing.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(AppError::Usage("ks_two_sample needs nonempty samples".into()));
    }
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample(a: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if a.is_empty() {
        return Err(AppError::Usage("ks_one_sample needs a nonempty sample".into()));
    }
    let a = sorted(a);
    let n = a.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < a.len() {
        let x = a[i];
        let lo = i as f64 / n;
        while i < a.len() && a[i] == x {
            i += 1;
        }
        let f = cdf(x);
        d = d.max(f - lo).max(i as f64 / n - f);
    }
    Ok(d)
}

/// Median; the mean of the two middle values for even length.
pub fn median(a: &[f64]) -> Option<f64> {
    if a.is_empty() {
        return None;
    }
    let v = sorted(a);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

pub fn mean(a: &[f64]) -> f64 {
    a.iter().sum::<f64>() / a.len() as f64
}

pub fn std_dev(a: &[f64]) -> f64 {
    let m = mean(a);
    (a.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (a.len() as f64 - 1.0)).sqrt()
}
