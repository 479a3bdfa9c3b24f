//! Comparison estimators for the two-dataset translation problem: each fits a
//! location to {xᵢ} and to {zⱼ} and reports the difference.

use serde::{Deserialize, Serialize};

use crate::distributions::Family;
use crate::error::{Error, Result};
use crate::optim::{golden_section_max, grid_then_refine};

fn nonempty(data: &[f64], what: &str) -> Result<()> {
    if data.is_empty() {
        return Err(Error::InvalidInput(format!("{what} is empty")));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!(
            "{what} contains non-finite values"
        )));
    }
    Ok(())
}

pub fn mean(data: &[f64]) -> f64 {
    data.iter().sum::<f64>() / data.len() as f64
}

fn sorted(data: &[f64]) -> Vec<f64> {
    let mut v = data.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Sample median; even sizes take the midpoint of the two central values.
pub fn median(data: &[f64]) -> f64 {
    let v = sorted(data);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// First-moment matching: mean(x) − mean(z).
pub fn moment_matching(x_data: &[f64], z_data: &[f64]) -> Result<f64> {
    nonempty(x_data, "x data")?;
    nonempty(z_data, "z data")?;
    Ok(mean(x_data) - mean(z_data))
}

pub fn log_likelihood(data: &[f64], family: Family, location: f64) -> f64 {
    data.iter()
        .map(|v| family.base_log_density(v - location))
        .sum()
}

/// Maximum-likelihood location of unit-scale `family` data.
///
/// Gaussian and Laplace use their closed forms (mean, median with the
/// midpoint convention). Cauchy starts from the median and searches a
/// bracket of ±2 interquartile ranges, which sidesteps the spurious local
/// maxima the Cauchy likelihood develops around outliers.
pub fn mle_location(data: &[f64], family: Family) -> Result<f64> {
    nonempty(data, "data")?;
    Ok(match family {
        Family::Gaussian => mean(data),
        Family::Laplace => median(data),
        Family::Cauchy => {
            let v = sorted(data);
            let med = quantile_sorted(&v, 0.5);
            let iqr = quantile_sorted(&v, 0.75) - quantile_sorted(&v, 0.25);
            let half = if iqr > 0.0 { 2.0 * iqr } else { 1.0 };
            let m = grid_then_refine(
                |nu| log_likelihood(&v, family, nu),
                med - half,
                med + half,
                81,
                1e-10,
                200,
            );
            newton_polish(&v, m.x[0])
        }
    })
}

/// A few Newton steps on the Cauchy score, kept only while they improve the likelihood.
fn newton_polish(data: &[f64], start: f64) -> f64 {
    let mut nu = start;
    let mut best = log_likelihood(data, Family::Cauchy, nu);
    for _ in 0..5 {
        let (mut g, mut h) = (0.0, 0.0);
        for v in data {
            let r = v - nu;
            let s = 1.0 + r * r;
            g += 2.0 * r / s;
            h += 2.0 * (r * r - 1.0) / (s * s);
        }
        if !(h < 0.0) {
            break;
        }
        let next = nu - g / h;
        let value = log_likelihood(data, Family::Cauchy, next);
        if !(value > best) {
            break;
        }
        nu = next;
        best = value;
    }
    nu
}

/// argmax_ν Σ log g₀(xᵢ − ν) − argmax_μ Σ log g₀(zⱼ − μ).
pub fn mle_translation(x_data: &[f64], z_data: &[f64], family: Family) -> Result<f64> {
    Ok(mle_location(x_data, family)? - mle_location(z_data, family)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HuberConfig {
    pub c: f64,
    pub max_iters: usize,
    pub tolerance: f64,
}

impl Default for HuberConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            max_iters: 500,
            tolerance: 1e-10,
        }
    }
}

/// φ(w) = w² for |w| ≤ c, 2c|w| − c² otherwise.
pub fn huber_phi(w: f64, c: f64) -> f64 {
    let a = w.abs();
    if a <= c {
        w * w
    } else {
        2.0 * c * a - c * c
    }
}

pub fn huber_objective(data: &[f64], nu: f64, c: f64) -> f64 {
    data.iter().map(|v| huber_phi(v - nu, c)).sum()
}

/// argmin_ν Σ φ(dataᵢ − ν) by iteratively reweighted averaging from the
/// median, with a ternary-search fallback if the iteration stalls.
pub fn huber_location(data: &[f64], cfg: &HuberConfig) -> Result<f64> {
    nonempty(data, "data")?;
    if !(cfg.c > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "Huber threshold must be positive, got {}",
            cfg.c
        )));
    }
    if !(cfg.tolerance > 0.0) {
        return Err(Error::InvalidConfig(
            "Huber tolerance must be positive".into(),
        ));
    }
    let mut nu = median(data);
    for _ in 0..cfg.max_iters {
        let (mut num, mut den) = (0.0, 0.0);
        for v in data {
            let r = (v - nu).abs();
            let w = if r <= cfg.c { 1.0 } else { cfg.c / r };
            num += w * v;
            den += w;
        }
        let next = num / den;
        if (next - nu).abs() < cfg.tolerance {
            return Ok(next);
        }
        nu = next;
    }
    log::debug!("Huber reweighting stalled; falling back to ternary search");
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let m = golden_section_max(
        |v| -huber_objective(data, v, cfg.c),
        lo,
        hi,
        cfg.tolerance,
        10_000,
    );
    if !m.converged {
        return Err(Error::NotConverged {
            iterations: cfg.max_iters + m.iterations,
            last: m.x,
        });
    }
    Ok(m.x[0])
}

pub fn huber_translation(x_data: &[f64], z_data: &[f64], cfg: &HuberConfig) -> Result<f64> {
    Ok(huber_location(x_data, cfg)? - huber_location(z_data, cfg)?)
}
