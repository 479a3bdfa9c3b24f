//! Bayesian-like estimates from a known likelihood f(x | θ) and samples
//! θ₁..θₙ drawn from an unknown prior.
//!
//! The closed forms ([`mmse_estimate`], [`mmae_estimate`]) normalise weights
//! in the log domain, so an observation far in the tails still produces a
//! usable estimate. The iterations ([`sgd_iterate`], [`gd_iterate`]) use the
//! raw likelihood values as step weights, which is what ties the step size to
//! the model's scale.

use rand::seq::SliceRandom;

use crate::costs::CostSpec;
use crate::distributions::DistributionSpec;
use crate::error::{check_len, Error, Result};
use crate::rng::seeded;

pub trait LikelihoodModel: Sync {
    /// log f(x | θ); `f64::NEG_INFINITY` where the likelihood is zero.
    fn log_likelihood(&self, x: &[f64], theta: &[f64]) -> f64;

    fn likelihood(&self, x: &[f64], theta: &[f64]) -> f64 {
        self.log_likelihood(x, theta).exp()
    }
}

/// f(x | θ) = Πₖ g₀(xₖ − μ − θₖ): a base density with location μ, translated by θ.
///
/// An `x` longer than θ is read as consecutive iid observations of length
/// `θ.len()`, and their log-likelihoods are summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationModel {
    pub base: DistributionSpec,
}

impl TranslationModel {
    pub fn new(base: DistributionSpec) -> Self {
        Self { base }
    }
}

impl LikelihoodModel for TranslationModel {
    fn log_likelihood(&self, x: &[f64], theta: &[f64]) -> f64 {
        if theta.is_empty() {
            return 0.0;
        }
        x.chunks(theta.len())
            .flat_map(|row| row.iter().zip(theta))
            .map(|(xi, ti)| self.base.log_density(xi - ti))
            .sum()
    }
}

/// Adapts a closure returning likelihood values (not logs).
pub struct FnLikelihood<F>(pub F);

impl<F> LikelihoodModel for FnLikelihood<F>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    fn log_likelihood(&self, x: &[f64], theta: &[f64]) -> f64 {
        (self.0)(x, theta).ln()
    }

    fn likelihood(&self, x: &[f64], theta: &[f64]) -> f64 {
        (self.0)(x, theta)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorSamples {
    dim: usize,
    values: Vec<f64>,
}

impl PriorSamples {
    pub fn new(samples: Vec<Vec<f64>>) -> Result<Self> {
        let dim = samples
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("prior sample set is empty".into()))?;
        if dim == 0 {
            return Err(Error::InvalidInput(
                "prior samples must be nonempty vectors".into(),
            ));
        }
        for s in &samples {
            check_len("prior sample width", dim, s.len())?;
        }
        Ok(Self {
            dim,
            values: samples.concat(),
        })
    }

    pub fn scalar(samples: &[f64]) -> Result<Self> {
        Self::new(samples.iter().map(|&v| vec![v]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }
}

/// Likelihood weights rescaled so the largest is 1.
pub fn normalized_weights(
    model: &dyn LikelihoodModel,
    prior: &PriorSamples,
    x: &[f64],
) -> Result<Vec<f64>> {
    let logs: Vec<f64> = prior.iter().map(|t| model.log_likelihood(x, t)).collect();
    if logs.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(Error::NonFinite("log-likelihood".into()));
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::DegenerateWeights);
    }
    Ok(logs.iter().map(|l| (l - max).exp()).collect())
}

/// Likelihood-weighted mean Σθᵢ f(x|θᵢ) / Σ f(x|θᵢ).
pub fn mmse_estimate(
    model: &dyn LikelihoodModel,
    prior: &PriorSamples,
    x: &[f64],
) -> Result<Vec<f64>> {
    let weights = normalized_weights(model, prior, x)?;
    let total: f64 = weights.iter().sum();
    let mut out = vec![0.0; prior.dim()];
    for (theta, w) in prior.iter().zip(&weights) {
        for (o, t) in out.iter_mut().zip(theta) {
            *o += w * t;
        }
    }
    out.iter_mut().for_each(|o| *o /= total);
    Ok(out)
}

/// Per-coordinate weighted median, the minimiser of Σ‖u − θᵢ‖₁ f(x|θᵢ).
///
/// Returns the smallest value whose cumulative weight reaches half the total.
pub fn mmae_estimate(
    model: &dyn LikelihoodModel,
    prior: &PriorSamples,
    x: &[f64],
) -> Result<Vec<f64>> {
    let weights = normalized_weights(model, prior, x)?;
    Ok((0..prior.dim())
        .map(|k| {
            let column: Vec<f64> = prior.iter().map(|t| t[k]).collect();
            weighted_median(&column, &weights)
        })
        .collect())
}

pub fn weighted_median(values: &[f64], weights: &[f64]) -> f64 {
    debug_assert_eq!(values.len(), weights.len());
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let half = 0.5 * weights.iter().sum::<f64>();
    let mut cumulative = 0.0;
    for &i in &order {
        cumulative += weights[i];
        if cumulative >= half {
            return values[i];
        }
    }
    values[*order.last().expect("nonempty")]
}

/// Sample objective (1/n) Σ C(u, θᵢ) f(x|θᵢ) with raw likelihood weights.
pub fn sample_objective(
    model: &dyn LikelihoodModel,
    prior: &PriorSamples,
    x: &[f64],
    cost: CostSpec,
    u: &[f64],
) -> Result<f64> {
    check_len("estimate", prior.dim(), u.len())?;
    let total: f64 = prior
        .iter()
        .map(|t| cost.cost_unchecked(u, t) * model.likelihood(x, t))
        .sum();
    Ok(total / prior.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepSchedule {
    #[default]
    Constant,
    /// μₜ = μ / (1 + t/n) with n the number of prior samples.
    Decaying,
}

#[derive(Debug, Clone, Copy)]
pub struct SgdIterateConfig {
    pub step: f64,
    pub schedule: StepSchedule,
    pub sweeps: usize,
    pub seed: u64,
}

fn raw_weights(model: &dyn LikelihoodModel, prior: &PriorSamples, x: &[f64]) -> Result<Vec<f64>> {
    let w: Vec<f64> = prior.iter().map(|t| model.likelihood(x, t)).collect();
    if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::NonFinite("likelihood weight".into()));
    }
    if w.iter().all(|&v| v == 0.0) {
        log::warn!("all likelihood weights are zero; the iterate cannot move");
    }
    Ok(w)
}

fn check_start(prior: &PriorSamples, u0: &[f64], step: f64) -> Result<()> {
    check_len("initial estimate", prior.dim(), u0.len())?;
    if !(step >= 0.0) || !step.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "step size must be nonnegative, got {step}"
        )));
    }
    Ok(())
}

/// Stochastic iteration Uₜ = Uₜ₋₁ − μₜ ∇ᵤC(Uₜ₋₁, θₜ) f(x|θₜ), cycling through
/// the prior samples in a fresh random order each sweep.
pub fn sgd_iterate(
    model: &dyn LikelihoodModel,
    prior: &PriorSamples,
    x: &[f64],
    cost: CostSpec,
    cfg: &SgdIterateConfig,
    u0: &[f64],
) -> Result<Vec<f64>> {
    check_start(prior, u0, cfg.step)?;
    let weights = raw_weights(model, prior, x)?;
    let n = prior.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = seeded(cfg.seed);
    let mut u = u0.to_vec();
    let mut grad = vec![0.0; u.len()];
    let mut t = 0usize;
    for _ in 0..cfg.sweeps {
        order.shuffle(&mut rng);
        for &i in &order {
            let step = match cfg.schedule {
                StepSchedule::Constant => cfg.step,
                StepSchedule::Decaying => cfg.step / (1.0 + t as f64 / n as f64),
            };
            t += 1;
            if weights[i] == 0.0 {
                continue;
            }
            cost.grad_u_into(&u, prior.get(i), &mut grad);
            for (uk, gk) in u.iter_mut().zip(&grad) {
                *uk -= step * gk * weights[i];
            }
            if u.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "stochastic iterate diverged at step {t}"
                )));
            }
        }
    }
    Ok(u)
}

/// Full-batch iteration Uₜ = Uₜ₋₁ − μ (1/n) Σᵢ ∇ᵤC(Uₜ₋₁, θᵢ) f(x|θᵢ), stopping
/// once ‖Uₜ − Uₜ₋₁‖ < `tolerance`.
#[allow(clippy::too_many_arguments)]
pub fn gd_iterate(
    model: &dyn LikelihoodModel,
    prior: &PriorSamples,
    x: &[f64],
    cost: CostSpec,
    step: f64,
    u0: &[f64],
    max_iters: usize,
    tolerance: f64,
) -> Result<Vec<f64>> {
    check_start(prior, u0, step)?;
    let weights = raw_weights(model, prior, x)?;
    let n = prior.len() as f64;
    let mut u = u0.to_vec();
    let mut grad = vec![0.0; u.len()];
    let mut total = vec![0.0; u.len()];
    for _ in 0..max_iters {
        total.iter_mut().for_each(|v| *v = 0.0);
        for (theta, w) in prior.iter().zip(&weights) {
            if *w == 0.0 {
                continue;
            }
            cost.grad_u_into(&u, theta, &mut grad);
            for (acc, g) in total.iter_mut().zip(&grad) {
                *acc += g * w;
            }
        }
        let mut moved = 0.0;
        for (uk, g) in u.iter_mut().zip(&total) {
            let delta = step * g / n;
            *uk -= delta;
            moved += delta * delta;
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gradient iterate diverged".into()));
        }
        if moved.sqrt() < tolerance {
            return Ok(u);
        }
    }
    Err(Error::NotConverged {
        iterations: max_iters,
        last: u,
    })
}
