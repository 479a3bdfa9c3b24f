//! Transformation-parameter estimation by kernel maximal correlation.
//!
//! Given observations {xᵢ} and latent samples split into two independent
//! halves {z¹ⱼ}, {z²ⱼ}, the estimate maximises
//!
//! ```text
//!     N₁(θ) N₂(θ) / D(θ)
//!     Nₗ(θ) = Σᵢ Σⱼ K(xᵢ, T(zˡⱼ, θ))
//!     D(θ)  = Σᵢ Σⱼ K(T(z¹ᵢ, θ), T(z²ⱼ, θ))
//! ```
//!
//! with K(x, y) = exp(−‖x − y‖² / h). The search runs on
//! log N₁ + log N₂ − log D, which has the same maximiser and stays finite
//! when the double sums span many orders of magnitude.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::optim::{
    gradient_ascent, grid_then_refine, nelder_mead_max, GradientAscentConfig, Maximum,
    NelderMeadConfig,
};
use crate::rng::seeded;
use crate::transforms::TransformSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    #[default]
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub bandwidth: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            kind: KernelKind::Gaussian,
            bandwidth: 1.0,
        }
    }
}

impl KernelConfig {
    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        let cfg = Self {
            kind: KernelKind::Gaussian,
            bandwidth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0) || !self.bandwidth.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "kernel bandwidth must be positive, got {}",
                self.bandwidth
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_len("kernel arguments", x.len(), y.len())?;
        Ok((-sq_dist(x, y) / self.bandwidth).exp())
    }
}

fn sq_dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Shuffles `z_data` with a seeded permutation and splits it into
/// `(first m1, remaining)`.
pub fn split_latent<T: Clone>(z_data: &[T], m1: usize, seed: u64) -> Result<(Vec<T>, Vec<T>)> {
    if m1 == 0 || m1 >= z_data.len() {
        return Err(Error::InvalidInput(format!(
            "split size m1 = {m1} must satisfy 1 <= m1 < {}",
            z_data.len()
        )));
    }
    let mut shuffled = z_data.to_vec();
    shuffled.shuffle(&mut seeded(seed));
    let second = shuffled.split_off(m1);
    Ok((shuffled, second))
}

#[derive(Debug, Clone)]
pub struct MaxCorrProblem {
    transform: TransformSpec,
    kernel: KernelConfig,
    x: Vec<f64>,
    z1: Vec<f64>,
    z2: Vec<f64>,
}

/// The three log double sums at one θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSums {
    pub log_n1: f64,
    pub log_n2: f64,
    pub log_d: f64,
}

impl LogSums {
    pub fn log_objective(&self) -> f64 {
        self.log_n1 + self.log_n2 - self.log_d
    }
}

fn flatten(rows: &[Vec<f64>], dim: usize, what: &'static str) -> Result<Vec<f64>> {
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{what} is empty")));
    }
    for r in rows {
        check_len(what, dim, r.len())?;
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(what.into()));
        }
    }
    Ok(rows.concat())
}

impl MaxCorrProblem {
    pub fn new(
        x_data: &[Vec<f64>],
        z_split_1: &[Vec<f64>],
        z_split_2: &[Vec<f64>],
        transform: TransformSpec,
        kernel: KernelConfig,
    ) -> Result<Self> {
        kernel.validate()?;
        Ok(Self {
            x: flatten(x_data, transform.output_dim(), "observation data")?,
            z1: flatten(z_split_1, transform.input_dim(), "first latent split")?,
            z2: flatten(z_split_2, transform.input_dim(), "second latent split")?,
            transform,
            kernel,
        })
    }

    /// Scalar convenience constructor for one-dimensional data.
    pub fn scalar(
        x: &[f64],
        z1: &[f64],
        z2: &[f64],
        transform: TransformSpec,
        kernel: KernelConfig,
    ) -> Result<Self> {
        let rows = |v: &[f64]| v.iter().map(|&a| vec![a]).collect::<Vec<_>>();
        Self::new(&rows(x), &rows(z1), &rows(z2), transform, kernel)
    }

    pub fn transform(&self) -> &TransformSpec {
        &self.transform
    }

    pub fn kernel(&self) -> &KernelConfig {
        &self.kernel
    }

    pub fn n(&self) -> usize {
        self.x.len() / self.transform.output_dim()
    }

    pub fn m1(&self) -> usize {
        self.z1.len() / self.transform.input_dim()
    }

    pub fn m2(&self) -> usize {
        self.z2.len() / self.transform.input_dim()
    }

    /// The same problem with the two latent splits exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            z1: self.z2.clone(),
            z2: self.z1.clone(),
            ..self.clone()
        }
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        check_len(
            "transform parameter",
            self.transform.param_dim(),
            theta.len(),
        )?;
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("parameter {theta:?}")));
        }
        Ok(())
    }

    fn map_latent(&self, z: &[f64], theta: &[f64]) -> Vec<f64> {
        let (din, dout) = (self.transform.input_dim(), self.transform.output_dim());
        let mut out = vec![0.0; z.len() / din * dout];
        for (zi, oi) in z.chunks_exact(din).zip(out.chunks_exact_mut(dout)) {
            self.transform.apply_into(zi, theta, oi);
        }
        out
    }

    /// log Σᵢ Σⱼ exp(−‖aᵢ − bⱼ‖²/h), falling back to a shifted sum on underflow.
    fn log_cross_sum(&self, a: &[f64], b: &[f64]) -> f64 {
        let dim = self.transform.output_dim();
        let h = self.kernel.bandwidth;
        let mut total = 0.0;
        for ai in a.chunks_exact(dim) {
            for bj in b.chunks_exact(dim) {
                total += (-sq_dist(ai, bj) / h).exp();
            }
        }
        if total > f64::MIN_POSITIVE {
            return total.ln();
        }
        let min = a
            .chunks_exact(dim)
            .flat_map(|ai| b.chunks_exact(dim).map(move |bj| sq_dist(ai, bj)))
            .fold(f64::INFINITY, f64::min);
        let shifted: f64 = a
            .chunks_exact(dim)
            .flat_map(|ai| b.chunks_exact(dim).map(move |bj| sq_dist(ai, bj)))
            .map(|d| (-(d - min) / h).exp())
            .sum();
        shifted.ln() - min / h
    }

    pub fn log_sums(&self, theta: &[f64]) -> Result<LogSums> {
        self.check_theta(theta)?;
        let t1 = self.map_latent(&self.z1, theta);
        let t2 = self.map_latent(&self.z2, theta);
        Ok(LogSums {
            log_n1: self.log_cross_sum(&self.x, &t1),
            log_n2: self.log_cross_sum(&self.x, &t2),
            log_d: self.log_cross_sum(&t1, &t2),
        })
    }

    pub fn log_objective(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.log_sums(theta)?.log_objective())
    }

    /// The ratio N₁(θ) N₂(θ) / D(θ).
    pub fn objective(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.log_objective(theta)?.exp())
    }

    /// ∇θ of the log objective.
    pub fn log_objective_gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        let t1 = self.map_latent(&self.z1, theta);
        let t2 = self.map_latent(&self.z2, theta);
        let g1 = self.numerator_log_gradient(&self.z1, &t1);
        let g2 = self.numerator_log_gradient(&self.z2, &t2);
        let gd = self.denominator_log_gradient(&t1, &t2);
        Ok(g1
            .iter()
            .zip(&g2)
            .zip(&gd)
            .map(|((a, b), c)| a + b - c)
            .collect())
    }

    /// ∇θ of the ratio, via the quotient rule on the three double sums.
    pub fn objective_gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        let value = self.objective(theta)?;
        Ok(self
            .log_objective_gradient(theta)?
            .into_iter()
            .map(|g| value * g)
            .collect())
    }

    fn min_sq_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let dim = self.transform.output_dim();
        a.chunks_exact(dim)
            .flat_map(|ai| b.chunks_exact(dim).map(move |bj| sq_dist(ai, bj)))
            .fold(f64::INFINITY, f64::min)
    }

    /// ∇θ log Nₗ = (1/Nₗ) Σⱼ J(zⱼ)ᵀ Σᵢ K(xᵢ, tⱼ) (2/h)(xᵢ − tⱼ).
    fn numerator_log_gradient(&self, z: &[f64], t: &[f64]) -> Vec<f64> {
        let (din, dout) = (self.transform.input_dim(), self.transform.output_dim());
        let h = self.kernel.bandwidth;
        let shift = self.min_sq_dist(&self.x, t);
        let mut grad = vec![0.0; self.transform.param_dim()];
        let mut total = 0.0;
        let mut v = vec![0.0; dout];
        for (zj, tj) in z.chunks_exact(din).zip(t.chunks_exact(dout)) {
            v.iter_mut().for_each(|e| *e = 0.0);
            for xi in self.x.chunks_exact(dout) {
                let k = (-(sq_dist(xi, tj) - shift) / h).exp();
                total += k;
                for ((e, a), b) in v.iter_mut().zip(xi).zip(tj) {
                    *e += k * (a - b);
                }
            }
            self.transform.accumulate_jt_vec(zj, &v, 2.0 / h, &mut grad);
        }
        grad.iter_mut().for_each(|g| *g /= total);
        grad
    }

    /// ∇θ log D, differentiating through both transformed splits.
    fn denominator_log_gradient(&self, t1: &[f64], t2: &[f64]) -> Vec<f64> {
        let (din, dout) = (self.transform.input_dim(), self.transform.output_dim());
        let h = self.kernel.bandwidth;
        let shift = self.min_sq_dist(t1, t2);
        let mut grad = vec![0.0; self.transform.param_dim()];
        let mut total = 0.0;
        let mut v1 = vec![0.0; dout];
        let mut v2_all = vec![0.0; t2.len()];
        for (zi, ti) in self.z1.chunks_exact(din).zip(t1.chunks_exact(dout)) {
            v1.iter_mut().for_each(|e| *e = 0.0);
            for (tj, v2) in t2.chunks_exact(dout).zip(v2_all.chunks_exact_mut(dout)) {
                let k = (-(sq_dist(ti, tj) - shift) / h).exp();
                total += k;
                for (((e1, e2), a), b) in v1.iter_mut().zip(v2.iter_mut()).zip(ti).zip(tj) {
                    let d = k * (a - b);
                    *e1 -= d;
                    *e2 += d;
                }
            }
            self.transform
                .accumulate_jt_vec(zi, &v1, 2.0 / h, &mut grad);
        }
        for (zj, v2) in self.z2.chunks_exact(din).zip(v2_all.chunks_exact(dout)) {
            self.transform.accumulate_jt_vec(zj, v2, 2.0 / h, &mut grad);
        }
        grad.iter_mut().for_each(|g| *g /= total);
        grad
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerMethod {
    GradientAscent,
    NelderMead,
    GridThenRefine,
}

impl FromStr for OptimizerMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gradient" | "gradient-ascent" => Ok(OptimizerMethod::GradientAscent),
            "nelder-mead" | "simplex" => Ok(OptimizerMethod::NelderMead),
            "grid" | "grid-then-refine" => Ok(OptimizerMethod::GridThenRefine),
            other => Err(Error::InvalidConfig(format!(
                "unknown optimizer {other:?} (expected gradient-ascent, nelder-mead or grid)"
            ))),
        }
    }
}

impl fmt::Display for OptimizerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OptimizerMethod::GradientAscent => "gradient-ascent",
            OptimizerMethod::NelderMead => "nelder-mead",
            OptimizerMethod::GridThenRefine => "grid-then-refine",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: OptimizerMethod,
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial simplex edge or gradient step.
    pub step: f64,
    pub tolerance: f64,
    pub seed: u64,
    /// Per-coordinate interval for starting points (and the grid); a single
    /// interval applies to every coordinate.
    pub init_box: Vec<(f64, f64)>,
    pub grid_points: usize,
}

impl OptimizerConfig {
    /// Grid search then golden-section refinement for scalar θ, Nelder–Mead
    /// with five restarts otherwise; starts drawn from [−10, 10].
    pub fn default_for(param_dim: usize) -> Self {
        let method = if param_dim == 1 {
            OptimizerMethod::GridThenRefine
        } else {
            OptimizerMethod::NelderMead
        };
        Self {
            method,
            restarts: if param_dim == 1 { 1 } else { 5 },
            max_iters: 2_000,
            step: 1.0,
            tolerance: 1e-8,
            seed: 0,
            init_box: vec![(-10.0, 10.0)],
            grid_points: 201,
        }
    }

    fn bounds(&self, k: usize) -> (f64, f64) {
        if self.init_box.len() == 1 {
            self.init_box[0]
        } else {
            self.init_box[k]
        }
    }

    fn validate(&self, param_dim: usize) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.init_box.is_empty()
            || (self.init_box.len() != 1 && self.init_box.len() != param_dim)
        {
            return Err(Error::InvalidConfig(format!(
                "init_box needs 1 or {param_dim} intervals, got {}",
                self.init_box.len()
            )));
        }
        if self
            .init_box
            .iter()
            .any(|(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite())
        {
            return Err(Error::InvalidConfig(
                "init_box intervals must be finite with lo < hi".into(),
            ));
        }
        if self.method == OptimizerMethod::GridThenRefine && param_dim != 1 {
            return Err(Error::InvalidConfig(
                "grid-then-refine only supports scalar parameters".into(),
            ));
        }
        if !(self.tolerance > 0.0) || !(self.step > 0.0) {
            return Err(Error::InvalidConfig(
                "step and tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartDiagnostics {
    pub start: Vec<f64>,
    pub theta: Vec<f64>,
    pub log_objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxCorrEstimate {
    pub theta: Vec<f64>,
    /// N₁N₂/D at the estimate.
    pub objective: f64,
    pub log_objective: f64,
    pub restarts: Vec<RestartDiagnostics>,
}

/// Maximises the objective and returns the best θ over all restarts.
pub fn estimate(problem: &MaxCorrProblem, opt: &OptimizerConfig) -> Result<MaxCorrEstimate> {
    let p = problem.transform().param_dim();
    opt.validate(p)?;
    let f = |theta: &[f64]| problem.log_objective(theta).unwrap_or(f64::NEG_INFINITY);

    let mut diagnostics = Vec::with_capacity(opt.restarts);
    match opt.method {
        OptimizerMethod::GridThenRefine => {
            let (lo, hi) = opt.bounds(0);
            let m = grid_then_refine(
                |t| f(&[t]),
                lo,
                hi,
                opt.grid_points,
                opt.tolerance,
                opt.max_iters,
            );
            diagnostics.push(diag(vec![0.5 * (lo + hi)], m));
        }
        OptimizerMethod::NelderMead | OptimizerMethod::GradientAscent => {
            let mut rng = seeded(opt.seed);
            for _ in 0..opt.restarts {
                let start: Vec<f64> = (0..p)
                    .map(|k| {
                        let (lo, hi) = opt.bounds(k);
                        rng.gen_range(lo..hi)
                    })
                    .collect();
                let m = if opt.method == OptimizerMethod::NelderMead {
                    let cfg = NelderMeadConfig {
                        initial_step: opt.step,
                        max_iters: opt.max_iters,
                        tolerance: opt.tolerance,
                    };
                    nelder_mead_max(f, &start, &cfg)
                } else {
                    let cfg = GradientAscentConfig {
                        initial_step: opt.step,
                        max_iters: opt.max_iters,
                        tolerance: opt.tolerance,
                    };
                    let fg = |theta: &[f64]| match problem.log_objective_gradient(theta) {
                        Ok(g) => (f(theta), g),
                        Err(_) => (f64::NEG_INFINITY, vec![0.0; theta.len()]),
                    };
                    gradient_ascent(fg, &start, &cfg)
                };
                diagnostics.push(diag(start, m));
            }
        }
    }

    let best = diagnostics
        .iter()
        .filter(|d| d.log_objective.is_finite())
        .max_by(|a, b| a.log_objective.total_cmp(&b.log_objective))
        .cloned();
    match best {
        Some(b) => Ok(MaxCorrEstimate {
            objective: b.log_objective.exp(),
            log_objective: b.log_objective,
            theta: b.theta,
            restarts: diagnostics,
        }),
        None => Err(Error::OptimizerFailed {
            restarts: diagnostics.len(),
            reason: format!("no restart reached a finite objective: {diagnostics:?}"),
        }),
    }
}

fn diag(start: Vec<f64>, m: Maximum) -> RestartDiagnostics {
    RestartDiagnostics {
        start,
        theta: m.x,
        log_objective: m.value,
        iterations: m.iterations,
        converged: m.converged,
    }
}
