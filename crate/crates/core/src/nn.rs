//! Feedforward neural estimator u(x, α) trained on (x, θ) pairs.
//!
//! The parameter vector α is flat. For each layer, in order, it holds the
//! weights row-major with shape `(fan_out, fan_in)` followed by the
//! `fan_out` biases. Hidden layers use the configured activation; the output
//! layer is the identity so the estimator can take any real value.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costs::CostSpec;
use crate::error::{check_len, Error, Result};
use crate::rng::{derive_stream, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

impl FromStr for Activation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            other => Err(Error::InvalidConfig(format!(
                "unknown activation {other:?} (expected relu or tanh)"
            ))),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuralEstimator {
    layer_sizes: Vec<usize>,
    hidden: Activation,
    alpha: Vec<f64>,
}

fn param_count_for(layer_sizes: &[usize]) -> usize {
    layer_sizes.windows(2).map(|w| (w[0] + 1) * w[1]).sum()
}

fn validate_layers(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::InvalidConfig(
            "a network needs at least an input and an output layer".into(),
        ));
    }
    if layer_sizes.contains(&0) {
        return Err(Error::InvalidConfig("layer sizes must be positive".into()));
    }
    Ok(())
}

impl NeuralEstimator {
    /// All-zero weights and biases.
    pub fn zeros(layer_sizes: Vec<usize>, hidden: Activation) -> Result<Self> {
        validate_layers(&layer_sizes)?;
        let alpha = vec![0.0; param_count_for(&layer_sizes)];
        Ok(Self {
            layer_sizes,
            hidden,
            alpha,
        })
    }

    /// Weights uniform in ±sqrt(6 / (fan_in + fan_out)), biases zero.
    pub fn init(layer_sizes: Vec<usize>, hidden: Activation, seed: u64) -> Result<Self> {
        let mut net = Self::zeros(layer_sizes, hidden)?;
        let mut rng = seeded(seed);
        let mut offset = 0;
        for w in net.layer_sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            for v in &mut net.alpha[offset..offset + fan_in * fan_out] {
                *v = rng.gen_range(-limit..=limit);
            }
            offset += (fan_in + 1) * fan_out;
        }
        Ok(net)
    }

    pub fn from_parts(
        layer_sizes: Vec<usize>,
        hidden: Activation,
        alpha: Vec<f64>,
    ) -> Result<Self> {
        validate_layers(&layer_sizes)?;
        check_len(
            "network parameters",
            param_count_for(&layer_sizes),
            alpha.len(),
        )?;
        if alpha.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("network parameters".into()));
        }
        Ok(Self {
            layer_sizes,
            hidden,
            alpha,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn hidden_activation(&self) -> Activation {
        self.hidden
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn param_count(&self) -> usize {
        self.alpha.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().expect("validated nonempty")
    }

    fn layers(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.layer_sizes.windows(2).scan(0usize, |offset, w| {
            let start = *offset;
            *offset += (w[0] + 1) * w[1];
            Some((start, w[0], w[1]))
        })
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("network input", self.input_dim(), x.len())?;
        let trace = self.forward_trace(x);
        Ok(trace
            .activations
            .last()
            .expect("at least one layer")
            .clone())
    }

    fn forward_trace(&self, x: &[f64]) -> Trace {
        let depth = self.layer_sizes.len() - 1;
        let mut pre = Vec::with_capacity(depth);
        let mut activations = Vec::with_capacity(depth + 1);
        activations.push(x.to_vec());
        for (l, (start, fan_in, fan_out)) in self.layers().enumerate() {
            let weights = &self.alpha[start..start + fan_in * fan_out];
            let biases = &self.alpha[start + fan_in * fan_out..start + (fan_in + 1) * fan_out];
            let input = &activations[l];
            let z: Vec<f64> = weights
                .chunks_exact(fan_in)
                .zip(biases)
                .map(|(row, b)| row.iter().zip(input).map(|(w, a)| w * a).sum::<f64>() + b)
                .collect();
            let a = if l + 1 == depth {
                z.clone()
            } else {
                z.iter().map(|&v| self.hidden.apply(v)).collect()
            };
            pre.push(z);
            activations.push(a);
        }
        Trace { pre, activations }
    }

    /// ∇_α C(u(x, α), θ) by backpropagation, i.e. [J_α u]ᵀ ∇ᵤC.
    pub fn grad_alpha(&self, cost: CostSpec, x: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
        check_len("network input", self.input_dim(), x.len())?;
        check_len("network target", self.output_dim(), theta.len())?;
        let mut grad = vec![0.0; self.alpha.len()];
        self.accumulate_grad(cost, x, theta, 1.0, &mut grad);
        Ok(grad)
    }

    /// Adds `scale · ∇_α C` into `grad` and returns the cost at the current α.
    fn accumulate_grad(
        &self,
        cost: CostSpec,
        x: &[f64],
        theta: &[f64],
        scale: f64,
        grad: &mut [f64],
    ) -> f64 {
        let trace = self.forward_trace(x);
        let output = trace.activations.last().expect("at least one layer");
        let loss = cost.cost_unchecked(output, theta);
        let mut delta = vec![0.0; output.len()];
        cost.grad_u_into(output, theta, &mut delta);

        let layers: Vec<_> = self.layers().collect();
        for (l, &(start, fan_in, fan_out)) in layers.iter().enumerate().rev() {
            let input = &trace.activations[l];
            let (w_grad, rest) =
                grad[start..start + (fan_in + 1) * fan_out].split_at_mut(fan_in * fan_out);
            for (o, d) in delta.iter().enumerate() {
                let row = &mut w_grad[o * fan_in..(o + 1) * fan_in];
                for (g, a) in row.iter_mut().zip(input) {
                    *g += scale * d * a;
                }
                rest[o] += scale * d;
            }
            if l == 0 {
                break;
            }
            let weights = &self.alpha[start..start + fan_in * fan_out];
            let mut prev = vec![0.0; fan_in];
            for (o, d) in delta.iter().enumerate() {
                for (p, w) in prev.iter_mut().zip(&weights[o * fan_in..(o + 1) * fan_in]) {
                    *p += w * d;
                }
            }
            for (i, p) in prev.iter_mut().enumerate() {
                *p *= self
                    .hidden
                    .derivative(trace.pre[l - 1][i], trace.activations[l][i]);
            }
            delta = prev;
        }
        loss
    }

    /// One stochastic step α ← α − μ ∇_α C(u(x, α), θ) on a single pair.
    pub fn sgd_step(
        &mut self,
        cfg: &TrainConfig,
        cost: CostSpec,
        x: &[f64],
        theta: &[f64],
    ) -> Result<()> {
        let grad = self.grad_alpha(cost, x, theta)?;
        self.descend(cfg.learning_rate, &grad)
    }

    fn descend(&mut self, learning_rate: f64, grad: &[f64]) -> Result<()> {
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!(
                "gradient component {i} is {} during training",
                grad[i]
            )));
        }
        for (a, g) in self.alpha.iter_mut().zip(grad) {
            *a -= learning_rate * g;
        }
        Ok(())
    }

    /// Mean cost over the dataset.
    pub fn mean_cost(&self, cost: CostSpec, data: &PairedDataset) -> Result<f64> {
        self.check_dataset(data)?;
        let total: f64 = data
            .pairs()
            .map(|(x, t)| {
                let trace = self.forward_trace(x);
                cost.cost_unchecked(trace.activations.last().expect("output"), t)
            })
            .sum();
        Ok(total / data.len() as f64)
    }

    fn check_dataset(&self, data: &PairedDataset) -> Result<()> {
        check_len("dataset input width", self.input_dim(), data.x_dim())?;
        check_len("dataset target width", self.output_dim(), data.theta_dim())
    }

    pub fn to_model_file(&self) -> ModelFile {
        ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: 1,
            layer_sizes: self.layer_sizes.clone(),
            hidden_activation: self.hidden,
            output_activation: "identity".to_string(),
            alpha: self.alpha.clone(),
        }
    }

    pub fn from_model_file(file: ModelFile) -> Result<Self> {
        if file.format != MODEL_FORMAT {
            return Err(Error::InvalidInput(format!(
                "not a model file (format {:?})",
                file.format
            )));
        }
        if file.output_activation != "identity" {
            return Err(Error::InvalidInput(format!(
                "unsupported output activation {:?}",
                file.output_activation
            )));
        }
        Self::from_parts(file.layer_sizes, file.hidden_activation, file.alpha)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_model_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_model_file(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

struct Trace {
    pre: Vec<Vec<f64>>,
    activations: Vec<Vec<f64>>,
}

const MODEL_FORMAT: &str = "ddest-neural-estimator";

/// On-disk model document. Floats are written in shortest round-trip form,
/// so loading restores α bit for bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub layer_sizes: Vec<usize>,
    pub hidden_activation: Activation,
    pub output_activation: String,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedDataset {
    x_dim: usize,
    theta_dim: usize,
    xs: Vec<f64>,
    thetas: Vec<f64>,
}

impl PairedDataset {
    pub fn new(xs: Vec<Vec<f64>>, thetas: Vec<Vec<f64>>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::InvalidInput("paired dataset is empty".into()));
        }
        check_len("paired dataset length", xs.len(), thetas.len())?;
        let x_dim = xs[0].len();
        let theta_dim = thetas[0].len();
        if x_dim == 0 || theta_dim == 0 {
            return Err(Error::InvalidInput(
                "paired dataset rows must be nonempty".into(),
            ));
        }
        for (x, t) in xs.iter().zip(&thetas) {
            check_len("paired dataset x width", x_dim, x.len())?;
            check_len("paired dataset theta width", theta_dim, t.len())?;
        }
        Ok(Self {
            x_dim,
            theta_dim,
            xs: xs.concat(),
            thetas: thetas.concat(),
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len() / self.x_dim
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn x_dim(&self) -> usize {
        self.x_dim
    }

    pub fn theta_dim(&self) -> usize {
        self.theta_dim
    }

    pub fn pair(&self, i: usize) -> (&[f64], &[f64]) {
        (
            &self.xs[i * self.x_dim..(i + 1) * self.x_dim],
            &self.thetas[i * self.theta_dim..(i + 1) * self.theta_dim],
        )
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&[f64], &[f64])> {
        self.xs
            .chunks_exact(self.x_dim)
            .zip(self.thetas.chunks_exact(self.theta_dim))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchMode {
    /// One pair per update.
    Stochastic,
    /// One update per epoch using the mean gradient over all pairs.
    FullGradient,
}

impl FromStr for BatchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stochastic" | "sgd" => Ok(BatchMode::Stochastic),
            "full" | "full-gradient" | "full_gradient" | "gd" => Ok(BatchMode::FullGradient),
            other => Err(Error::InvalidConfig(format!(
                "unknown batch mode {other:?} (expected stochastic or full)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub batch_mode: BatchMode,
    pub shuffle_each_epoch: bool,
    pub seed: u64,
    /// Stop once the relative change in epoch loss falls to this level.
    pub early_stop_tolerance: f64,
    pub cost: CostSpec,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            max_epochs: 50,
            batch_mode: BatchMode::Stochastic,
            shuffle_each_epoch: true,
            seed: 0,
            early_stop_tolerance: 1e-8,
            cost: CostSpec::SquaredError,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.early_stop_tolerance >= 0.0) {
            return Err(Error::InvalidConfig(
                "early-stop tolerance must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub net: NeuralEstimator,
    /// Mean cost over the dataset: the initial value, then one entry per epoch.
    pub loss_trace: Vec<f64>,
    pub epochs_run: usize,
    pub stopped_early: bool,
}

impl TrainOutcome {
    pub fn final_loss(&self) -> f64 {
        *self
            .loss_trace
            .last()
            .expect("trace holds the initial loss")
    }
}

/// Trains `net` by stochastic or full-batch gradient descent.
///
/// Aborts with [`Error::Diverged`] if an epoch loss exceeds ten times the
/// initial loss, or if the parameters blow up to non-finite values within an
/// epoch. Zero epochs returns the network unchanged.
pub fn train(
    mut net: NeuralEstimator,
    cfg: &TrainConfig,
    data: &PairedDataset,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    net.check_dataset(data)?;
    let initial = net.mean_cost(cfg.cost, data)?;
    if !initial.is_finite() {
        return Err(Error::NonFinite("initial training loss".into()));
    }
    let mut trace = vec![initial];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut rng = seeded(cfg.seed);
    let mut grad = vec![0.0; net.param_count()];
    let mut stopped_early = false;
    let mut epochs_run = 0;

    for epoch in 1..=cfg.max_epochs {
        let blown_up = |_| Error::Diverged {
            epoch,
            loss: f64::INFINITY,
            initial,
        };
        match cfg.batch_mode {
            BatchMode::Stochastic => {
                if cfg.shuffle_each_epoch {
                    order.shuffle(&mut rng);
                }
                for &i in &order {
                    let (x, t) = data.pair(i);
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    net.accumulate_grad(cfg.cost, x, t, 1.0, &mut grad);
                    net.descend(cfg.learning_rate, &grad).map_err(blown_up)?;
                }
            }
            BatchMode::FullGradient => {
                grad.iter_mut().for_each(|g| *g = 0.0);
                let scale = 1.0 / data.len() as f64;
                for (x, t) in data.pairs() {
                    net.accumulate_grad(cfg.cost, x, t, scale, &mut grad);
                }
                net.descend(cfg.learning_rate, &grad).map_err(blown_up)?;
            }
        }
        epochs_run = epoch;
        let loss = net.mean_cost(cfg.cost, data)?;
        if !loss.is_finite() || (initial > 0.0 && loss > 10.0 * initial) {
            return Err(Error::Diverged {
                epoch,
                loss,
                initial,
            });
        }
        let prev = *trace.last().expect("nonempty");
        trace.push(loss);
        if (prev - loss).abs() <= cfg.early_stop_tolerance * prev.abs() {
            stopped_early = true;
            break;
        }
    }
    Ok(TrainOutcome {
        net,
        loss_trace: trace,
        epochs_run,
        stopped_early,
    })
}

/// Independent restarts from seeded initializations; returns the run with
/// the lowest final loss. Restarts whose training fails are skipped.
pub fn train_with_restarts(
    layer_sizes: &[usize],
    hidden: Activation,
    cfg: &TrainConfig,
    data: &PairedDataset,
    restarts: usize,
) -> Result<TrainOutcome> {
    if restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be at least 1".into()));
    }
    let outcomes: Vec<Result<TrainOutcome>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let init_seed = rand::RngCore::next_u64(&mut derive_stream(cfg.seed, &[r as u64, 0]));
            let train_seed = rand::RngCore::next_u64(&mut derive_stream(cfg.seed, &[r as u64, 1]));
            let net = NeuralEstimator::init(layer_sizes.to_vec(), hidden, init_seed)?;
            let run_cfg = TrainConfig {
                seed: train_seed,
                ..cfg.clone()
            };
            train(net, &run_cfg, data)
        })
        .collect();
    let mut best: Option<TrainOutcome> = None;
    let mut last_err = None;
    for outcome in outcomes {
        match outcome {
            Ok(o) => {
                if best
                    .as_ref()
                    .is_none_or(|b| o.final_loss() < b.final_loss())
                {
                    best = Some(o);
                }
            }
            Err(e) => {
                log::warn!("training restart failed: {e}");
                last_err = Some(e);
            }
        }
    }
    best.ok_or_else(|| last_err.expect("at least one restart ran"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn linear(weight: f64, bias: f64) -> NeuralEstimator {
        NeuralEstimator::from_parts(vec![1, 1], Activation::Tanh, vec![weight, bias]).unwrap()
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = NeuralEstimator::zeros(vec![3, 5, 2], Activation::Relu).unwrap();
        assert_eq!(net.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(net.param_count(), 4 * 5 + 6 * 2);
    }

    #[test]
    fn single_linear_layer() {
        assert_eq!(linear(0.5, 0.0).forward(&[2.0]).unwrap(), vec![1.0]);
    }

    #[test]
    fn forward_is_deterministic_and_checks_dims() {
        let net = NeuralEstimator::init(vec![2, 4, 1], Activation::Tanh, 3).unwrap();
        assert_eq!(
            net.forward(&[0.3, 0.1]).unwrap(),
            net.forward(&[0.3, 0.1]).unwrap()
        );
        assert!(net.forward(&[0.3]).is_err());
        assert!(net
            .grad_alpha(CostSpec::SquaredError, &[0.3, 0.1], &[1.0, 2.0])
            .is_err());
    }

    #[test]
    fn init_respects_bounds_and_seed() {
        let a = NeuralEstimator::init(vec![1, 32, 1], Activation::Tanh, 9).unwrap();
        let b = NeuralEstimator::init(vec![1, 32, 1], Activation::Tanh, 9).unwrap();
        assert_eq!(a, b);
        let limit = (6.0f64 / 33.0).sqrt();
        assert!(a.alpha()[..32].iter().all(|w| w.abs() <= limit));
        assert!(a.alpha()[32..64].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn hand_computed_gradient() {
        let net = linear(1.0, 0.0);
        let g = net
            .grad_alpha(CostSpec::SquaredError, &[1.0], &[0.0])
            .unwrap();
        assert_eq!(g, vec![2.0, 2.0]);
    }

    #[test]
    fn gradient_vanishes_at_target() {
        let net = NeuralEstimator::init(vec![2, 6, 6, 2], Activation::Tanh, 1).unwrap();
        let x = [0.4, -1.2];
        let u = net.forward(&x).unwrap();
        let g = net.grad_alpha(CostSpec::SquaredError, &x, &u).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sgd_step_examples() {
        let cfg = TrainConfig {
            learning_rate: 0.1,
            ..TrainConfig::default()
        };
        let mut net = linear(1.0, 0.0);
        net.sgd_step(&cfg, CostSpec::SquaredError, &[1.0], &[0.0])
            .unwrap();
        assert!((net.alpha()[0] - 0.8).abs() < 1e-15);
        assert!((net.alpha()[1] + 0.2).abs() < 1e-15);

        let mut still = linear(1.0, 0.0);
        still
            .sgd_step(&cfg, CostSpec::SquaredError, &[2.0], &[2.0])
            .unwrap();
        assert_eq!(still.alpha(), &[1.0, 0.0]);
    }

    #[test]
    fn non_finite_gradient_is_reported() {
        let mut net = linear(1e300, 0.0);
        let cfg = TrainConfig::default();
        let err = net
            .sgd_step(&cfg, CostSpec::SquaredError, &[1e10], &[0.0])
            .unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)), "{err}");
    }

    #[test]
    fn zero_learning_rate_is_rejected_by_training() {
        let data = PairedDataset::new(vec![vec![1.0]], vec![vec![1.0]]).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.0,
            ..TrainConfig::default()
        };
        assert!(train(linear(1.0, 0.0), &cfg, &data).is_err());
    }

    #[test]
    fn already_optimal_network_is_untouched() {
        let net = NeuralEstimator::init(vec![2, 4, 1], Activation::Tanh, 5).unwrap();
        let xs: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![i as f64 * 0.1, 1.0 - i as f64 * 0.05])
            .collect();
        let thetas: Vec<Vec<f64>> = xs.iter().map(|x| net.forward(x).unwrap()).collect();
        let data = PairedDataset::new(xs, thetas).unwrap();
        let cfg = TrainConfig {
            batch_mode: BatchMode::FullGradient,
            max_epochs: 10,
            ..TrainConfig::default()
        };
        let out = train(net.clone(), &cfg, &data).unwrap();
        assert!(out.loss_trace.iter().all(|&l| l == 0.0));
        assert_eq!(out.net.alpha(), net.alpha());
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let net = NeuralEstimator::init(vec![1, 3, 1], Activation::Relu, 2).unwrap();
        let data =
            PairedDataset::new(vec![vec![1.0], vec![2.0]], vec![vec![0.0], vec![1.0]]).unwrap();
        let cfg = TrainConfig {
            max_epochs: 0,
            ..TrainConfig::default()
        };
        let out = train(net.clone(), &cfg, &data).unwrap();
        assert_eq!(out.net, net);
        assert_eq!(out.loss_trace.len(), 1);
    }

    fn regression_toy() -> (PairedDataset, f64, f64) {
        let mut rng = seeded(21);
        let xs: Vec<f64> = (0..200).map(|i| -2.0 + 4.0 * i as f64 / 199.0).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| {
                0.7 * x - 0.3
                    + 0.2 * {
                        let e: f64 = StandardNormal.sample(&mut rng);
                        e
                    }
            })
            .collect();
        // Normal equations.
        let n = xs.len() as f64;
        let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;
        let data = PairedDataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            ys.iter().map(|&y| vec![y]).collect(),
        )
        .unwrap();
        (data, slope, intercept)
    }

    #[test]
    fn full_gradient_reaches_least_squares() {
        let (data, slope, intercept) = regression_toy();
        let cfg = TrainConfig {
            learning_rate: 0.1,
            max_epochs: 5_000,
            batch_mode: BatchMode::FullGradient,
            early_stop_tolerance: 0.0,
            ..TrainConfig::default()
        };
        let out = train(linear(0.0, 0.0), &cfg, &data).unwrap();
        assert!((out.net.alpha()[0] - slope).abs() < 1e-4);
        assert!((out.net.alpha()[1] - intercept).abs() < 1e-4);
        for w in out.loss_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-15, "loss increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn stochastic_training_is_reproducible() {
        let (data, _, _) = regression_toy();
        let cfg = TrainConfig {
            max_epochs: 5,
            seed: 77,
            ..TrainConfig::default()
        };
        let net = NeuralEstimator::init(vec![1, 8, 1], Activation::Tanh, 4).unwrap();
        let a = train(net.clone(), &cfg, &data).unwrap();
        let b = train(net, &cfg, &data).unwrap();
        assert_eq!(a.net.alpha(), b.net.alpha());
        assert_eq!(a.loss_trace, b.loss_trace);
    }

    #[test]
    fn divergence_is_detected() {
        let (data, _, _) = regression_toy();
        let cfg = TrainConfig {
            learning_rate: 5.0,
            max_epochs: 50,
            batch_mode: BatchMode::FullGradient,
            ..TrainConfig::default()
        };
        let err = train(linear(0.0, 0.0), &cfg, &data).unwrap_err();
        assert!(matches!(err, Error::Diverged { .. }), "{err}");
    }

    #[test]
    fn restarts_pick_the_best_run() {
        let (data, _, _) = regression_toy();
        let cfg = TrainConfig {
            max_epochs: 3,
            seed: 1,
            ..TrainConfig::default()
        };
        let best = train_with_restarts(&[1, 4, 1], Activation::Tanh, &cfg, &data, 3).unwrap();
        let again = train_with_restarts(&[1, 4, 1], Activation::Tanh, &cfg, &data, 3).unwrap();
        assert_eq!(best.net, again.net);
        assert!(train_with_restarts(&[1, 4, 1], Activation::Tanh, &cfg, &data, 0).is_err());
    }

    #[test]
    fn model_json_round_trip_is_exact() {
        let net = NeuralEstimator::init(vec![2, 7, 3], Activation::Relu, 12).unwrap();
        let back = NeuralEstimator::from_json(&net.to_json().unwrap()).unwrap();
        assert_eq!(net, back);
        let mut file = net.to_model_file();
        file.alpha.pop();
        assert!(NeuralEstimator::from_model_file(file).is_err());
    }

    #[test]
    fn dataset_validation() {
        assert!(PairedDataset::new(vec![], vec![]).is_err());
        assert!(
            PairedDataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![vec![0.0], vec![0.0]])
                .is_err()
        );
        assert!(PairedDataset::new(vec![vec![1.0]], vec![vec![0.0], vec![1.0]]).is_err());
    }
}
