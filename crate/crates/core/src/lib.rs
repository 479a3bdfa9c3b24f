//! Data-driven parameter estimation.
//!
//! Estimators for a parameter θ that links an observed sample `x` to a latent
//! sample `z` through a known transform `x = T(z, θ)`:
//!
//! * [`maxcorr`]: maximal-correlation estimation from unpaired samples via a
//!   kernel correlation ratio;
//! * [`nn`]: a neural estimator trained on paired `(x, θ)` data;
//! * [`likelihood`]: posterior-mean and posterior-median estimates from prior
//!   samples and a known likelihood;
//! * [`baselines`]: MLE, moment matching and Huber location estimators.
//!
//! [`bench`] runs the Monte Carlo comparison of these estimators.

// `!(x > 0.0)` is used deliberately so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod costs;
pub mod distributions;
pub mod error;
pub mod ext;
pub mod io;
pub mod likelihood;
pub mod maxcorr;
pub mod nn;
pub mod optim;
pub mod rng;
pub mod transforms;

pub use costs::CostSpec;
pub use distributions::{crlb, DistributionSpec, Family};
pub use error::{Error, Result};
pub use ext::ExtReal;
pub use maxcorr::{
    KernelConfig, MaxCorrEstimate, MaxCorrProblem, OptimizerConfig, OptimizerMethod,
};
pub use nn::{NeuralEstimator, PairedDataset, TrainConfig};
pub use transforms::{TransformKind, TransformSpec};
