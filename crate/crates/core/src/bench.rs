//! Monte Carlo harness for the scalar translation experiment: error power
//! E[(θ̂ − θ)²] of each estimator under each base density.
//!
//! Each trial draws its data from a stream keyed by (seed, family, trial), so
//! every estimator sees the same datasets in a given trial. Estimator-internal
//! randomness (the latent split) comes from a separate stream keyed by
//! (seed, family, estimator, trial). Per-trial results are reduced in trial
//! order, so the report does not depend on the number of workers.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{huber_translation, mle_translation, moment_matching, HuberConfig};
use crate::distributions::{crlb, DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::maxcorr::{estimate, split_latent, KernelConfig, MaxCorrProblem, OptimizerConfig};
use crate::rng::derive_stream;
use crate::transforms::TransformSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Mle,
    MomentMatching,
    Huber,
    MaxCorr,
}

impl Estimator {
    pub const ALL: [Estimator; 4] = [
        Estimator::Mle,
        Estimator::MomentMatching,
        Estimator::Huber,
        Estimator::MaxCorr,
    ];

    pub fn title(self) -> &'static str {
        match self {
            Estimator::Mle => "MLE",
            Estimator::MomentMatching => "Moment Matching",
            Estimator::Huber => "Huber Estimator",
            Estimator::MaxCorr => "Maximal Correlation",
        }
    }

    fn code(self) -> u64 {
        self as u64
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mle" => Ok(Estimator::Mle),
            "moment" | "moment-matching" | "moment_matching" | "mm" => {
                Ok(Estimator::MomentMatching)
            }
            "huber" => Ok(Estimator::Huber),
            "maxcorr" | "max-corr" | "maximal-correlation" => Ok(Estimator::MaxCorr),
            other => Err(Error::InvalidInput(format!(
                "unknown estimator {other:?} (expected mle, moment, huber or maxcorr)"
            ))),
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Mle => "mle",
            Estimator::MomentMatching => "moment",
            Estimator::Huber => "huber",
            Estimator::MaxCorr => "maxcorr",
        })
    }
}

fn family_code(f: Family) -> u64 {
    match f {
        Family::Gaussian => 0,
        Family::Laplace => 1,
        Family::Cauchy => 2,
    }
}

const DATA_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub families: Vec<Family>,
    pub estimators: Vec<Estimator>,
    pub theta_true: f64,
    pub mu_true: f64,
    pub n: usize,
    pub m: usize,
    pub m1: usize,
    pub m2: usize,
    pub trials: usize,
    /// Overrides `trials` for the maximal-correlation estimator, which is far
    /// more expensive per trial than the baselines.
    pub maxcorr_trials: Option<usize>,
    pub huber_c: f64,
    pub bandwidth: f64,
    pub master_seed: u64,
    /// Mean squared error above which an estimator is reported as divergent.
    pub divergence_threshold: f64,
    pub record_timings: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            families: Family::ALL.to_vec(),
            estimators: Estimator::ALL.to_vec(),
            theta_true: 1.0,
            mu_true: 1.0,
            n: 100,
            m: 100,
            m1: 50,
            m2: 50,
            trials: 10_000,
            maxcorr_trials: None,
            huber_c: 1.0,
            bandwidth: 1.0,
            master_seed: 0,
            divergence_threshold: 1e3,
            record_timings: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidConfig("n and m must be positive".into()));
        }
        if self.m1 + self.m2 != self.m || self.m1 == 0 || self.m2 == 0 {
            return Err(Error::InvalidConfig(format!(
                "latent split sizes must be positive and sum to m (m1={}, m2={}, m={})",
                self.m1, self.m2, self.m
            )));
        }
        if self.trials == 0 || self.maxcorr_trials == Some(0) {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.families.is_empty() || self.estimators.is_empty() {
            return Err(Error::InvalidConfig(
                "select at least one family and one estimator".into(),
            ));
        }
        if !(self.huber_c > 0.0) {
            return Err(Error::InvalidConfig(
                "Huber threshold must be positive".into(),
            ));
        }
        KernelConfig::gaussian(self.bandwidth)?;
        Ok(())
    }

    pub fn trials_for(&self, estimator: Estimator) -> usize {
        match (estimator, self.maxcorr_trials) {
            (Estimator::MaxCorr, Some(t)) => t,
            _ => self.trials,
        }
    }
}

/// The two datasets of one trial: x ~ g₀(· − μ − θ), z ~ g₀(· − μ).
pub fn trial_data(cfg: &ExperimentConfig, family: Family, trial: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = derive_stream(cfg.master_seed, &[family_code(family), DATA_STREAM, trial]);
    let x = DistributionSpec::new(family, cfg.mu_true + cfg.theta_true).sample(cfg.n, &mut rng);
    let z = DistributionSpec::new(family, cfg.mu_true).sample(cfg.m, &mut rng);
    (x, z)
}

pub fn estimate_translation(
    cfg: &ExperimentConfig,
    family: Family,
    estimator: Estimator,
    trial: u64,
    x: &[f64],
    z: &[f64],
) -> Result<f64> {
    match estimator {
        Estimator::Mle => mle_translation(x, z, family),
        Estimator::MomentMatching => moment_matching(x, z),
        Estimator::Huber => huber_translation(
            x,
            z,
            &HuberConfig {
                c: cfg.huber_c,
                ..HuberConfig::default()
            },
        ),
        Estimator::MaxCorr => {
            let mut rng = derive_stream(
                cfg.master_seed,
                &[family_code(family), estimator.code(), trial],
            );
            let (z1, z2) = split_latent(z, cfg.m1, rng.next_u64())?;
            let problem = MaxCorrProblem::scalar(
                x,
                &z1,
                &z2,
                TransformSpec::translation(1)?,
                KernelConfig::gaussian(cfg.bandwidth)?,
            )?;
            Ok(estimate(&problem, &OptimizerConfig::default_for(1))?.theta[0])
        }
    }
}

/// Squared error (θ̂ − θ)² of one trial; deterministic in its arguments.
pub fn run_trial(
    cfg: &ExperimentConfig,
    family: Family,
    estimator: Estimator,
    trial: u64,
) -> Result<f64> {
    let (x, z) = trial_data(cfg, family, trial);
    let est = estimate_translation(cfg, family, estimator, trial, &x, &z)?;
    if !est.is_finite() {
        return Err(Error::NonFinite(format!("{estimator} estimate")));
    }
    Ok((est - cfg.theta_true).powi(2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub family: Family,
    pub estimator: Estimator,
    pub error_power: ExtReal,
    /// Sample standard deviation of squared errors over √trials; absent for a
    /// single successful trial or a divergent cell.
    pub std_error: Option<f64>,
    pub trial_count: usize,
    pub failed_trial_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_secs: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrlbRow {
    pub family: Family,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub crlb: Vec<CrlbRow>,
    pub cells: Vec<CellReport>,
}

impl ExperimentReport {
    pub fn cell(&self, family: Family, estimator: Estimator) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.family == family && c.estimator == estimator)
    }

    pub fn crlb_for(&self, family: Family) -> Option<f64> {
        self.crlb
            .iter()
            .find(|r| r.family == family)
            .map(|r| r.value)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Plain-text table: rows CRLB then each estimator, one column per family,
    /// followed by the Monte Carlo standard errors.
    pub fn render_table(&self) -> String {
        let families = &self.config.families;
        let label_width = 21;
        let col = 10;
        let mut out = String::new();
        let header = |out: &mut String| {
            out.push_str(&format!("{:<label_width$}", ""));
            for f in families {
                out.push_str(&format!("{:>col$}", f.title()));
            }
            out.push('\n');
        };
        out.push_str("Error power of translation estimates\n");
        header(&mut out);
        out.push_str(&format!("{:<label_width$}", "CRLB"));
        for f in families {
            let v = self.crlb_for(*f).map(ExtReal::Finite);
            out.push_str(&format!("{:>col$}", fmt_cell(v, 3)));
        }
        out.push('\n');
        for e in &self.config.estimators {
            out.push_str(&format!("{:<label_width$}", e.title()));
            for f in families {
                let v = self.cell(*f, *e).map(|c| c.error_power);
                out.push_str(&format!("{:>col$}", fmt_cell(v, 3)));
            }
            out.push('\n');
        }
        out.push_str("\nMonte Carlo standard error\n");
        header(&mut out);
        for e in &self.config.estimators {
            out.push_str(&format!("{:<label_width$}", e.title()));
            for f in families {
                let text = match self.cell(*f, *e) {
                    Some(c) => match c.std_error {
                        Some(se) => format!("{se:.5}"),
                        None => "n/a".to_string(),
                    },
                    None => "-".to_string(),
                };
                out.push_str(&format!("{text:>col$}"));
            }
            out.push('\n');
        }
        for c in &self.cells {
            if c.failed_trial_count > 0 {
                out.push_str(&format!(
                    "note: {} / {}: {} of {} trials failed and were excluded\n",
                    c.estimator.title(),
                    c.family.title(),
                    c.failed_trial_count,
                    c.trial_count
                ));
            }
        }
        out
    }
}

fn fmt_cell(v: Option<ExtReal>, precision: usize) -> String {
    match v {
        Some(x) => format!("{x:.precision$}"),
        None => "-".to_string(),
    }
}

/// Analytic (1/FI)(1/n + 1/m) for each configured family.
pub fn crlb_rows(cfg: &ExperimentConfig) -> Result<Vec<CrlbRow>> {
    cfg.families
        .iter()
        .map(|&family| {
            Ok(CrlbRow {
                family,
                value: crlb(family.fisher_information(), cfg.n, cfg.m)?,
            })
        })
        .collect()
}

/// Aggregates per-trial squared errors (in trial order) into a cell.
///
/// A cell is divergent when its mean exceeds `divergence_threshold`, or when
/// (with at least 100 successes) a single trial carries more than half of the
/// total, the signature of an infinite-variance error distribution.
pub fn aggregate(
    family: Family,
    estimator: Estimator,
    results: &[Result<f64>],
    divergence_threshold: f64,
) -> CellReport {
    let errors: Vec<f64> = results
        .iter()
        .filter_map(|r| r.as_ref().ok().copied())
        .collect();
    let failed = results.len() - errors.len();
    let k = errors.len();
    let (error_power, std_error) = if k == 0 {
        (ExtReal::Finite(f64::NAN), None)
    } else {
        let sum: f64 = errors.iter().sum();
        let mean = sum / k as f64;
        let largest = errors.iter().copied().fold(0.0, f64::max);
        let dominated = k >= 100 && largest > 0.5 * sum;
        if mean > divergence_threshold || dominated || !mean.is_finite() {
            (ExtReal::Infinite, None)
        } else if k == 1 {
            (ExtReal::Finite(mean), None)
        } else {
            let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
            (ExtReal::Finite(mean), Some((var / k as f64).sqrt()))
        }
    };
    CellReport {
        family,
        estimator,
        error_power,
        std_error,
        trial_count: results.len(),
        failed_trial_count: failed,
        wall_time_secs: None,
    }
}

/// Runs every (family, estimator) cell using the current rayon pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let mut cells = Vec::with_capacity(cfg.families.len() * cfg.estimators.len());
    for &family in &cfg.families {
        for &estimator in &cfg.estimators {
            let started = Instant::now();
            let trials = cfg.trials_for(estimator) as u64;
            let results: Vec<Result<f64>> = (0..trials)
                .into_par_iter()
                .map(|t| run_trial(cfg, family, estimator, t))
                .collect();
            for (t, r) in results.iter().enumerate() {
                if let Err(e) = r {
                    log::warn!("{estimator}/{family} trial {t} failed: {e}");
                }
            }
            let mut cell = aggregate(family, estimator, &results, cfg.divergence_threshold);
            if cfg.record_timings {
                cell.wall_time_secs = Some(started.elapsed().as_secs_f64());
            }
            log::info!(
                "{:<20} {:<9} error power {} ({} trials)",
                estimator.title(),
                family.title(),
                cell.error_power,
                cell.trial_count
            );
            cells.push(cell);
        }
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        crlb: crlb_rows(cfg)?,
        cells,
    })
}

/// [`run_experiment`] on a dedicated pool of `workers` threads.
pub fn run_experiment_with_workers(
    cfg: &ExperimentConfig,
    workers: usize,
) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}
