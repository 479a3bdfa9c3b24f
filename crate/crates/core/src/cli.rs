//! The `ddest` command line: dataset generation, one-shot estimation, neural
//! training and the Monte Carlo benchmark.
//!
//! Every option can also come from a TOML file given by `--config`. Top-level
//! keys hold the global options and a table per subcommand (`[gen-data]`,
//! `[estimate]`, `[train]`, `[bench]`) holds that command's options, spelled
//! as on the command line with `_` in place of `-`. Flags win over the file.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;
use serde_json::json;

use crate::baselines::{huber_translation, mle_translation, moment_matching, HuberConfig};
use crate::bench::{run_experiment, Estimator, ExperimentConfig, ExperimentReport};
use crate::costs::CostSpec;
use crate::distributions::{DistributionSpec, Family};
use crate::error::Error;
use crate::io::{read_csv, read_paired, write_csv, Dataset};
use crate::likelihood::{mmae_estimate, mmse_estimate, PriorSamples, TranslationModel};
use crate::maxcorr::{
    estimate, split_latent, KernelConfig, MaxCorrProblem, OptimizerConfig, OptimizerMethod,
};
use crate::nn::{self, Activation, BatchMode, NeuralEstimator, TrainConfig};
use crate::rng::derive_stream;
use crate::transforms::{TransformKind, TransformSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ESTIMATION: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn estimation(e: Error) -> Self {
        Self {
            code: EXIT_ESTIMATION,
            message: e.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Diverged { .. } => EXIT_DIVERGED,
            Error::NotConverged { .. }
            | Error::OptimizerFailed { .. }
            | Error::DegenerateWeights
            | Error::NonFinite(_) => EXIT_ESTIMATION,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "ddest", version, about = "Data-driven parameter estimation")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalArgs {
    /// Master seed for every random choice.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file or directory (meaning depends on the command).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with default options.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all available cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate observation and latent datasets, or a paired training set.
    GenData(GenDataArgs),
    /// Estimate θ from dataset files.
    Estimate(EstimateArgs),
    /// Train a neural estimator on a paired dataset.
    Train(TrainArgs),
    /// Run the Monte Carlo comparison of translation estimators.
    Bench(BenchArgs),
}

macro_rules! merge_from {
    ($dst:expr, $src:expr; $($field:ident),* $(,)?) => {
        {
            $( if $dst.$field.is_none() { $dst.$field = $src.$field.clone(); } )*
        }
    };
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct GenDataArgs {
    /// gaussian, laplace or cauchy.
    #[arg(long)]
    pub family: Option<Family>,
    /// translation, scale or matrix.
    #[arg(long)]
    pub transform: Option<TransformKind>,
    /// Dimension of each sample.
    #[arg(long)]
    pub dim: Option<usize>,
    /// True θ: one value (broadcast; θ·I for matrix) or a comma-separated list.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub theta: Option<Vec<f64>>,
    /// Location of the latent density.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Number of observations.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of latent samples.
    #[arg(long)]
    pub m: Option<usize>,
    /// Write a paired (x, θ) toy set instead: θ ~ N(0, I), x = θ + noise.
    #[arg(long)]
    pub paired: bool,
    /// Number of pairs for --paired.
    #[arg(long)]
    pub pairs: Option<usize>,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateArgs {
    /// maxcorr, mle, moment, huber, mmse, mmae or nn.
    #[arg(long)]
    pub method: Option<String>,
    /// Observation file.
    #[arg(long)]
    pub x: Option<PathBuf>,
    /// Latent sample file (maxcorr and baselines).
    #[arg(long)]
    pub z: Option<PathBuf>,
    /// Prior sample file (mmse, mmae).
    #[arg(long)]
    pub prior: Option<PathBuf>,
    /// Trained model file (nn).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Base density for mle, mmse and mmae.
    #[arg(long)]
    pub family: Option<Family>,
    /// Location of the base density for mmse and mmae.
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Transform for maxcorr.
    #[arg(long)]
    pub transform: Option<TransformKind>,
    /// Size of the first latent split (default: half).
    #[arg(long)]
    pub m1: Option<usize>,
    /// Kernel bandwidth h.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// grid, nelder-mead or gradient.
    #[arg(long)]
    pub optimizer: Option<OptimizerMethod>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Huber threshold c.
    #[arg(long)]
    pub huber_c: Option<f64>,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct TrainArgs {
    /// Paired CSV declaring x_cols and theta_cols in its header.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Hidden layer widths, comma-separated (default 32).
    #[arg(long, value_delimiter = ',')]
    pub hidden: Option<Vec<usize>>,
    /// tanh or relu.
    #[arg(long)]
    pub activation: Option<Activation>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// stochastic or full.
    #[arg(long)]
    pub batch_mode: Option<BatchMode>,
    /// squared or absolute.
    #[arg(long)]
    pub cost: Option<CostSpec>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub early_stop: Option<f64>,
    /// Where to write the per-epoch loss (default: model path with .loss.csv).
    #[arg(long)]
    pub loss_trace: Option<PathBuf>,
}

#[derive(Debug, Args, Deserialize, Default, Clone)]
#[serde(default, deny_unknown_fields)]
pub struct BenchArgs {
    /// Comma-separated subset of gaussian, laplace, cauchy.
    #[arg(long, value_delimiter = ',')]
    pub families: Option<Vec<Family>>,
    /// Comma-separated subset of mle, moment, huber, maxcorr.
    #[arg(long, value_delimiter = ',')]
    pub estimators: Option<Vec<Estimator>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Trials for the maximal-correlation row (default: --trials).
    #[arg(long)]
    pub maxcorr_trials: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub m1: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub huber_c: Option<f64>,
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Record per-cell wall time in the JSON report.
    #[arg(long)]
    pub timings: bool,
    /// Re-render the table of an existing JSON report instead of running.
    #[arg(long)]
    pub from_json: Option<PathBuf>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct ConfigFile {
    seed: Option<u64>,
    out: Option<PathBuf>,
    workers: Option<usize>,
    #[serde(rename = "gen-data", alias = "gen_data")]
    gen_data: GenDataArgs,
    estimate: EstimateArgs,
    train: TrainArgs,
    bench: BenchArgs,
}

fn load_config(path: &Path) -> CliResult<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text)
        .map_err(|e| CliError::usage(format!("invalid config {}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn run(mut cli: Cli) -> CliResult<()> {
    if let Some(path) = cli.global.config.clone() {
        let cfg = load_config(&path)?;
        let g = &mut cli.global;
        g.seed = g.seed.or(cfg.seed);
        g.out = g.out.take().or(cfg.out);
        g.workers = g.workers.or(cfg.workers);
        match &mut cli.command {
            Command::GenData(a) => {
                merge_from!(a, cfg.gen_data; family, transform, dim, theta, mu, n, m, pairs);
                a.paired |= cfg.gen_data.paired;
            }
            Command::Estimate(a) => merge_from!(a, cfg.estimate;
                method, x, z, prior, model, family, mu, transform, m1, bandwidth,
                optimizer, restarts, max_iters, huber_c),
            Command::Train(a) => merge_from!(a, cfg.train;
                data, hidden, activation, epochs, learning_rate, batch_mode, cost,
                restarts, early_stop, loss_trace),
            Command::Bench(a) => {
                merge_from!(a, cfg.bench;
                families, estimators, trials, maxcorr_trials, n, m, m1, theta, mu,
                huber_c, bandwidth, from_json);
                a.timings |= cfg.bench.timings;
            }
        }
    }
    let global = cli.global;
    let body = || match cli.command {
        Command::GenData(a) => cmd_gen_data(&global, a),
        Command::Estimate(a) => cmd_estimate(&global, a),
        Command::Train(a) => cmd_train(&global, a),
        Command::Bench(a) => cmd_bench(&global, a),
    };
    match global.workers {
        Some(0) => Err(CliError::usage("--workers must be at least 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?
            .install(body),
        None => body(),
    }
}

fn required<T>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::usage(format!("missing required option --{flag}")))
}

fn write_output(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", path.display())))
}

fn fmt_list(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn build_theta(kind: TransformKind, dim: usize, theta: &[f64]) -> CliResult<Vec<f64>> {
    let p = TransformSpec::new(kind, dim, dim)?.param_dim();
    match (kind, theta.len()) {
        (_, l) if l == p => Ok(theta.to_vec()),
        (TransformKind::Matrix, 1) => {
            let mut out = vec![0.0; p];
            for i in 0..dim {
                out[i * dim + i] = theta[0];
            }
            Ok(out)
        }
        (_, 1) => Ok(vec![theta[0]; p]),
        (_, l) => Err(CliError::usage(format!(
            "--theta has {l} values; {kind} in dimension {dim} takes 1 or {p}"
        ))),
    }
}

pub fn cmd_gen_data(global: &GlobalArgs, a: GenDataArgs) -> CliResult<()> {
    let seed = global.seed.unwrap_or(0);
    let family = a.family.unwrap_or(Family::Gaussian);
    let dim = a.dim.unwrap_or(1);
    let out = global.out.clone().unwrap_or_else(|| PathBuf::from("."));
    if dim == 0 {
        return Err(CliError::usage("--dim must be positive"));
    }
    ensure_dir(&out)?;
    let mut rng = derive_stream(seed, &[0]);

    if a.paired {
        let pairs = a.pairs.unwrap_or(10_000);
        if pairs == 0 {
            return Err(CliError::usage("--pairs must be positive"));
        }
        let mut rows = Vec::with_capacity(pairs);
        for _ in 0..pairs {
            let theta: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
            let mut row: Vec<f64> = theta
                .iter()
                .map(|t| t + family.sample_base(&mut rng))
                .collect();
            row.extend(theta);
            rows.push(row);
        }
        let meta = [
            ("x_cols", dim.to_string()),
            ("theta_cols", dim.to_string()),
            ("family", family.to_string()),
            ("seed", seed.to_string()),
        ];
        let path = out.join("pairs.csv");
        write_csv(
            &path,
            &rows,
            &meta,
            Some("paired toy: theta ~ N(0, I), x = theta + noise"),
        )?;
        println!("wrote {} pairs to {}", pairs, path.display());
        return Ok(());
    }

    let n = a.n.unwrap_or(100);
    let m = a.m.unwrap_or(100);
    if n == 0 || m == 0 {
        return Err(CliError::usage("--n and --m must be positive"));
    }
    let kind = a.transform.unwrap_or(TransformKind::Translation);
    let mu = a.mu.unwrap_or(1.0);
    let theta = build_theta(kind, dim, a.theta.as_deref().unwrap_or(&[1.0]))?;
    let transform = TransformSpec::new(kind, dim, dim)?;
    let latent = DistributionSpec::new(family, mu);
    let draw = |rng: &mut _| -> Vec<f64> { latent.sample(dim, rng) };
    let mut xs = Vec::with_capacity(n);
    for _ in 0..n {
        let z = draw(&mut rng);
        xs.push(transform.apply(&z, &theta)?);
    }
    let zs: Vec<Vec<f64>> = (0..m).map(|_| draw(&mut rng)).collect();
    let meta = |kind_label: &str, rows: usize| {
        vec![
            ("data", kind_label.to_string()),
            ("family", family.to_string()),
            ("transform", kind.to_string()),
            ("dim", dim.to_string()),
            ("theta", fmt_list(&theta)),
            ("mu", mu.to_string()),
            ("rows", rows.to_string()),
            ("seed", seed.to_string()),
        ]
    };
    write_csv(
        &out.join("x.csv"),
        &xs,
        &meta("x", n),
        Some("observations x = T(z, theta)"),
    )?;
    write_csv(
        &out.join("z.csv"),
        &zs,
        &meta("z", m),
        Some("latent samples z"),
    )?;
    println!(
        "wrote {} and {}",
        out.join("x.csv").display(),
        out.join("z.csv").display()
    );
    Ok(())
}

fn read_data(path: Option<PathBuf>, flag: &str) -> CliResult<Dataset> {
    let path = required(path, flag)?;
    let data = read_csv(&path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    if data.rows.is_empty() {
        return Err(CliError::usage(format!(
            "{} contains no samples",
            path.display()
        )));
    }
    Ok(data)
}

pub fn cmd_estimate(global: &GlobalArgs, a: EstimateArgs) -> CliResult<()> {
    let seed = global.seed.unwrap_or(0);
    let method = required(a.method.clone(), "method")?.to_ascii_lowercase();
    let report = match method.as_str() {
        "maxcorr" => {
            let x = read_data(a.x, "x")?;
            let z = read_data(a.z, "z")?;
            let kind = a.transform.unwrap_or(TransformKind::Translation);
            let transform = TransformSpec::new(kind, z.dim(), x.dim())?;
            let m1 = a.m1.unwrap_or(z.rows.len() / 2);
            let (z1, z2) = split_latent(&z.rows, m1, seed)?;
            let kernel = KernelConfig::gaussian(a.bandwidth.unwrap_or(1.0))?;
            let problem = MaxCorrProblem::new(&x.rows, &z1, &z2, transform, kernel)?;
            let mut opt = OptimizerConfig::default_for(transform.param_dim());
            opt.seed = seed;
            if let Some(m) = a.optimizer {
                opt.method = m;
            }
            if let Some(r) = a.restarts {
                opt.restarts = r;
            }
            if let Some(i) = a.max_iters {
                opt.max_iters = i;
            }
            let est = estimate(&problem, &opt).map_err(CliError::estimation)?;
            json!({
                "method": "maxcorr",
                "theta": est.theta,
                "objective": est.objective,
                "log_objective": est.log_objective,
                "transform": kind.to_string(),
                "optimizer": opt.method.to_string(),
                "restarts": est.restarts,
            })
        }
        "mle" | "moment" | "huber" => {
            let x = read_data(a.x, "x")?.scalars()?;
            let z = read_data(a.z, "z")?.scalars()?;
            let theta = match method.as_str() {
                "mle" => mle_translation(&x, &z, a.family.unwrap_or(Family::Gaussian)),
                "moment" => moment_matching(&x, &z),
                _ => huber_translation(
                    &x,
                    &z,
                    &HuberConfig {
                        c: a.huber_c.unwrap_or(1.0),
                        ..HuberConfig::default()
                    },
                ),
            }
            .map_err(CliError::estimation)?;
            json!({ "method": method, "theta": [theta] })
        }
        "mmse" | "mmae" => {
            let x = read_data(a.x, "x")?;
            let prior = read_data(a.prior, "prior")?;
            if x.dim() != prior.dim() {
                return Err(CliError::usage(format!(
                    "observations have {} columns but prior samples have {}",
                    x.dim(),
                    prior.dim()
                )));
            }
            let model = TranslationModel::new(DistributionSpec::new(
                a.family.unwrap_or(Family::Gaussian),
                a.mu.unwrap_or(0.0),
            ));
            let observations: Vec<f64> = x.rows.concat();
            let prior = PriorSamples::new(prior.rows)?;
            let theta = if method == "mmse" {
                mmse_estimate(&model, &prior, &observations)
            } else {
                mmae_estimate(&model, &prior, &observations)
            }
            .map_err(CliError::estimation)?;
            json!({ "method": method, "theta": theta, "prior_samples": prior.len() })
        }
        "nn" => {
            let net = NeuralEstimator::load(required(a.model, "model")?)?;
            let x = read_data(a.x, "x")?;
            let outputs = x
                .rows
                .iter()
                .map(|r| net.forward(r))
                .collect::<crate::Result<Vec<_>>>()
                .map_err(CliError::estimation)?;
            json!({ "method": "nn", "theta": outputs })
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown method {other:?} (expected maxcorr, mle, moment, huber, mmse, mmae or nn)"
            )))
        }
    };
    println!("theta = {}", report["theta"]);
    for key in ["objective", "log_objective"] {
        if let Some(v) = report.get(key) {
            println!("{key} = {v}");
        }
    }
    if let Some(out) = &global.out {
        let text = serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n";
        write_output(out, &text)?;
    }
    Ok(())
}

pub fn cmd_train(global: &GlobalArgs, a: TrainArgs) -> CliResult<()> {
    let seed = global.seed.unwrap_or(0);
    let data_path = required(a.data, "data")?;
    let data = read_paired(&data_path)
        .map_err(|e| CliError::usage(format!("{}: {e}", data_path.display())))?;
    let out = required(global.out.clone(), "out")?;
    let hidden = a.hidden.unwrap_or_else(|| vec![32]);
    let mut layers = vec![data.x_dim()];
    layers.extend(&hidden);
    layers.push(data.theta_dim());
    let cfg = TrainConfig {
        learning_rate: a.learning_rate.unwrap_or(0.01),
        max_epochs: a.epochs.unwrap_or(50),
        batch_mode: a.batch_mode.unwrap_or(BatchMode::Stochastic),
        shuffle_each_epoch: true,
        seed,
        early_stop_tolerance: a.early_stop.unwrap_or(1e-8),
        cost: a.cost.unwrap_or(CostSpec::SquaredError),
    };
    let activation = a.activation.unwrap_or(Activation::Tanh);
    let restarts = a.restarts.unwrap_or(1);
    let outcome = if restarts == 1 {
        nn::train(
            NeuralEstimator::init(layers, activation, seed)?,
            &cfg,
            &data,
        )?
    } else {
        nn::train_with_restarts(&layers, activation, &cfg, &data, restarts)?
    };
    outcome.net.save(&out)?;
    let trace_path = a
        .loss_trace
        .unwrap_or_else(|| out.with_extension("loss.csv"));
    let mut trace = String::from("# epoch,loss (epoch 0 is the initial loss)\n");
    for (i, l) in outcome.loss_trace.iter().enumerate() {
        trace.push_str(&format!("{i},{l}\n"));
    }
    write_output(&trace_path, &trace)?;
    println!(
        "final loss = {} after {} epochs{}",
        outcome.final_loss(),
        outcome.epochs_run,
        if outcome.stopped_early {
            " (stopped early)"
        } else {
            ""
        }
    );
    println!("model written to {}", out.display());
    Ok(())
}

pub fn cmd_bench(global: &GlobalArgs, a: BenchArgs) -> CliResult<()> {
    let report = if let Some(path) = &a.from_json {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        ExperimentReport::from_json(&text)?
    } else {
        let d = ExperimentConfig::default();
        let m = a.m.unwrap_or(d.m);
        let m1 = a.m1.unwrap_or(m / 2);
        let cfg = ExperimentConfig {
            families: a.families.unwrap_or(d.families),
            estimators: a.estimators.unwrap_or(d.estimators),
            theta_true: a.theta.unwrap_or(d.theta_true),
            mu_true: a.mu.unwrap_or(d.mu_true),
            n: a.n.unwrap_or(d.n),
            m,
            m1,
            m2: m.saturating_sub(m1),
            trials: a.trials.unwrap_or(d.trials),
            maxcorr_trials: a.maxcorr_trials,
            huber_c: a.huber_c.unwrap_or(d.huber_c),
            bandwidth: a.bandwidth.unwrap_or(d.bandwidth),
            master_seed: global.seed.unwrap_or(d.master_seed),
            divergence_threshold: d.divergence_threshold,
            record_timings: a.timings,
        };
        run_experiment(&cfg)?
    };
    let table = report.render_table();
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(table.as_bytes());
    if let Some(out) = &global.out {
        ensure_dir(out)?;
        write_output(&out.join("table.txt"), &table)?;
        write_output(&out.join("report.json"), &report.to_json()?)?;
    }
    Ok(())
}
