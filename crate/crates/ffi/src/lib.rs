//! C ABI for the `ddest` estimation library.
//!
//! Every function returns a [`DdestStatus`]. On failure a description is
//! available from [`ddest_last_error_message`] on the same thread. Handles
//! are opaque pointers released with their `_free` function; passing NULL to
//! a `_free` function is a no-op. Arrays are passed as pointer plus length,
//! vectors of samples as row-major flat arrays.
//!
//! # Safety
//!
//! Pointer arguments must be NULL or valid for the stated number of reads or
//! writes, and handles must come from this library and not be used after
//! being freed. NULL is reported as `DDEST_STATUS_NULL_POINTER` where an
//! argument is required.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::slice;

use ddest::baselines::{huber_translation, mle_translation, moment_matching, HuberConfig};
use ddest::likelihood::{mmae_estimate, mmse_estimate, PriorSamples, TranslationModel};
use ddest::maxcorr::{estimate, KernelConfig, MaxCorrProblem, OptimizerConfig};
use ddest::nn::{train, Activation, NeuralEstimator, PairedDataset, TrainConfig};
use ddest::{crlb, DistributionSpec, Error, Family, TransformKind, TransformSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdestStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotConverged = 4,
    Diverged = 5,
    Numeric = 6,
    Io = 7,
    BufferTooSmall = 8,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdestFamily {
    Gaussian = 0,
    Laplace = 1,
    Cauchy = 2,
}

impl From<DdestFamily> for Family {
    fn from(f: DdestFamily) -> Self {
        match f {
            DdestFamily::Gaussian => Family::Gaussian,
            DdestFamily::Laplace => Family::Laplace,
            DdestFamily::Cauchy => Family::Cauchy,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdestTransform {
    Translation = 0,
    Scale = 1,
    Matrix = 2,
}

impl From<DdestTransform> for TransformKind {
    fn from(t: DdestTransform) -> Self {
        match t {
            DdestTransform::Translation => TransformKind::Translation,
            DdestTransform::Scale => TransformKind::ElementwiseScale,
            DdestTransform::Matrix => TransformKind::Matrix,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DdestActivation {
    Tanh = 0,
    Relu = 1,
}

/// Opaque neural estimator.
pub struct DdestNeuralEstimator {
    net: NeuralEstimator,
}

/// Opaque maximal-correlation problem instance.
pub struct DdestMaxCorr {
    problem: MaxCorrProblem,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let clean: String = message.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

struct Failure(DdestStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::DimensionMismatch { .. } => DdestStatus::DimensionMismatch,
            Error::InvalidInput(_) | Error::InvalidConfig(_) | Error::Parse { .. } => {
                DdestStatus::InvalidArgument
            }
            Error::NotConverged { .. } | Error::OptimizerFailed { .. } => DdestStatus::NotConverged,
            Error::Diverged { .. } => DdestStatus::Diverged,
            Error::DegenerateWeights | Error::NonFinite(_) => DdestStatus::Numeric,
            Error::Io(_) | Error::Json(_) => DdestStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(DdestStatus::NullPointer, format!("{what} is NULL"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DdestStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            DdestStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("internal panic: {message}"));
            DdestStatus::Panic
        }
    }
}

/// # Safety
/// `ptr` must be NULL (only when `len` is 0) or valid for `len` reads.
unsafe fn input<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a>(ptr: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

unsafe fn write<T>(ptr: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    ptr.write(value);
    Ok(())
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path).to_str().map_err(|_| {
        Failure(
            DdestStatus::InvalidArgument,
            "path is not valid UTF-8".into(),
        )
    })?;
    Ok(PathBuf::from(s))
}

fn rows(flat: &[f64], dim: usize) -> Vec<Vec<f64>> {
    flat.chunks_exact(dim).map(<[f64]>::to_vec).collect()
}

fn check_rows(len: usize, dim: usize, what: &str) -> Result<(), Failure> {
    if dim == 0 || !len.is_multiple_of(dim) {
        return Err(Failure(
            DdestStatus::DimensionMismatch,
            format!("{what}: length {len} is not a multiple of dimension {dim}"),
        ));
    }
    Ok(())
}

/// Message describing the last failure on this thread, or "" after a success.
/// The pointer stays valid until the next call into this library on the thread.
#[no_mangle]
pub extern "C" fn ddest_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ddest_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Cramér–Rao bound (1/FI)(1/n + 1/m) for translation estimation.
#[no_mangle]
pub unsafe extern "C" fn ddest_crlb(
    family: DdestFamily,
    n: usize,
    m: usize,
    out: *mut f64,
) -> DdestStatus {
    guard(|| {
        let fi = Family::from(family).fisher_information();
        write(out, crlb(fi, n, m)?, "out")
    })
}

/// mean(x) − mean(z).
#[no_mangle]
pub unsafe extern "C" fn ddest_moment_matching(
    x: *const f64,
    n: usize,
    z: *const f64,
    m: usize,
    out: *mut f64,
) -> DdestStatus {
    guard(|| {
        let est = moment_matching(input(x, n, "x")?, input(z, m, "z")?)?;
        write(out, est, "out")
    })
}

/// Difference of the maximum-likelihood locations of x and z.
#[no_mangle]
pub unsafe extern "C" fn ddest_mle_translation(
    family: DdestFamily,
    x: *const f64,
    n: usize,
    z: *const f64,
    m: usize,
    out: *mut f64,
) -> DdestStatus {
    guard(|| {
        let est = mle_translation(input(x, n, "x")?, input(z, m, "z")?, family.into())?;
        write(out, est, "out")
    })
}

/// Difference of the Huber location estimates of x and z with threshold `c`.
#[no_mangle]
pub unsafe extern "C" fn ddest_huber_translation(
    x: *const f64,
    n: usize,
    z: *const f64,
    m: usize,
    c: f64,
    out: *mut f64,
) -> DdestStatus {
    guard(|| {
        let cfg = HuberConfig {
            c,
            ..HuberConfig::default()
        };
        let est = huber_translation(input(x, n, "x")?, input(z, m, "z")?, &cfg)?;
        write(out, est, "out")
    })
}

#[allow(clippy::too_many_arguments)]
unsafe fn posterior(
    median: bool,
    family: DdestFamily,
    mu: f64,
    x: *const f64,
    x_len: usize,
    prior: *const f64,
    prior_len: usize,
    dim: usize,
    out: *mut f64,
) -> Result<(), Failure> {
    let x = input(x, x_len, "x")?;
    let prior = input(prior, prior_len, "prior")?;
    check_rows(x_len, dim, "x")?;
    check_rows(prior_len, dim, "prior")?;
    let samples = PriorSamples::new(rows(prior, dim))?;
    let model = TranslationModel::new(DistributionSpec::new(family.into(), mu));
    let est = if median {
        mmae_estimate(&model, &samples, x)?
    } else {
        mmse_estimate(&model, &samples, x)?
    };
    output(out, dim, "out")?.copy_from_slice(&est);
    Ok(())
}

/// Posterior-mean estimate of a translation θ (dimension `dim`) from prior
/// samples, under x = θ + noise with noise density g₀(· − mu).
///
/// `x` holds one or more iid observations of length `dim`; `prior` holds the
/// prior samples. Writes `dim` values to `out`.
#[no_mangle]
pub unsafe extern "C" fn ddest_mmse_translation(
    family: DdestFamily,
    mu: f64,
    x: *const f64,
    x_len: usize,
    prior: *const f64,
    prior_len: usize,
    dim: usize,
    out: *mut f64,
) -> DdestStatus {
    guard(|| posterior(false, family, mu, x, x_len, prior, prior_len, dim, out))
}

/// Posterior-median counterpart of [`ddest_mmse_translation`].
#[no_mangle]
pub unsafe extern "C" fn ddest_mmae_translation(
    family: DdestFamily,
    mu: f64,
    x: *const f64,
    x_len: usize,
    prior: *const f64,
    prior_len: usize,
    dim: usize,
    out: *mut f64,
) -> DdestStatus {
    guard(|| posterior(true, family, mu, x, x_len, prior, prior_len, dim, out))
}

/// Builds a maximal-correlation problem with a Gaussian kernel of bandwidth
/// `bandwidth`. Samples are `dim`-vectors; `x` has `n` rows, the latent splits
/// `m1` and `m2` rows.
#[no_mangle]
pub unsafe extern "C" fn ddest_maxcorr_new(
    x: *const f64,
    n: usize,
    z1: *const f64,
    m1: usize,
    z2: *const f64,
    m2: usize,
    dim: usize,
    transform: DdestTransform,
    bandwidth: f64,
    out: *mut *mut DdestMaxCorr,
) -> DdestStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let len = |rows: usize| {
            rows.checked_mul(dim)
                .ok_or_else(|| Failure(DdestStatus::InvalidArgument, "size overflow".into()))
        };
        let x = input(x, len(n)?, "x")?;
        let z1 = input(z1, len(m1)?, "z1")?;
        let z2 = input(z2, len(m2)?, "z2")?;
        if dim == 0 {
            return Err(Failure(
                DdestStatus::InvalidArgument,
                "dim must be positive".into(),
            ));
        }
        let spec = TransformSpec::new(transform.into(), dim, dim)?;
        let problem = MaxCorrProblem::new(
            &rows(x, dim),
            &rows(z1, dim),
            &rows(z2, dim),
            spec,
            KernelConfig::gaussian(bandwidth)?,
        )?;
        *out = Box::into_raw(Box::new(DdestMaxCorr { problem }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ddest_maxcorr_free(handle: *mut DdestMaxCorr) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of entries of θ for this problem.
#[no_mangle]
pub unsafe extern "C" fn ddest_maxcorr_param_dim(
    handle: *const DdestMaxCorr,
    out: *mut usize,
) -> DdestStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        write(out, h.problem.transform().param_dim(), "out")
    })
}

/// N₁N₂/D at θ (`theta_len` must equal the parameter dimension).
#[no_mangle]
pub unsafe extern "C" fn ddest_maxcorr_objective(
    handle: *const DdestMaxCorr,
    theta: *const f64,
    theta_len: usize,
    out: *mut f64,
) -> DdestStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        write(
            out,
            h.problem.objective(input(theta, theta_len, "theta")?)?,
            "out",
        )
    })
}

/// log N₁ + log N₂ − log D at θ.
#[no_mangle]
pub unsafe extern "C" fn ddest_maxcorr_log_objective(
    handle: *const DdestMaxCorr,
    theta: *const f64,
    theta_len: usize,
    out: *mut f64,
) -> DdestStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        write(
            out,
            h.problem.log_objective(input(theta, theta_len, "theta")?)?,
            "out",
        )
    })
}

/// Gradient of N₁N₂/D with respect to θ, written to `grad` (`theta_len` values).
#[no_mangle]
pub unsafe extern "C" fn ddest_maxcorr_gradient(
    handle: *const DdestMaxCorr,
    theta: *const f64,
    theta_len: usize,
    grad: *mut f64,
) -> DdestStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let g = h
            .problem
            .objective_gradient(input(theta, theta_len, "theta")?)?;
        output(grad, theta_len, "grad")?.copy_from_slice(&g);
        Ok(())
    })
}

/// Maximises the objective with the default optimizer for the parameter
/// dimension. Writes θ̂ to `theta_out` and, if non-NULL, the objective value.
#[no_mangle]
pub unsafe extern "C" fn ddest_maxcorr_estimate(
    handle: *const DdestMaxCorr,
    seed: u64,
    theta_out: *mut f64,
    theta_len: usize,
    objective_out: *mut f64,
) -> DdestStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let p = h.problem.transform().param_dim();
        if theta_len != p {
            return Err(Error::DimensionMismatch {
                context: "theta output",
                expected: p,
                actual: theta_len,
            }
            .into());
        }
        let mut opt = OptimizerConfig::default_for(p);
        opt.seed = seed;
        let est = estimate(&h.problem, &opt)?;
        output(theta_out, p, "theta_out")?.copy_from_slice(&est.theta);
        if !objective_out.is_null() {
            *objective_out = est.objective;
        }
        Ok(())
    })
}

/// New network with layer widths `layer_sizes[0..count]` (input first, output
/// last) and Glorot-uniform weights drawn from `seed`.
#[no_mangle]
pub unsafe extern "C" fn ddest_nn_new(
    layer_sizes: *const usize,
    count: usize,
    activation: DdestActivation,
    seed: u64,
    out: *mut *mut DdestNeuralEstimator,
) -> DdestStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        if layer_sizes.is_null() {
            return Err(null("layer_sizes"));
        }
        let sizes = slice::from_raw_parts(layer_sizes, count).to_vec();
        let act = match activation {
            DdestActivation::Tanh => Activation::Tanh,
            DdestActivation::Relu => Activation::Relu,
        };
        let net = NeuralEstimator::init(sizes, act, seed)?;
        *out = Box::into_raw(Box::new(DdestNeuralEstimator { net }));
        Ok(())
    })
}

/// Loads a model file written by [`ddest_nn_save`] or the command-line trainer.
#[no_mangle]
pub unsafe extern "C" fn ddest_nn_load(
    path: *const c_char,
    out: *mut *mut DdestNeuralEstimator,
) -> DdestStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let net = NeuralEstimator::load(path_arg(path)?)?;
        *out = Box::into_raw(Box::new(DdestNeuralEstimator { net }));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ddest_nn_save(
    handle: *const DdestNeuralEstimator,
    path: *const c_char,
) -> DdestStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        h.net.save(path_arg(path)?)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ddest_nn_free(handle: *mut DdestNeuralEstimator) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Input and output widths of the network.
#[no_mangle]
pub unsafe extern "C" fn ddest_nn_dims(
    handle: *const DdestNeuralEstimator,
    input_dim: *mut usize,
    output_dim: *mut usize,
) -> DdestStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        write(input_dim, h.net.input_dim(), "input_dim")?;
        write(output_dim, h.net.output_dim(), "output_dim")
    })
}

/// Evaluates the network on one input; `out_len` must equal the output width.
#[no_mangle]
pub unsafe extern "C" fn ddest_nn_forward(
    handle: *const DdestNeuralEstimator,
    x: *const f64,
    x_len: usize,
    out: *mut f64,
    out_len: usize,
) -> DdestStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let y = h.net.forward(input(x, x_len, "x")?)?;
        if out_len < y.len() {
            return Err(Failure(
                DdestStatus::BufferTooSmall,
                format!("output buffer holds {out_len} values, need {}", y.len()),
            ));
        }
        output(out, y.len(), "out")?.copy_from_slice(&y);
        Ok(())
    })
}

/// Trains in place by per-pair SGD with squared-error cost on `pairs` rows
/// of inputs `xs` and targets `thetas` (flat, row-major). Writes the final
/// mean training loss to `final_loss` if non-NULL. On failure the handle is
/// left unchanged.
#[no_mangle]
pub unsafe extern "C" fn ddest_nn_train(
    handle: *mut DdestNeuralEstimator,
    xs: *const f64,
    thetas: *const f64,
    pairs: usize,
    learning_rate: f64,
    epochs: usize,
    seed: u64,
    final_loss: *mut f64,
) -> DdestStatus {
    guard(|| {
        let h = handle.as_mut().ok_or_else(|| null("handle"))?;
        let (din, dout) = (h.net.input_dim(), h.net.output_dim());
        let overflow = || Failure(DdestStatus::InvalidArgument, "size overflow".into());
        let xs = input(xs, pairs.checked_mul(din).ok_or_else(overflow)?, "xs")?;
        let thetas = input(
            thetas,
            pairs.checked_mul(dout).ok_or_else(overflow)?,
            "thetas",
        )?;
        let data = PairedDataset::new(rows(xs, din), rows(thetas, dout))?;
        let cfg = TrainConfig {
            learning_rate,
            max_epochs: epochs,
            seed,
            ..TrainConfig::default()
        };
        let outcome = train(h.net.clone(), &cfg, &data)?;
        if !final_loss.is_null() {
            *final_loss = outcome.final_loss();
        }
        h.net = outcome.net;
        Ok(())
    })
}
