#ifndef DDEST_H
#define DDEST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum DdestActivation {
  DDEST_ACTIVATION_TANH = 0,
  DDEST_ACTIVATION_RELU = 1,
} DdestActivation;

typedef enum DdestFamily {
  DDEST_FAMILY_GAUSSIAN = 0,
  DDEST_FAMILY_LAPLACE = 1,
  DDEST_FAMILY_CAUCHY = 2,
} DdestFamily;

typedef enum DdestStatus {
  DDEST_STATUS_OK = 0,
  DDEST_STATUS_NULL_POINTER = 1,
  DDEST_STATUS_INVALID_ARGUMENT = 2,
  DDEST_STATUS_DIMENSION_MISMATCH = 3,
  DDEST_STATUS_NOT_CONVERGED = 4,
  DDEST_STATUS_DIVERGED = 5,
  DDEST_STATUS_NUMERIC = 6,
  DDEST_STATUS_IO = 7,
  DDEST_STATUS_BUFFER_TOO_SMALL = 8,
  DDEST_STATUS_PANIC = 99,
} DdestStatus;

typedef enum DdestTransform {
  DDEST_TRANSFORM_TRANSLATION = 0,
  DDEST_TRANSFORM_SCALE = 1,
  DDEST_TRANSFORM_MATRIX = 2,
} DdestTransform;

// Opaque maximal-correlation problem instance.
typedef struct DdestMaxCorr DdestMaxCorr;

// Opaque neural estimator.
typedef struct DdestNeuralEstimator DdestNeuralEstimator;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or "" after a success.
// The pointer stays valid until the next call into this library on the thread.
const char *ddest_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *ddest_version(void);

// Cramér–Rao bound (1/FI)(1/n + 1/m) for translation estimation.
enum DdestStatus ddest_crlb(enum DdestFamily family, size_t n, size_t m, double *out);

// mean(x) − mean(z).
enum DdestStatus ddest_moment_matching(const double *x,
                                       size_t n,
                                       const double *z,
                                       size_t m,
                                       double *out);

// Difference of the maximum-likelihood locations of x and z.
enum DdestStatus ddest_mle_translation(enum DdestFamily family,
                                       const double *x,
                                       size_t n,
                                       const double *z,
                                       size_t m,
                                       double *out);

// Difference of the Huber location estimates of x and z with threshold `c`.
enum DdestStatus ddest_huber_translation(const double *x,
                                         size_t n,
                                         const double *z,
                                         size_t m,
                                         double c,
                                         double *out);

// Posterior-mean estimate of a translation θ (dimension `dim`) from prior
// samples, under x = θ + noise with noise density g₀(· − mu).
//
// `x` holds one or more iid observations of length `dim`; `prior` holds the
// prior samples. Writes `dim` values to `out`.
enum DdestStatus ddest_mmse_translation(enum DdestFamily family,
                                        double mu,
                                        const double *x,
                                        size_t x_len,
                                        const double *prior,
                                        size_t prior_len,
                                        size_t dim,
                                        double *out);

// Posterior-median counterpart of [`ddest_mmse_translation`].
enum DdestStatus ddest_mmae_translation(enum DdestFamily family,
                                        double mu,
                                        const double *x,
                                        size_t x_len,
                                        const double *prior,
                                        size_t prior_len,
                                        size_t dim,
                                        double *out);

// Builds a maximal-correlation problem with a Gaussian kernel of bandwidth
// `bandwidth`. Samples are `dim`-vectors; `x` has `n` rows, the latent splits
// `m1` and `m2` rows.
enum DdestStatus ddest_maxcorr_new(const double *x,
                                   size_t n,
                                   const double *z1,
                                   size_t m1,
                                   const double *z2,
                                   size_t m2,
                                   size_t dim,
                                   enum DdestTransform transform,
                                   double bandwidth,
                                   struct DdestMaxCorr **out);

void ddest_maxcorr_free(struct DdestMaxCorr *handle);

// Number of entries of θ for this problem.
enum DdestStatus ddest_maxcorr_param_dim(const struct DdestMaxCorr *handle, size_t *out);

// N₁N₂/D at θ (`theta_len` must equal the parameter dimension).
enum DdestStatus ddest_maxcorr_objective(const struct DdestMaxCorr *handle,
                                         const double *theta,
                                         size_t theta_len,
                                         double *out);

// log N₁ + log N₂ − log D at θ.
enum DdestStatus ddest_maxcorr_log_objective(const struct DdestMaxCorr *handle,
                                             const double *theta,
                                             size_t theta_len,
                                             double *out);

// Gradient of N₁N₂/D with respect to θ, written to `grad` (`theta_len` values).
enum DdestStatus ddest_maxcorr_gradient(const struct DdestMaxCorr *handle,
                                        const double *theta,
                                        size_t theta_len,
                                        double *grad);

// Maximises the objective with the default optimizer for the parameter
// dimension. Writes θ̂ to `theta_out` and, if non-NULL, the objective value.
enum DdestStatus ddest_maxcorr_estimate(const struct DdestMaxCorr *handle,
                                        uint64_t seed,
                                        double *theta_out,
                                        size_t theta_len,
                                        double *objective_out);

// New network with layer widths `layer_sizes[0..count]` (input first, output
// last) and Glorot-uniform weights drawn from `seed`.
enum DdestStatus ddest_nn_new(const size_t *layer_sizes,
                              size_t count,
                              enum DdestActivation activation,
                              uint64_t seed,
                              struct DdestNeuralEstimator **out);

// Loads a model file written by [`ddest_nn_save`] or the command-line trainer.
enum DdestStatus ddest_nn_load(const char *path, struct DdestNeuralEstimator **out);

enum DdestStatus ddest_nn_save(const struct DdestNeuralEstimator *handle, const char *path);

void ddest_nn_free(struct DdestNeuralEstimator *handle);

// Input and output widths of the network.
enum DdestStatus ddest_nn_dims(const struct DdestNeuralEstimator *handle,
                               size_t *input_dim,
                               size_t *output_dim);

// Evaluates the network on one input; `out_len` must equal the output width.
enum DdestStatus ddest_nn_forward(const struct DdestNeuralEstimator *handle,
                                  const double *x,
                                  size_t x_len,
                                  double *out,
                                  size_t out_len);

// Trains in place by per-pair SGD with squared-error cost on `pairs` rows
// of inputs `xs` and targets `thetas` (flat, row-major). Writes the final
// mean training loss to `final_loss` if non-NULL. On failure the handle is
// left unchanged.
enum DdestStatus ddest_nn_train(struct DdestNeuralEstimator *handle,
                                const double *xs,
                                const double *thetas,
                                size_t pairs,
                                double learning_rate,
                                size_t epochs,
                                uint64_t seed,
                                double *final_loss);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DDEST_H */
