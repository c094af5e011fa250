#pragma once

// Data-parallel inner loops. Every kernel exists twice with identical
// signatures: `serial` is the plain reference used by tests, `omp` is the
// OpenMP version the library calls. Both accumulate every output element in
// the same order, so results agree bit for bit at any thread count.

#include <span>

#include "driftdet/matrix.hpp"

namespace driftdet::kernels {

#define DRIFTDET_KERNEL_DECLS                                                                      \
  /* out(n,k) = log w_k + log N(x_n | mean_k, diag(var_k)); out is N x K. */                       \
  void diag_gaussian_log_joint(const Matrix& x, std::span<const double> log_weights,               \
                               const Matrix& means, const Matrix& variances, Matrix& out);         \
  /* out[n] = log sum_k exp(m(n,k)) */                                                             \
  void row_logsumexp(const Matrix& m, std::span<double> out);                                      \
  /* Weighted first and second moments for the diagonal-GMM M-step. resp is N x K.                 \
     Writes counts[k] = sum_n resp(n,k), means and floored variances (K x D). */                    \
  void weighted_moments(const Matrix& x, const Matrix& resp, double variance_floor,                \
                        std::span<double> counts, Matrix& means, Matrix& variances);               \
  /* Per-point silhouette values on Euclidean distance; singleton clusters score 0. */            \
  void silhouette_samples(const Matrix& x, std::span<const int> labels, int n_clusters,            \
                          std::span<double> out);                                                  \
  /* out = in * W^T + b, W is (out_cols x in_cols) row-major. */                                   \
  void affine(const Matrix& in, std::span<const double> weight, std::span<const double> bias,      \
              Matrix& out);                                                                        \
  /* din = delta * W */                                                                            \
  void affine_input_grad(const Matrix& delta, std::span<const double> weight, Matrix& din);        \
  /* dW += delta^T * in, db += column sums of delta. */                                            \
  void accumulate_weight_grad(const Matrix& delta, const Matrix& in, std::span<double> dweight,    \
                              std::span<double> dbias);                                            \
  /* out[n] = cos(x_n, ref), 0 when either norm is 0. */                                           \
  void cosine_rows(const Matrix& x, std::span<const double> ref, std::span<double> out);

namespace serial {
DRIFTDET_KERNEL_DECLS
}  // namespace serial

namespace omp {
DRIFTDET_KERNEL_DECLS
}  // namespace omp

#undef DRIFTDET_KERNEL_DECLS

}  // namespace driftdet::kernels
