#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "driftdet/kernels.hpp"

namespace driftdet::kernels::serial {

void diag_gaussian_log_joint(const Matrix& x, std::span<const double> log_weights, const Matrix& means,
                             const Matrix& variances, Matrix& out) {
  const std::size_t n = x.rows(), k = means.rows(), d = x.cols();
  out = Matrix(n, k);
  std::vector<double> log_norm(k);
  for (std::size_t c = 0; c < k; ++c) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += std::log(2.0 * std::numbers::pi * variances(c, j));
    log_norm[c] = -0.5 * s;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      double q = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = x(i, j) - means(c, j);
        q += diff * diff / variances(c, j);
      }
      out(i, c) = log_weights[c] + log_norm[c] - 0.5 * q;
    }
  }
}

void row_logsumexp(const Matrix& m, std::span<double> out) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    if (!std::isfinite(mx)) {
      out[i] = mx;
      continue;
    }
    double s = 0.0;
    for (double v : row) s += std::exp(v - mx);
    out[i] = mx + std::log(s);
  }
}

void weighted_moments(const Matrix& x, const Matrix& resp, double variance_floor, std::span<double> counts,
                      Matrix& means, Matrix& variances) {
  const std::size_t n = x.rows(), k = resp.cols(), d = x.cols();
  means = Matrix(k, d);
  variances = Matrix(k, d);
  for (std::size_t c = 0; c < k; ++c) {
    double nk = 0.0;
    for (std::size_t i = 0; i < n; ++i) nk += resp(i, c);
    counts[c] = nk;
    const double denom = std::max(nk, 10.0 * std::numeric_limits<double>::epsilon());
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += resp(i, c) * x(i, j);
      const double mu = s / denom;
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double diff = x(i, j) - mu;
        v += resp(i, c) * diff * diff;
      }
      means(c, j) = mu;
      variances(c, j) = std::max(v / denom, variance_floor);
    }
  }
}

void silhouette_samples(const Matrix& x, std::span<const int> labels, int n_clusters, std::span<double> out) {
  const std::size_t n = x.rows();
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n_clusters), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  std::vector<double> dist_sum(static_cast<std::size_t>(n_clusters));
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double s = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double diff = x(i, c) - x(j, c);
        s += diff * diff;
      }
      dist_sum[static_cast<std::size_t>(labels[j])] += std::sqrt(s);
    }
    const auto own = static_cast<std::size_t>(labels[i]);
    if (sizes[own] <= 1) {
      out[i] = 0.0;
      continue;
    }
    const double a = dist_sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (c == own || sizes[c] == 0) continue;
      b = std::min(b, dist_sum[c] / static_cast<double>(sizes[c]));
    }
    if (!std::isfinite(b)) {
      out[i] = 0.0;
      continue;
    }
    const double denom = std::max(a, b);
    out[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
}

void affine(const Matrix& in, std::span<const double> weight, std::span<const double> bias, Matrix& out) {
  const std::size_t rows = in.rows(), in_cols = in.cols(), out_cols = bias.size();
  out = Matrix(rows, out_cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t o = 0; o < out_cols; ++o) {
      double s = bias[o];
      for (std::size_t i = 0; i < in_cols; ++i) s += weight[o * in_cols + i] * in(r, i);
      out(r, o) = s;
    }
  }
}

void affine_input_grad(const Matrix& delta, std::span<const double> weight, Matrix& din) {
  const std::size_t rows = delta.rows(), out_cols = delta.cols();
  const std::size_t in_cols = out_cols == 0 ? 0 : weight.size() / out_cols;
  din = Matrix(rows, in_cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < in_cols; ++i) {
      double s = 0.0;
      for (std::size_t o = 0; o < out_cols; ++o) s += delta(r, o) * weight[o * in_cols + i];
      din(r, i) = s;
    }
  }
}

void accumulate_weight_grad(const Matrix& delta, const Matrix& in, std::span<double> dweight,
                            std::span<double> dbias) {
  const std::size_t rows = delta.rows(), out_cols = delta.cols(), in_cols = in.cols();
  for (std::size_t o = 0; o < out_cols; ++o) {
    for (std::size_t i = 0; i < in_cols; ++i) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += delta(r, o) * in(r, i);
      dweight[o * in_cols + i] += s;
    }
    double sb = 0.0;
    for (std::size_t r = 0; r < rows; ++r) sb += delta(r, o);
    dbias[o] += sb;
  }
}

void cosine_rows(const Matrix& x, std::span<const double> ref, std::span<double> out) {
  double ref_norm = 0.0;
  for (double v : ref) ref_norm += v * v;
  ref_norm = std::sqrt(ref_norm);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double dot = 0.0, norm = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      dot += x(r, c) * ref[c];
      norm += x(r, c) * x(r, c);
    }
    norm = std::sqrt(norm);
    out[r] = (norm > 0.0 && ref_norm > 0.0) ? dot / (norm * ref_norm) : 0.0;
  }
}

}  // namespace driftdet::kernels::serial
