#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "driftdet/kernels.hpp"

namespace driftdet::kernels::omp {

void diag_gaussian_log_joint(const Matrix& x, std::span<const double> log_weights, const Matrix& means,
                             const Matrix& variances, Matrix& out) {
  const auto n = static_cast<std::int64_t>(x.rows());
  const std::size_t k = means.rows(), d = x.cols();
  out = Matrix(x.rows(), k);
  std::vector<double> log_norm(k);
  for (std::size_t c = 0; c < k; ++c) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += std::log(2.0 * std::numbers::pi * variances(c, j));
    log_norm[c] = -0.5 * s;
  }
  const double* px = x.data().data();
  const double* pm = means.data().data();
  const double* pv = variances.data().data();
  double* po = out.data().data();
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double* xi = px + static_cast<std::size_t>(i) * d;
    for (std::size_t c = 0; c < k; ++c) {
      const double* mc = pm + c * d;
      const double* vc = pv + c * d;
      double q = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = xi[j] - mc[j];
        q += diff * diff / vc[j];
      }
      po[static_cast<std::size_t>(i) * k + c] = log_weights[c] + log_norm[c] - 0.5 * q;
    }
  }
}

void row_logsumexp(const Matrix& m, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(m.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto row = m.row(static_cast<std::size_t>(i));
    const double mx = *std::max_element(row.begin(), row.end());
    if (!std::isfinite(mx)) {
      out[static_cast<std::size_t>(i)] = mx;
      continue;
    }
    double s = 0.0;
    for (double v : row) s += std::exp(v - mx);
    out[static_cast<std::size_t>(i)] = mx + std::log(s);
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
  }
  const auto cells = static_cast<std::int64_t>(k * d);
#pragma omp parallel for schedule(static)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const std::size_t c = static_cast<std::size_t>(cell) / d;
    const std::size_t j = static_cast<std::size_t>(cell) % d;
    const double denom = std::max(counts[c], 10.0 * std::numeric_limits<double>::epsilon());
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

void silhouette_samples(const Matrix& x, std::span<const int> labels, int n_clusters, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(x.rows());
  const auto nc = static_cast<std::size_t>(n_clusters);
  std::vector<std::size_t> sizes(nc, 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
#pragma omp parallel
  {
    std::vector<double> dist_sum(nc);
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t ii = 0; ii < n; ++ii) {
      const auto i = static_cast<std::size_t>(ii);
      std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
      const auto xi = x.row(i);
      for (std::size_t j = 0; j < x.rows(); ++j) {
        if (i == j) continue;
        const auto xj = x.row(j);
        double s = 0.0;
        for (std::size_t c = 0; c < x.cols(); ++c) {
          const double diff = xi[c] - xj[c];
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
      for (std::size_t c = 0; c < nc; ++c) {
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
}

void affine(const Matrix& in, std::span<const double> weight, std::span<const double> bias, Matrix& out) {
  const std::size_t in_cols = in.cols(), out_cols = bias.size();
  out = Matrix(in.rows(), out_cols);
  const auto cells = static_cast<std::int64_t>(in.rows() * out_cols);
#pragma omp parallel for schedule(static)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const std::size_t r = static_cast<std::size_t>(cell) / out_cols;
    const std::size_t o = static_cast<std::size_t>(cell) % out_cols;
    const double* w = weight.data() + o * in_cols;
    const auto x = in.row(r);
    double s = bias[o];
    for (std::size_t i = 0; i < in_cols; ++i) s += w[i] * x[i];
    out(r, o) = s;
  }
}

void affine_input_grad(const Matrix& delta, std::span<const double> weight, Matrix& din) {
  const std::size_t out_cols = delta.cols();
  const std::size_t in_cols = out_cols == 0 ? 0 : weight.size() / out_cols;
  din = Matrix(delta.rows(), in_cols);
  const auto cells = static_cast<std::int64_t>(delta.rows() * in_cols);
#pragma omp parallel for schedule(static)
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const std::size_t r = static_cast<std::size_t>(cell) / in_cols;
    const std::size_t i = static_cast<std::size_t>(cell) % in_cols;
    double s = 0.0;
    for (std::size_t o = 0; o < out_cols; ++o) s += delta(r, o) * weight[o * in_cols + i];
    din(r, i) = s;
  }
}

void accumulate_weight_grad(const Matrix& delta, const Matrix& in, std::span<double> dweight,
                            std::span<double> dbias) {
  const std::size_t rows = delta.rows(), out_cols = delta.cols(), in_cols = in.cols();
  const auto n_out = static_cast<std::int64_t>(out_cols);
#pragma omp parallel for schedule(static)
  for (std::int64_t oo = 0; oo < n_out; ++oo) {
    const auto o = static_cast<std::size_t>(oo);
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
  const auto n = static_cast<std::int64_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t rr = 0; rr < n; ++rr) {
    const auto row = x.row(static_cast<std::size_t>(rr));
    double dot = 0.0, norm = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      dot += row[c] * ref[c];
      norm += row[c] * row[c];
    }
    norm = std::sqrt(norm);
    out[static_cast<std::size_t>(rr)] = (norm > 0.0 && ref_norm > 0.0) ? dot / (norm * ref_norm) : 0.0;
  }
}

}  // namespace driftdet::kernels::omp
