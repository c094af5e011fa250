#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "driftdet/density.hpp"
#include "driftdet/error.hpp"
#include "driftdet/kernels.hpp"

namespace driftdet {

namespace {

std::vector<double> log_weights_of(const GmmModel& m) {
  std::vector<double> lw(m.weights.size());
  std::transform(m.weights.begin(), m.weights.end(), lw.begin(), [](double w) { return std::log(w); });
  return lw;
}

// k-means++ seeding: first center uniform, then proportional to squared
// distance from the nearest chosen center.
Matrix seed_means(const Matrix& x, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = x.rows(), d = x.cols();
  Matrix means(k, d);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  for (std::size_t c = 0; c < k; ++c) {
    std::copy(x.row(pick).begin(), x.row(pick).end(), means.row(c).begin());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = x(i, j) - means(c, j);
        s += diff * diff;
      }
      nearest[i] = std::min(nearest[i], s);
      total += nearest[i];
    }
    if (c + 1 == k) break;
    if (total <= 0.0) {
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      continue;
    }
    const double target = std::uniform_real_distribution<double>(0.0, total)(rng);
    double acc = 0.0;
    pick = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += nearest[i];
      if (acc >= target && nearest[i] > 0.0) {
        pick = i;
        break;
      }
    }
  }
  return means;
}

std::vector<double> column_variances(const Matrix& x, double floor) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> var(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x(i, j);
    mean /= static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (x(i, j) - mean) * (x(i, j) - mean);
    var[j] = std::max(s / static_cast<double>(n), floor);
  }
  return var;
}

// Persisted as float32; round now so a reloaded model scores identically.
void round_parameters(GmmModel& m, double floor) {
  round_to_float(m.means.data());
  round_to_float(m.variances.data());
  const auto ffloor = static_cast<float>(floor);
  const double min_var = static_cast<double>(ffloor) < floor
                             ? static_cast<double>(std::nextafter(ffloor, std::numeric_limits<float>::infinity()))
                             : static_cast<double>(ffloor);
  for (double& v : m.variances.data()) v = std::max(v, min_var);
}

void set_scale(GmmModel& m, const Matrix& x) {
  Matrix joint;
  kernels::omp::diag_gaussian_log_joint(x, log_weights_of(m), m.means, m.variances, joint);
  std::vector<double> lse(x.rows());
  kernels::omp::row_logsumexp(joint, lse);
  const double d = static_cast<double>(m.dim);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : lse) {
    lo = std::min(lo, v / d);
    hi = std::max(hi, v / d);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  m.train_min = lo;
  m.train_max = hi;
}

GmmModel run_em(const Matrix& x, std::size_t k, const GmmOptions& options, std::vector<double>* trace,
                std::size_t* iterations) {
  const std::size_t n = x.rows(), d = x.cols();
  std::mt19937_64 rng(options.seed + 0x632BE59BD9B4E019ULL * k);

  GmmModel m;
  m.n_components = k;
  m.dim = d;
  m.weights.assign(k, 1.0 / static_cast<double>(k));
  m.means = seed_means(x, k, rng);
  m.variances = Matrix(k, d);
  const auto global_var = column_variances(x, options.variance_floor);
  for (std::size_t c = 0; c < k; ++c) std::copy(global_var.begin(), global_var.end(), m.variances.row(c).begin());

  Matrix joint, resp(n, k);
  std::vector<double> lse(n), counts(k);
  double previous = -std::numeric_limits<double>::infinity();
  std::size_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    kernels::omp::diag_gaussian_log_joint(x, log_weights_of(m), m.means, m.variances, joint);
    kernels::omp::row_logsumexp(joint, lse);
    double ll = 0.0;
    for (double v : lse) ll += v;
    ll /= static_cast<double>(n);
    if (trace) trace->push_back(ll);
    if (iter > 0 && ll - previous < options.tolerance) break;
    previous = ll;

    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) resp(i, c) = std::exp(joint(i, c) - lse[i]);
    }
    kernels::omp::weighted_moments(x, resp, options.variance_floor, counts, m.means, m.variances);
    for (std::size_t c = 0; c < k; ++c) {
      m.weights[c] = std::max(counts[c], 10.0 * std::numeric_limits<double>::epsilon()) / static_cast<double>(n);
    }
    const double wsum = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
    for (double& w : m.weights) w /= wsum;
  }
  if (iterations) *iterations = iter;
  return m;
}

void check_input(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) throw Error(ErrorCode::InsufficientData, "no embeddings to fit");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite embedding component");
  }
}

}  // namespace

double min_max_scale(double raw, double lo, double hi) { return std::clamp((raw - lo) / (hi - lo), 0.0, 1.0); }

GmmModel fit_gmm_fixed(const Matrix& embeddings, std::size_t k, const GmmOptions& options,
                       std::vector<double>* trace) {
  check_input(embeddings);
  if (k == 0 || embeddings.rows() < k) {
    throw Error(ErrorCode::InsufficientData, std::to_string(embeddings.rows()) + " points for " +
                                                 std::to_string(k) + " components");
  }
  GmmModel m = run_em(embeddings, k, options, trace, nullptr);
  round_parameters(m, options.variance_floor);
  set_scale(m, embeddings);
  return m;
}

std::vector<int> gmm_assign(const GmmModel& model, const Matrix& x) {
  Matrix joint;
  kernels::omp::diag_gaussian_log_joint(x, log_weights_of(model), model.means, model.variances, joint);
  std::vector<int> labels(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto row = joint.row(i);
    labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return labels;
}

double silhouette_score(const Matrix& x, std::span<const int> labels, int n_clusters, std::size_t cap,
                        std::uint64_t seed) {
  std::vector<std::size_t> idx(x.rows());
  std::iota(idx.begin(), idx.end(), 0);
  if (cap > 0 && idx.size() > cap) {
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(cap);
    std::sort(idx.begin(), idx.end());
  }
  Matrix sub(idx.size(), x.cols());
  std::vector<int> sub_labels(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy(x.row(idx[i]).begin(), x.row(idx[i]).end(), sub.row(i).begin());
    sub_labels[i] = labels[idx[i]];
  }
  std::vector<int> distinct(sub_labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  // Silhouette is undefined for a single occupied cluster; rank it last.
  if (distinct.size() < 2) return -1.0;

  std::vector<double> s(idx.size());
  kernels::omp::silhouette_samples(sub, sub_labels, n_clusters, s);
  double total = 0.0;
  for (double v : s) total += v;
  return total / static_cast<double>(s.size());
}

GmmModel fit_gmm(const Matrix& embeddings, const GmmOptions& options, GmmFitReport* report) {
  if (options.k_min == 0 || options.k_min > options.k_max) {
    throw Error(ErrorCode::InvalidArgument, "invalid component range");
  }
  if (embeddings.rows() < 2 * options.k_max) {
    throw Error(ErrorCode::InsufficientData, std::to_string(embeddings.rows()) + " embeddings; need at least " +
                                                 std::to_string(2 * options.k_max) + " for k up to " +
                                                 std::to_string(options.k_max));
  }
  check_input(embeddings);

  GmmFitReport local;
  GmmFitReport& rep = report ? *report : local;
  rep = GmmFitReport{};

  GmmModel best;
  std::vector<double> best_trace;
  double best_sil = -std::numeric_limits<double>::infinity();
  for (std::size_t k = options.k_min; k <= options.k_max; ++k) {
    std::vector<double> trace;
    std::size_t iterations = 0;
    GmmModel m = run_em(embeddings, k, options, &trace, &iterations);
    const auto labels = gmm_assign(m, embeddings);
    const double sil = silhouette_score(embeddings, labels, static_cast<int>(k), options.silhouette_cap, options.seed);
    rep.candidates.push_back({k, sil, iterations});
    if (sil > best_sil) {
      best_sil = sil;
      best = std::move(m);
      best_trace = std::move(trace);
    }
  }
  round_parameters(best, options.variance_floor);
  set_scale(best, embeddings);
  rep.selected_k = best.n_components;
  rep.selected_silhouette = best_sil;
  rep.log_likelihood_trace = std::move(best_trace);
  return best;
}

double gmm_log_likelihood_per_dim(const GmmModel& model, std::span<const double> e) {
  if (e.size() != model.dim) {
    throw Error(ErrorCode::DimensionMismatch, "embedding width " + std::to_string(e.size()) + " != model dim " +
                                                  std::to_string(model.dim));
  }
  const Matrix x(1, e.size(), std::vector<double>(e.begin(), e.end()));
  Matrix joint;
  kernels::serial::diag_gaussian_log_joint(x, log_weights_of(model), model.means, model.variances, joint);
  double lse = 0.0;
  kernels::serial::row_logsumexp(joint, std::span(&lse, 1));
  return lse / static_cast<double>(model.dim);
}

SimilarityScore score_gmm(const GmmModel& model, std::span<const double> e) {
  const double raw = gmm_log_likelihood_per_dim(model, e);
  if (std::isnan(raw)) return {0.0};
  return {min_max_scale(raw, model.train_min, model.train_max)};
}

}  // namespace driftdet
