#include <algorithm>
#include <cmath>

#include "driftdet/density.hpp"
#include "driftdet/error.hpp"
#include "driftdet/kernels.hpp"

namespace driftdet {

CentroidModel fit_centroid(const Matrix& embeddings) {
  if (embeddings.rows() == 0) throw Error(ErrorCode::EmptyCorpus, "no embeddings to average");
  CentroidModel m;
  m.centroid.assign(embeddings.cols(), 0.0);
  for (std::size_t i = 0; i < embeddings.rows(); ++i) {
    for (std::size_t j = 0; j < embeddings.cols(); ++j) m.centroid[j] += embeddings(i, j);
  }
  for (double& v : m.centroid) v /= static_cast<double>(embeddings.rows());
  round_to_float(m.centroid);
  return m;
}

SimilarityScore score_centroid(const CentroidModel& model, std::span<const double> e) {
  if (e.size() != model.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "embedding width " + std::to_string(e.size()) + " != model dim " + std::to_string(model.dim()));
  }
  double cos = 0.0;
  const Matrix x(1, e.size(), std::vector<double>(e.begin(), e.end()));
  kernels::serial::cosine_rows(x, model.centroid, std::span(&cos, 1));
  return {std::clamp(cos, 0.0, 1.0)};
}

std::size_t model_dim(const DensityModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GmmModel>) {
          return m.dim;
        } else {
          return m.dim();
        }
      },
      model);
}

SimilarityScore score(const DensityModel& model, std::span<const double> e) {
  return std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GmmModel>) {
          return score_gmm(m, e);
        } else if constexpr (std::is_same_v<T, VaeModel>) {
          return score_vae(m, e);
        } else {
          return score_centroid(m, e);
        }
      },
      model);
}

std::vector<SimilarityScore> score_rows(const DensityModel& model, const Matrix& x) {
  if (x.rows() > 0 && x.cols() != model_dim(model)) {
    throw Error(ErrorCode::DimensionMismatch, "embedding width " + std::to_string(x.cols()) + " != model dim " +
                                                  std::to_string(model_dim(model)));
  }
  std::vector<SimilarityScore> out(x.rows());
  const auto n = static_cast<std::int64_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = score(model, x.row(static_cast<std::size_t>(i)));
  }
  return out;
}

}  // namespace driftdet
