#pragma once

// Density models over document embeddings and their mapping to a
// similarity score in [0, 1].

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "driftdet/matrix.hpp"

namespace driftdet {

struct SimilarityScore {
  double value = 0.0;

  friend bool operator==(const SimilarityScore&, const SimilarityScore&) = default;
};

// ---------------------------------------------------------------- GMM

struct GmmOptions {
  std::size_t k_min = 2;
  std::size_t k_max = 8;
  std::size_t max_iterations = 200;
  // Convergence on the mean per-point log-likelihood.
  double tolerance = 1e-4;
  double variance_floor = 1e-6;
  std::size_t silhouette_cap = 2000;
  std::uint64_t seed = 42;
};

struct GmmModel {
  std::size_t n_components = 0;
  std::size_t dim = 0;
  std::vector<double> weights;
  Matrix means;      // K x D
  Matrix variances;  // K x D, diagonal covariances
  double train_min = 0.0;
  double train_max = 1.0;
};

struct GmmFitReport {
  struct Candidate {
    std::size_t k = 0;
    double silhouette = 0.0;
    std::size_t iterations = 0;
  };
  std::vector<Candidate> candidates;
  std::size_t selected_k = 0;
  double selected_silhouette = 0.0;
  // Mean per-point log-likelihood at each EM iteration of the selected fit.
  std::vector<double> log_likelihood_trace;
};

/// Fits one EM run per k in [k_min, k_max] and keeps the k with the highest
/// silhouette on hard assignments. Requires N >= 2 * k_max.
GmmModel fit_gmm(const Matrix& embeddings, const GmmOptions& options = {}, GmmFitReport* report = nullptr);

/// Single EM run with a fixed component count (k = 1 allowed). Scale bounds
/// are set from the training data. `trace` receives the mean per-point
/// log-likelihood of every iteration.
GmmModel fit_gmm_fixed(const Matrix& embeddings, std::size_t k, const GmmOptions& options = {},
                       std::vector<double>* trace = nullptr);

/// Hard assignment (argmax responsibility) of each row.
std::vector<int> gmm_assign(const GmmModel& model, const Matrix& x);

/// Mean silhouette over at most `cap` rows, subsampled with `seed`.
double silhouette_score(const Matrix& x, std::span<const int> labels, int n_clusters, std::size_t cap,
                        std::uint64_t seed);

/// log p(e) under the mixture, divided by the dimension.
double gmm_log_likelihood_per_dim(const GmmModel& model, std::span<const double> e);
SimilarityScore score_gmm(const GmmModel& model, std::span<const double> e);
/// Min-max scaling with clamping, shared by training and scoring.
double min_max_scale(double raw, double lo, double hi);

// ---------------------------------------------------------------- VAE

struct VaeOptions {
  std::size_t hidden = 128;
  std::size_t latent = 32;
  std::size_t epochs = 50;
  std::size_t batch = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
};

/// Encoder D -> H (ReLU) -> {mu, logvar} (L each); decoder L -> H (ReLU) -> D.
/// All parameters live in one flat vector; the views index into it.
class VaeModel {
 public:
  VaeModel() = default;
  VaeModel(std::size_t dim, std::size_t hidden, std::size_t latent);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t hidden() const noexcept { return hidden_; }
  std::size_t latent() const noexcept { return latent_; }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }

  struct Layer {
    std::size_t weight_offset, bias_offset, out, in;
    friend bool operator==(const Layer&, const Layer&) = default;
  };
  enum LayerId { EncHidden, EncMu, EncLogvar, DecHidden, DecOut, LayerCount };
  const Layer& layer(LayerId id) const { return layers_[id]; }
  std::span<const double> weight(LayerId id) const;
  std::span<const double> bias(LayerId id) const;

  friend bool operator==(const VaeModel&, const VaeModel&) = default;

 private:
  std::size_t dim_ = 0, hidden_ = 0, latent_ = 0;
  std::vector<double> params_;
  Layer layers_[LayerCount]{};
};

struct VaeLoss {
  double reconstruction = 0.0;
  double kl = 0.0;
  double total() const { return reconstruction + kl; }
};

struct VaeTrainReport {
  std::vector<double> epoch_mean_loss;
};

VaeModel fit_vae(const Matrix& embeddings, const VaeOptions& options = {}, VaeTrainReport* report = nullptr);

/// Mean over rows of (sum_d (x - xhat)^2 + KL) with z = mu + exp(logvar/2) * noise.
/// When `grad` is non-null it receives d(loss)/d(parameters) (same layout).
double vae_batch_loss(const VaeModel& model, const Matrix& x, const Matrix& noise, std::span<double> grad = {});

/// Deterministic per-sample loss (z = mu).
VaeLoss vae_sample_loss(const VaeModel& model, std::span<const double> e);
/// exp(-loss); loss is already normalized by the dimension.
double similarity_from_loss(double loss);
SimilarityScore score_vae(const VaeModel& model, std::span<const double> e);

// ---------------------------------------------------------------- centroid

struct CentroidModel {
  std::vector<double> centroid;
  std::size_t dim() const noexcept { return centroid.size(); }
};

CentroidModel fit_centroid(const Matrix& embeddings);
SimilarityScore score_centroid(const CentroidModel& model, std::span<const double> e);

// ---------------------------------------------------------------- any

using DensityModel = std::variant<GmmModel, VaeModel, CentroidModel>;

std::size_t model_dim(const DensityModel& model);
SimilarityScore score(const DensityModel& model, std::span<const double> e);
/// Scores every row; parallel over rows.
std::vector<SimilarityScore> score_rows(const DensityModel& model, const Matrix& x);

}  // namespace driftdet
