#pragma once

// Training and inference pipelines: corpus -> embeddings -> density model
// -> thresholded verdict, plus on-disk persistence.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftdet/corpus.hpp"
#include "driftdet/density.hpp"
#include "driftdet/embeddings.hpp"

namespace driftdet {

enum class ModelKind { Gmm, Vae, Centroid };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

inline constexpr int kFormatVersion = 1;
inline constexpr double kDefaultThreshold = 0.995;

struct PipelineConfig {
  BackendDescriptor backend;
  ModelKind model_kind = ModelKind::Centroid;
  double threshold = kDefaultThreshold;
  // Stopword removal + stemming before embedding. Unset: on for native
  // skip-gram only; pretrained vectors and remote models see raw tokens.
  std::optional<bool> for_word_vectors;
  // Required for the vector-file backend.
  std::optional<std::filesystem::path> vector_file;
  SkipGramOptions skipgram;
  GmmOptions gmm;
  VaeOptions vae;
  std::size_t batch_size = 32;
  // Overrides the seeds of the skip-gram, GMM and VAE options.
  std::uint64_t seed = 42;

  bool cleans_for_word_vectors() const;
  void validate() const;
};

struct TrainingMetadata {
  std::size_t n_documents = 0;
  std::size_t n_used = 0;
  std::size_t dropped_cleaning = 0;
  std::size_t dropped_embedding = 0;
  std::size_t dim = 0;
  std::string created_at;
  int format_version = kFormatVersion;
};

struct DriftVerdict {
  std::string doc_id;
  SimilarityScore score;
  bool drifted = false;
  double threshold = kDefaultThreshold;
  // Set when the document could not be embedded (scored 0, drifted).
  std::optional<ErrorCode> flag;
};

/// The drift rule: strictly below the threshold.
inline bool is_drifted(double score, double threshold) { return score < threshold; }

class TrainedPipeline {
 public:
  TrainedPipeline(PipelineConfig config, std::shared_ptr<const EmbeddingBackend> backend, DensityModel model,
                  TrainingMetadata metadata);

  const PipelineConfig& config() const noexcept { return config_; }
  const EmbeddingBackend& backend() const noexcept { return *backend_; }
  std::shared_ptr<const EmbeddingBackend> shared_backend() const noexcept { return backend_; }
  const DensityModel& model() const noexcept { return model_; }
  const TrainingMetadata& metadata() const noexcept { return metadata_; }

  CleanDocument clean(const Document& doc) const;
  DriftVerdict verdict(std::string doc_id, SimilarityScore score, std::optional<ErrorCode> flag = {}) const;

 private:
  PipelineConfig config_;
  std::shared_ptr<const EmbeddingBackend> backend_;
  DensityModel model_;
  TrainingMetadata metadata_;
};

TrainedPipeline train_pipeline(std::span<const Document> docs, const PipelineConfig& config,
                               const ProviderOptions& provider = {});

/// Builds the backend a config describes; the native kind trains on `docs`.
std::shared_ptr<const EmbeddingBackend> make_backend(const PipelineConfig& config,
                                                     std::span<const CleanDocument> docs,
                                                     const ProviderOptions& provider = {});

DriftVerdict score_payload(const TrainedPipeline& pipe, const Document& doc);
/// Batched scoring; verdicts in input order.
std::vector<DriftVerdict> score_payloads(const TrainedPipeline& pipe, std::span<const Document> docs);
/// Scores already-cleaned documents; a failed embedding scores 0 with a flag.
std::vector<DriftVerdict> score_clean(const TrainedPipeline& pipe, std::span<const CleanDocument> docs);

void save_pipeline(const TrainedPipeline& pipe, const std::filesystem::path& dir);
/// `endpoint_override` replaces a remote backend's recorded endpoint.
TrainedPipeline load_pipeline(const std::filesystem::path& dir, const ProviderOptions& provider = {},
                              const std::optional<std::string>& endpoint_override = std::nullopt);

/// UTC timestamp, taken from SOURCE_DATE_EPOCH when set.
std::string creation_timestamp();

}  // namespace driftdet
