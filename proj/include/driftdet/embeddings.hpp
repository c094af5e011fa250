#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "driftdet/corpus.hpp"
#include "driftdet/error.hpp"

namespace driftdet {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

/// Immutable word -> vector lookup. Rows are float32, as in every on-disk
/// word-vector format.
class WordVectorTable {
 public:
  WordVectorTable() = default;
  WordVectorTable(std::vector<std::string> words, std::vector<float> matrix, std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  std::span<const float> matrix() const noexcept { return matrix_; }

  std::optional<std::size_t> index_of(const std::string& word) const;
  std::span<const float> row(std::size_t index) const { return {matrix_.data() + index * dim_, dim_}; }
  std::optional<std::span<const float>> find(const std::string& word) const;

 private:
  std::vector<std::string> words_;
  std::vector<float> matrix_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::size_t> index_;
};

struct VectorFileReport {
  std::size_t duplicate_words = 0;
  bool had_header = false;
};

/// Reads word2vec text format ("N D" header) or GloVe format (no header,
/// dimension inferred from the first row). Duplicates keep the first row.
WordVectorTable load_vector_file(const std::filesystem::path& path, VectorFileReport* report = nullptr);
void save_vector_file(const std::filesystem::path& path, const WordVectorTable& table);

struct SkipGramOptions {
  std::size_t dim = 300;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  std::size_t min_count = 2;
  double initial_learning_rate = 0.025;
  std::uint64_t seed = 42;
};

struct SkipGramReport {
  // Negative-sampling loss on a fixed probe set of (center, context, negatives)
  // triples: before training, then after each epoch.
  double initial_loss = 0.0;
  std::vector<double> epoch_loss;
  std::size_t vocabulary_size = 0;
  std::size_t min_count_used = 0;
};

/// Skip-gram with negative sampling. Deterministic for a fixed seed.
WordVectorTable train_skipgram(std::span<const CleanDocument> docs, const SkipGramOptions& options = {},
                               SkipGramReport* report = nullptr);

enum class BackendKind { NativeSkipgram, VectorFile, RemoteSentence, RemoteTokenAvg };

std::string_view to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view name);

struct BackendDescriptor {
  BackendKind kind = BackendKind::NativeSkipgram;
  std::size_t dim = 300;
  std::optional<std::string> endpoint;
  std::string pooling = "mean";

  bool is_remote() const noexcept {
    return kind == BackendKind::RemoteSentence || kind == BackendKind::RemoteTokenAvg;
  }
  // endpoint present iff the kind is remote
  void validate() const;
};

struct EmbeddingFailure {
  std::size_t index = 0;
  ErrorCode code = ErrorCode::NoRepresentableTokens;
  std::string message;
};

struct BatchEmbedding {
  // One slot per input document, in input order; empty where embedding failed.
  std::vector<std::optional<EmbeddingVector>> vectors;
  std::vector<EmbeddingFailure> failures;

  std::size_t succeeded() const noexcept { return vectors.size() - failures.size(); }
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;
  std::size_t dim() const { return descriptor().dim; }

  virtual EmbeddingVector embed(const CleanDocument& doc) const = 0;
  virtual BatchEmbedding embed_batch(std::span<const CleanDocument> docs, std::size_t batch_size) const = 0;
};

/// Mean pooling over in-vocabulary tokens (native and vector-file kinds).
class WordVectorBackend final : public EmbeddingBackend {
 public:
  WordVectorBackend(BackendKind kind, std::shared_ptr<const WordVectorTable> table);

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  const WordVectorTable& table() const { return *table_; }
  std::shared_ptr<const WordVectorTable> shared_table() const { return table_; }

  EmbeddingVector embed(const CleanDocument& doc) const override;
  BatchEmbedding embed_batch(std::span<const CleanDocument> docs, std::size_t batch_size) const override;

 private:
  BackendDescriptor descriptor_;
  std::shared_ptr<const WordVectorTable> table_;
};

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
};

struct ProviderOptions {
  RetryPolicy retry;
  std::size_t max_in_flight = 4;
  std::chrono::seconds timeout{30};
};

/// Client for the JSON-over-HTTP embedding provider:
/// POST <endpoint>/embed {"texts":[...]} -> {"dim":D,"vectors":[[...],...]}.
class ProviderClient {
 public:
  ProviderClient(std::string endpoint, std::size_t expected_dim, ProviderOptions options = {});

  /// One request (with retries). Throws ProviderError after the last failed
  /// attempt and DimensionMismatch when the reply has the wrong width.
  std::vector<EmbeddingVector> embed_texts(std::span<const std::string> texts) const;

  const std::string& endpoint() const noexcept { return endpoint_; }
  const ProviderOptions& options() const noexcept { return options_; }

 private:
  std::string endpoint_;
  std::size_t expected_dim_;
  ProviderOptions options_;
};

/// remote-sentence: one provider vector per document's sentence_text.
/// remote-token-avg: one provider vector per token, averaged; the provider
/// owns sub-word tokenization of each token it receives.
class RemoteBackend final : public EmbeddingBackend {
 public:
  RemoteBackend(BackendDescriptor descriptor, ProviderOptions options = {});

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  EmbeddingVector embed(const CleanDocument& doc) const override;
  BatchEmbedding embed_batch(std::span<const CleanDocument> docs, std::size_t batch_size) const override;

 private:
  BackendDescriptor descriptor_;
  ProviderClient client_;
};

EmbeddingVector embed_document(const CleanDocument& doc, const EmbeddingBackend& backend);
BatchEmbedding embed_batch(std::span<const CleanDocument> docs, const EmbeddingBackend& backend,
                           std::size_t batch_size);

/// Component-wise mean of the in-vocabulary token rows. Throws
/// NoRepresentableTokens when every token is out of vocabulary.
EmbeddingVector mean_pool(std::span<const std::string> tokens, const WordVectorTable& table);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace driftdet
