#include <chrono>
#include <cstdlib>
#include <ctime>

#include "driftdet/detector.hpp"

namespace driftdet {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Gmm: return "gmm";
    case ModelKind::Vae: return "vae";
    case ModelKind::Centroid: return "centroid";
  }
  return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
  for (auto k : {ModelKind::Gmm, ModelKind::Vae, ModelKind::Centroid}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown model kind '" + std::string(name) + "'");
}

bool PipelineConfig::cleans_for_word_vectors() const { return for_word_vectors.value_or(backend.kind == BackendKind::NativeSkipgram); }

void PipelineConfig::validate() const {
  backend.validate();
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::ConfigError, "threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
  if (backend.kind == BackendKind::VectorFile && !vector_file) {
    throw Error(ErrorCode::ConfigError, "vector-file backend requires vector_file");
  }
  if (batch_size == 0) throw Error(ErrorCode::ConfigError, "batch_size must be positive");
}

std::string creation_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end && *end == '\0') t = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

TrainedPipeline::TrainedPipeline(PipelineConfig config, std::shared_ptr<const EmbeddingBackend> backend,
                                 DensityModel model, TrainingMetadata metadata)
    : config_(std::move(config)), backend_(std::move(backend)), model_(std::move(model)), metadata_(std::move(metadata)) {}

CleanDocument TrainedPipeline::clean(const Document& doc) const {
  return driftdet::clean(doc, config_.cleans_for_word_vectors());
}

DriftVerdict TrainedPipeline::verdict(std::string doc_id, SimilarityScore score, std::optional<ErrorCode> flag) const {
  return {std::move(doc_id), score, is_drifted(score.value, config_.threshold), config_.threshold, flag};
}

std::shared_ptr<const EmbeddingBackend> make_backend(const PipelineConfig& config,
                                                     std::span<const CleanDocument> docs,
                                                     const ProviderOptions& provider) {
  switch (config.backend.kind) {
    case BackendKind::NativeSkipgram: {
      SkipGramOptions opts = config.skipgram;
      opts.dim = config.backend.dim;
      opts.seed = config.seed;
      auto table = std::make_shared<const WordVectorTable>(train_skipgram(docs, opts));
      return std::make_shared<WordVectorBackend>(BackendKind::NativeSkipgram, std::move(table));
    }
    case BackendKind::VectorFile: {
      auto table = std::make_shared<const WordVectorTable>(load_vector_file(*config.vector_file));
      return std::make_shared<WordVectorBackend>(BackendKind::VectorFile, std::move(table));
    }
    case BackendKind::RemoteSentence:
    case BackendKind::RemoteTokenAvg:
      return std::make_shared<RemoteBackend>(config.backend, provider);
  }
  throw Error(ErrorCode::ConfigError, "unknown backend");
}

TrainedPipeline train_pipeline(std::span<const Document> docs, const PipelineConfig& config_in,
                               const ProviderOptions& provider) {
  config_in.validate();
  PipelineConfig config = config_in;
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no training documents");

  TrainingMetadata meta;
  meta.n_documents = docs.size();
  std::vector<CleanDocument> cleaned;
  cleaned.reserve(docs.size());
  for (const auto& d : docs) {
    try {
      cleaned.push_back(driftdet::clean(d, config.cleans_for_word_vectors()));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyAfterCleaning) throw;
      ++meta.dropped_cleaning;
    }
  }
  if (cleaned.empty()) throw Error(ErrorCode::EmptyCorpus, "every training document was empty after cleaning");

  auto backend = make_backend(config, cleaned, provider);
  config.backend.dim = backend->dim();
  const BatchEmbedding batch = backend->embed_batch(cleaned, config.batch_size);
  meta.dropped_embedding = batch.failures.size();
  meta.n_used = batch.succeeded();
  if (meta.n_used == 0) throw Error(ErrorCode::EmptyCorpus, "no training document could be embedded");

  const std::size_t dim = backend->dim();
  Matrix x(meta.n_used, dim);
  std::size_t r = 0;
  for (const auto& v : batch.vectors) {
    if (!v) continue;
    std::copy(v->values.begin(), v->values.end(), x.row(r++).begin());
  }
  meta.dim = dim;
  meta.created_at = creation_timestamp();

  DensityModel model;
  switch (config.model_kind) {
    case ModelKind::Gmm: {
      GmmOptions opts = config.gmm;
      opts.seed = config.seed;
      model = fit_gmm(x, opts);
      break;
    }
    case ModelKind::Vae: {
      VaeOptions opts = config.vae;
      opts.seed = config.seed;
      model = fit_vae(x, opts);
      break;
    }
    case ModelKind::Centroid: model = fit_centroid(x); break;
  }
  return TrainedPipeline(std::move(config), std::move(backend), std::move(model), std::move(meta));
}

std::vector<DriftVerdict> score_clean(const TrainedPipeline& pipe, std::span<const CleanDocument> docs) {
  std::vector<DriftVerdict> out(docs.size());
  if (docs.empty()) return out;
  const BatchEmbedding batch = pipe.backend().embed_batch(docs, pipe.config().batch_size);
  std::vector<std::optional<ErrorCode>> flags(docs.size());
  for (const auto& f : batch.failures) flags[f.index] = f.code;

  const std::size_t dim = pipe.backend().dim();
  Matrix x(batch.succeeded(), dim);
  std::size_t r = 0;
  for (const auto& v : batch.vectors) {
    if (v) std::copy(v->values.begin(), v->values.end(), x.row(r++).begin());
  }
  const auto scores = score_rows(pipe.model(), x);
  r = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (batch.vectors[i]) {
      out[i] = pipe.verdict(docs[i].id, scores[r++]);
    } else {
      out[i] = pipe.verdict(docs[i].id, SimilarityScore{0.0}, flags[i]);
    }
  }
  return out;
}

std::vector<DriftVerdict> score_payloads(const TrainedPipeline& pipe, std::span<const Document> docs) {
  std::vector<DriftVerdict> out(docs.size());
  std::vector<CleanDocument> cleaned;
  std::vector<std::size_t> where;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    try {
      cleaned.push_back(pipe.clean(docs[i]));
      where.push_back(i);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyAfterCleaning) throw;
      out[i] = pipe.verdict(docs[i].id, SimilarityScore{0.0}, ErrorCode::EmptyAfterCleaning);
    }
  }
  auto scored = score_clean(pipe, cleaned);
  for (std::size_t j = 0; j < scored.size(); ++j) out[where[j]] = std::move(scored[j]);
  return out;
}

DriftVerdict score_payload(const TrainedPipeline& pipe, const Document& doc) {
  return score_payloads(pipe, std::span(&doc, 1)).front();
}

}  // namespace driftdet
