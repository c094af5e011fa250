#include <cstdint>

#include "driftdet/embeddings.hpp"

namespace driftdet {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::NativeSkipgram: return "native-skipgram";
    case BackendKind::VectorFile: return "vector-file";
    case BackendKind::RemoteSentence: return "remote-sentence";
    case BackendKind::RemoteTokenAvg: return "remote-token-avg";
  }
  return "unknown";
}

BackendKind backend_kind_from_string(std::string_view name) {
  for (auto k : {BackendKind::NativeSkipgram, BackendKind::VectorFile, BackendKind::RemoteSentence,
                 BackendKind::RemoteTokenAvg}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::ConfigError, "unknown backend kind '" + std::string(name) + "'");
}

void BackendDescriptor::validate() const {
  if (dim == 0) throw Error(ErrorCode::ConfigError, "backend dim must be positive");
  if (is_remote() && !endpoint) throw Error(ErrorCode::ConfigError, "remote backend requires an endpoint");
  if (!is_remote() && endpoint) throw Error(ErrorCode::ConfigError, "endpoint given for a local backend");
  if (pooling != "mean") throw Error(ErrorCode::ConfigError, "unsupported pooling '" + pooling + "'");
}

WordVectorBackend::WordVectorBackend(BackendKind kind, std::shared_ptr<const WordVectorTable> table)
    : table_(std::move(table)) {
  if (kind != BackendKind::NativeSkipgram && kind != BackendKind::VectorFile) {
    throw Error(ErrorCode::ConfigError, "word-vector backend needs a local kind");
  }
  descriptor_.kind = kind;
  descriptor_.dim = table_->dim();
}

EmbeddingVector WordVectorBackend::embed(const CleanDocument& doc) const { return mean_pool(doc.tokens, *table_); }

BatchEmbedding WordVectorBackend::embed_batch(std::span<const CleanDocument> docs, std::size_t) const {
  BatchEmbedding out;
  out.vectors.resize(docs.size());
  std::vector<std::optional<EmbeddingFailure>> failed(docs.size());
  const auto n = static_cast<std::int64_t>(docs.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      out.vectors[idx] = mean_pool(docs[idx].tokens, *table_);
    } catch (const Error& e) {
      failed[idx] = EmbeddingFailure{idx, e.code(), e.what()};
    }
  }
  for (auto& f : failed) {
    if (f) out.failures.push_back(std::move(*f));
  }
  return out;
}

EmbeddingVector embed_document(const CleanDocument& doc, const EmbeddingBackend& backend) {
  return backend.embed(doc);
}

BatchEmbedding embed_batch(std::span<const CleanDocument> docs, const EmbeddingBackend& backend,
                           std::size_t batch_size) {
  if (batch_size == 0) throw Error(ErrorCode::InvalidArgument, "batch_size must be positive");
  return backend.embed_batch(docs, batch_size);
}

}  // namespace driftdet
