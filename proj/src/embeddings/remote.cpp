#include <httplib.h>

#include <atomic>
#include <cmath>
#include <exception>
#include <json.hpp>
#include <thread>

#include "driftdet/embeddings.hpp"

namespace driftdet {

namespace {

struct ParsedEndpoint {
  std::string scheme_host_port;
  std::string base_path;
};

ParsedEndpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || url.substr(0, scheme_end) != "http") {
    throw Error(ErrorCode::ConfigError, "provider endpoint must be an http:// URL: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedEndpoint p;
  p.scheme_host_port = url.substr(0, path_start);
  p.base_path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!p.base_path.empty() && p.base_path.back() == '/') p.base_path.pop_back();
  return p;
}

std::vector<EmbeddingVector> parse_reply(const std::string& body, std::size_t n_texts, std::size_t expected_dim) {
  nlohmann::json reply;
  try {
    reply = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ProviderError, std::string("malformed provider reply: ") + e.what());
  }
  if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array()) {
    throw Error(ErrorCode::ProviderError, "provider reply lacks a 'vectors' array");
  }
  if (reply.contains("dim") && reply["dim"].is_number_integer() &&
      reply["dim"].get<std::size_t>() != expected_dim) {
    throw Error(ErrorCode::DimensionMismatch, "provider dim " + reply["dim"].dump() + " != expected " +
                                                  std::to_string(expected_dim));
  }
  const auto& vectors = reply["vectors"];
  if (vectors.size() != n_texts) {
    throw Error(ErrorCode::ProviderError, "provider returned " + std::to_string(vectors.size()) +
                                              " vectors for " + std::to_string(n_texts) + " texts");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (!v.is_array() || v.size() != expected_dim) {
      throw Error(ErrorCode::DimensionMismatch, "provider vector of width " + std::to_string(v.size()) +
                                                    ", expected " + std::to_string(expected_dim));
    }
    EmbeddingVector e;
    e.values.reserve(expected_dim);
    for (const auto& x : v) {
      if (!x.is_number()) throw Error(ErrorCode::ProviderError, "non-numeric vector component");
      e.values.push_back(x.get<double>());
    }
    out.push_back(std::move(e));
  }
  return out;
}

const std::string& checked_endpoint(const BackendDescriptor& d) {
  d.validate();
  if (!d.is_remote()) throw Error(ErrorCode::ConfigError, "remote backend needs a remote kind");
  return *d.endpoint;
}

bool all_finite(const EmbeddingVector& v) {
  for (double x : v.values) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

ProviderClient::ProviderClient(std::string endpoint, std::size_t expected_dim, ProviderOptions options)
    : endpoint_(std::move(endpoint)), expected_dim_(expected_dim), options_(options) {
  parse_endpoint(endpoint_);
  if (options_.retry.attempts < 1) options_.retry.attempts = 1;
  if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

std::vector<EmbeddingVector> ProviderClient::embed_texts(std::span<const std::string> texts) const {
  if (texts.empty()) return {};
  const auto ep = parse_endpoint(endpoint_);
  httplib::Client client(ep.scheme_host_port);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_write_timeout(options_.timeout);

  const std::string body = nlohmann::json{{"texts", texts}}.dump();
  const std::string path = ep.base_path + "/embed";
  int last_status = 0;
  std::string last_body;
  auto backoff = options_.retry.initial_backoff;

  for (int attempt = 1; attempt <= options_.retry.attempts; ++attempt) {
    auto res = client.Post(path, body, "application/json");
    if (res && res->status == 200) return parse_reply(res->body, texts.size(), expected_dim_);
    if (res) {
      last_status = res->status;
      last_body = res->body;
    } else {
      last_status = 0;
      last_body = httplib::to_string(res.error());
    }
    if (attempt < options_.retry.attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  Error e(ErrorCode::ProviderError, "status " + std::to_string(last_status) + " after " +
                                        std::to_string(options_.retry.attempts) + " attempts: " + last_body);
  e.status = last_status;
  throw e;
}

RemoteBackend::RemoteBackend(BackendDescriptor descriptor, ProviderOptions options)
    : descriptor_(std::move(descriptor)), client_(checked_endpoint(descriptor_), descriptor_.dim, options) {}

EmbeddingVector RemoteBackend::embed(const CleanDocument& doc) const {
  auto batch = embed_batch(std::span(&doc, 1), 1);
  if (!batch.failures.empty()) throw Error(batch.failures.front().code, batch.failures.front().message);
  return std::move(*batch.vectors.front());
}

BatchEmbedding RemoteBackend::embed_batch(std::span<const CleanDocument> docs, std::size_t batch_size) const {
  BatchEmbedding out;
  out.vectors.resize(docs.size());
  if (docs.empty()) return out;
  if (batch_size == 0) batch_size = 1;

  const std::size_t n_chunks = (docs.size() + batch_size - 1) / batch_size;
  std::vector<std::exception_ptr> errors(n_chunks);
  std::vector<std::vector<std::optional<EmbeddingFailure>>> chunk_failures(n_chunks);
  const bool token_avg = descriptor_.kind == BackendKind::RemoteTokenAvg;

  auto run_chunk = [&](std::size_t chunk) {
    const std::size_t begin = chunk * batch_size;
    const std::size_t end = std::min(docs.size(), begin + batch_size);
    std::vector<std::string> texts;
    std::vector<std::size_t> offsets{0};
    for (std::size_t i = begin; i < end; ++i) {
      if (token_avg) {
        texts.insert(texts.end(), docs[i].tokens.begin(), docs[i].tokens.end());
      } else {
        texts.push_back(docs[i].sentence_text);
      }
      offsets.push_back(texts.size());
    }
    const auto vectors = client_.embed_texts(texts);
    auto& failures = chunk_failures[chunk];
    failures.resize(end - begin);
    for (std::size_t i = begin; i < end; ++i) {
      const std::size_t lo = offsets[i - begin], hi = offsets[i - begin + 1];
      EmbeddingVector pooled;
      pooled.values.assign(descriptor_.dim, 0.0);
      for (std::size_t t = lo; t < hi; ++t) {
        for (std::size_t j = 0; j < descriptor_.dim; ++j) pooled.values[j] += vectors[t].values[j];
      }
      if (hi == lo) {
        failures[i - begin] = EmbeddingFailure{i, ErrorCode::NoRepresentableTokens, "document has no tokens"};
        continue;
      }
      for (double& v : pooled.values) v /= static_cast<double>(hi - lo);
      if (!all_finite(pooled)) {
        failures[i - begin] = EmbeddingFailure{i, ErrorCode::ProviderError, "provider returned non-finite values"};
        continue;
      }
      out.vectors[i] = std::move(pooled);
    }
  };

  const std::size_t workers = std::min(n_chunks, client_.options().max_in_flight);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < n_chunks; c = next++) {
      try {
        run_chunk(c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& chunk : chunk_failures) {
    for (auto& f : chunk) {
      if (f) out.failures.push_back(std::move(*f));
    }
  }
  return out;
}

}  // namespace driftdet
