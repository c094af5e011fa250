#include "driftdet/config_json.hpp"

#include <algorithm>

namespace driftdet {

using nlohmann::json;

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!j.is_object()) throw Error(ErrorCode::ConfigError, std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::ConfigError, "unknown key '" + key + "' in " + std::string(where));
    }
  }
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out, std::string_view where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ConfigError, std::string(where) + "." + key + " has the wrong type");
  }
}

void read_unsigned(const json& j, const char* key, std::size_t& out, std::string_view where) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_number_unsigned()) {
    throw Error(ErrorCode::ConfigError, std::string(where) + "." + key + " must be a non-negative integer");
  }
  out = j.at(key).get<std::size_t>();
}

}  // namespace

json to_json(const PipelineConfig& c) {
  json backend = {{"kind", to_string(c.backend.kind)}, {"dim", c.backend.dim}, {"pooling", c.backend.pooling}};
  if (c.backend.endpoint) backend["endpoint"] = *c.backend.endpoint;
  json j = {
      {"backend", backend},
      {"model_kind", to_string(c.model_kind)},
      {"threshold", c.threshold},
      {"skipgram",
       {{"window", c.skipgram.window},
        {"negatives", c.skipgram.negatives},
        {"epochs", c.skipgram.epochs},
        {"min_count", c.skipgram.min_count},
        {"learning_rate", c.skipgram.initial_learning_rate}}},
      {"gmm",
       {{"k_min", c.gmm.k_min},
        {"k_max", c.gmm.k_max},
        {"max_iterations", c.gmm.max_iterations},
        {"tolerance", c.gmm.tolerance},
        {"variance_floor", c.gmm.variance_floor},
        {"silhouette_cap", c.gmm.silhouette_cap}}},
      {"vae",
       {{"hidden", c.vae.hidden},
        {"latent", c.vae.latent},
        {"epochs", c.vae.epochs},
        {"batch", c.vae.batch},
        {"learning_rate", c.vae.learning_rate}}},
      {"batch_size", c.batch_size},
      {"seed", c.seed},
  };
  if (c.for_word_vectors) j["for_word_vectors"] = *c.for_word_vectors;
  if (c.vector_file) j["vector_file"] = c.vector_file->string();
  return j;
}

PipelineConfig pipeline_config_from_json(const json& j, PipelineConfig c) {
  reject_unknown_keys(j,
                      {"backend", "model_kind", "threshold", "for_word_vectors", "vector_file", "skipgram", "gmm",
                       "vae", "batch_size", "seed"},
                      "pipeline");
  if (j.contains("backend")) {
    const auto& b = j["backend"];
    reject_unknown_keys(b, {"kind", "dim", "endpoint", "pooling"}, "backend");
    if (b.contains("kind")) {
      std::string kind;
      read(b, "kind", kind, "backend");
      c.backend.kind = backend_kind_from_string(kind);
    }
    read_unsigned(b, "dim", c.backend.dim, "backend");
    if (b.contains("endpoint")) {
      std::string endpoint;
      read(b, "endpoint", endpoint, "backend");
      c.backend.endpoint = endpoint;
    }
    read(b, "pooling", c.backend.pooling, "backend");
  }
  if (j.contains("model_kind")) {
    std::string kind;
    read(j, "model_kind", kind, "pipeline");
    c.model_kind = model_kind_from_string(kind);
  }
  read(j, "threshold", c.threshold, "pipeline");
  if (j.contains("for_word_vectors")) {
    bool v = false;
    read(j, "for_word_vectors", v, "pipeline");
    c.for_word_vectors = v;
  }
  if (j.contains("vector_file")) {
    std::string p;
    read(j, "vector_file", p, "pipeline");
    c.vector_file = p;
  }
  if (j.contains("skipgram")) {
    const auto& s = j["skipgram"];
    reject_unknown_keys(s, {"window", "negatives", "epochs", "min_count", "learning_rate"}, "skipgram");
    read_unsigned(s, "window", c.skipgram.window, "skipgram");
    read_unsigned(s, "negatives", c.skipgram.negatives, "skipgram");
    read_unsigned(s, "epochs", c.skipgram.epochs, "skipgram");
    read_unsigned(s, "min_count", c.skipgram.min_count, "skipgram");
    read(s, "learning_rate", c.skipgram.initial_learning_rate, "skipgram");
  }
  if (j.contains("gmm")) {
    const auto& g = j["gmm"];
    reject_unknown_keys(g, {"k_min", "k_max", "max_iterations", "tolerance", "variance_floor", "silhouette_cap"},
                        "gmm");
    read_unsigned(g, "k_min", c.gmm.k_min, "gmm");
    read_unsigned(g, "k_max", c.gmm.k_max, "gmm");
    read_unsigned(g, "max_iterations", c.gmm.max_iterations, "gmm");
    read(g, "tolerance", c.gmm.tolerance, "gmm");
    read(g, "variance_floor", c.gmm.variance_floor, "gmm");
    read_unsigned(g, "silhouette_cap", c.gmm.silhouette_cap, "gmm");
  }
  if (j.contains("vae")) {
    const auto& v = j["vae"];
    reject_unknown_keys(v, {"hidden", "latent", "epochs", "batch", "learning_rate"}, "vae");
    read_unsigned(v, "hidden", c.vae.hidden, "vae");
    read_unsigned(v, "latent", c.vae.latent, "vae");
    read_unsigned(v, "epochs", c.vae.epochs, "vae");
    read_unsigned(v, "batch", c.vae.batch, "vae");
    read(v, "learning_rate", c.vae.learning_rate, "vae");
  }
  read_unsigned(j, "batch_size", c.batch_size, "pipeline");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw Error(ErrorCode::ConfigError, "pipeline.seed must be unsigned");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  return c;
}

}  // namespace driftdet
