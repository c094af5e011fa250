#include <fstream>
#include <sstream>

#include "driftdet/cli.hpp"
#include "driftdet/config_json.hpp"

namespace driftdet {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

CorpusSource parse_source(const json& j, const char* where) {
  reject_unknown_keys(j, {"format", "text_column", "label_column", "id_column"}, where);
  CorpusSource s;
  try {
    if (j.contains("format")) {
      const auto f = j["format"].get<std::string>();
      if (f == "plain") {
        s.format = CorpusFormat::PlainLines;
      } else if (f == "csv") {
        s.format = CorpusFormat::Csv;
      } else {
        throw Error(ErrorCode::ConfigError, std::string(where) + ".format must be 'plain' or 'csv'");
      }
    }
    if (j.contains("text_column")) s.text_column = j["text_column"].get<std::string>();
    if (j.contains("label_column")) s.label_column = j["label_column"].get<std::string>();
    if (j.contains("id_column")) s.id_column = j["id_column"].get<std::string>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ConfigError, std::string(where) + " has a value of the wrong type");
  }
  return s;
}

std::optional<fs::path> path_at(const json& j, const char* key, const fs::path& base) {
  if (!j.contains(key)) return std::nullopt;
  if (!j[key].is_string()) throw Error(ErrorCode::ConfigError, std::string("paths.") + key + " must be a string");
  fs::path p = j[key].get<std::string>();
  return p.is_relative() && !base.empty() ? base / p : p;
}

}  // namespace

RunConfig parse_run_config(const json& j, const fs::path& base) {
  reject_unknown_keys(j, {"pipeline", "corpus", "payload", "paths", "stats", "eval", "provider"}, "config");
  RunConfig c;
  try {
    if (j.contains("pipeline")) {
      c.pipeline = pipeline_config_from_json(j["pipeline"]);
      if (c.pipeline.vector_file && c.pipeline.vector_file->is_relative() && !base.empty()) {
        c.pipeline.vector_file = base / *c.pipeline.vector_file;
      }
    }
    if (j.contains("corpus")) c.corpus = parse_source(j["corpus"], "corpus");
    if (j.contains("payload")) c.payload = parse_source(j["payload"], "payload");
    if (j.contains("paths")) {
      const auto& p = j["paths"];
      reject_unknown_keys(p, {"train_corpus", "payload", "model_dir", "csv_out", "json_out", "chunker"}, "paths");
      c.train_corpus = path_at(p, "train_corpus", base);
      c.payload_path = path_at(p, "payload", base);
      c.model_dir = path_at(p, "model_dir", base);
      c.csv_out = path_at(p, "csv_out", base);
      c.json_out = path_at(p, "json_out", base);
      c.chunker = path_at(p, "chunker", base);
    }
    if (j.contains("stats")) {
      const auto& s = j["stats"];
      reject_unknown_keys(s, {"new_pattern", "rule_train_max", "rule_payload_min", "top_patterns"}, "stats");
      c.stats.new_pattern = s.value("new_pattern", c.stats.new_pattern);
      c.stats.rule_train_max = s.value("rule_train_max", c.stats.rule_train_max);
      c.stats.rule_payload_min = s.value("rule_payload_min", c.stats.rule_payload_min);
      c.stats.top_patterns = s.value("top_patterns", c.stats.top_patterns);
    }
    if (j.contains("eval")) {
      const auto& e = j["eval"];
      reject_unknown_keys(e, {"thresholds", "split_fraction", "pair"}, "eval");
      c.thresholds = e.value("thresholds", c.thresholds);
      c.split_fraction = e.value("split_fraction", c.split_fraction);
      c.pair = e.value("pair", c.pair);
    }
    if (j.contains("provider")) {
      const auto& p = j["provider"];
      reject_unknown_keys(p, {"attempts", "initial_backoff_ms", "max_in_flight", "timeout_s"}, "provider");
      c.provider.retry.attempts = p.value("attempts", c.provider.retry.attempts);
      c.provider.retry.initial_backoff =
          std::chrono::milliseconds(p.value("initial_backoff_ms", c.provider.retry.initial_backoff.count()));
      c.provider.max_in_flight = p.value("max_in_flight", c.provider.max_in_flight);
      c.provider.timeout = std::chrono::seconds(p.value("timeout_s", c.provider.timeout.count()));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("config value of the wrong type: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return parse_run_config(j, path.parent_path());
}

}  // namespace driftdet
