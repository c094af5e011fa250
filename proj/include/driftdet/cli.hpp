#pragma once

// The `driftdet` command line: train, score, explain, stats, eval.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftdet/detector.hpp"
#include "driftdet/syntax_stats.hpp"

namespace driftdet {

struct RunConfig {
  PipelineConfig pipeline;
  CorpusSource corpus;   // training / in-distribution corpus
  CorpusSource payload;  // payload / out-of-distribution corpus
  std::optional<std::filesystem::path> train_corpus;
  std::optional<std::filesystem::path> payload_path;
  std::optional<std::filesystem::path> model_dir;
  std::optional<std::filesystem::path> csv_out;
  std::optional<std::filesystem::path> json_out;
  std::optional<std::filesystem::path> chunker;
  StatsThresholds stats;
  std::vector<double> thresholds;
  double split_fraction = 0.8;
  std::string pair = "iid-vs-ood";
  ProviderOptions provider;
};

/// Strict: unknown keys raise ConfigError. Relative paths resolve against
/// `base_dir`.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (args exclude the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal that round-trips the double.
std::string format_score(double value);

}  // namespace driftdet
