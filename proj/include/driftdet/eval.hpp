#pragma once

// Stratified in-distribution / out-of-distribution evaluation.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftdet/detector.hpp"

namespace driftdet {

struct StratifiedSplit {
  std::vector<Document> train;
  std::vector<Document> held_out;
  double split_fraction = 0.8;
};

/// Per class: seeded shuffle, then the first round(f * n) documents train.
StratifiedSplit stratified_split(std::span<const Document> docs, double fraction = 0.8, std::uint64_t seed = 42);

/// (correct_iid * n_ood / n_iid + correct_ood) / (2 * n_ood)
double scaled_accuracy(std::size_t n_iid, std::size_t n_ood, std::size_t correct_iid, std::size_t correct_ood);

struct EvalResult {
  std::size_t n_iid = 0, n_ood = 0, correct_iid = 0, correct_ood = 0;
  double accuracy = 0.0;
  double threshold = 0.0;
};

/// In-distribution scores are correct when not drifted, OOD when drifted.
EvalResult evaluate_threshold(std::span<const double> iid_scores, std::span<const double> ood_scores,
                              double threshold);

/// Every distinct score plus 0, the default threshold and 1, ascending.
std::vector<double> candidate_thresholds(std::span<const double> iid_scores, std::span<const double> ood_scores);

struct BenchmarkResult {
  std::vector<EvalResult> sweep;   // one per candidate threshold
  EvalResult best;                 // highest accuracy; first threshold on ties
  EvalResult at_default;           // threshold 0.995
  std::vector<EvalResult> requested;
  std::vector<double> iid_scores, ood_scores;
  std::size_t n_train = 0;
  double train_seconds = 0.0;
  double infer_seconds = 0.0;
};

BenchmarkResult sweep_scores(std::vector<double> iid_scores, std::vector<double> ood_scores,
                             std::span<const double> requested = {});

/// Splits `iid_docs` (stratified by label; all-unlabeled input is one
/// stratum), trains on the train part, scores held-out and OOD documents.
BenchmarkResult run_benchmark(std::span<const Document> iid_docs, std::span<const Document> ood_docs,
                              const PipelineConfig& config, std::span<const double> requested = {},
                              double fraction = 0.8, const ProviderOptions& provider = {});

inline constexpr std::string_view kBenchmarkCsvHeader = "pair,backend,model,threshold,accuracy,train_s,infer_s";

/// Rows for the requested thresholds, or best + default when none were given.
std::string benchmark_csv(const BenchmarkResult& result, const std::string& pair, const PipelineConfig& config);
nlohmann::json benchmark_json(const BenchmarkResult& result, const std::string& pair, const PipelineConfig& config);

}  // namespace driftdet
