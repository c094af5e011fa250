#include "driftdet/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace driftdet {

StratifiedSplit stratified_split(std::span<const Document> docs, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorCode::InvalidArgument, "split fraction must be in (0, 1)");
  std::map<std::string, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!docs[i].label) throw Error(ErrorCode::UnlabeledDocument, "document '" + docs[i].id + "' has no label");
    classes[*docs[i].label].push_back(i);
  }
  StratifiedSplit out;
  out.split_fraction = fraction;
  std::mt19937_64 rng(seed);
  for (auto& [label, idx] : classes) {
    if (idx.size() < 2) throw Error(ErrorCode::ClassTooSmall, "class '" + label + "' has fewer than 2 documents");
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, idx.size() - 1);
    for (std::size_t k = 0; k < idx.size(); ++k) (k < n_train ? out.train : out.held_out).push_back(docs[idx[k]]);
  }
  return out;
}

double scaled_accuracy(std::size_t n_iid, std::size_t n_ood, std::size_t correct_iid, std::size_t correct_ood) {
  if (n_iid == 0 || n_ood == 0) throw Error(ErrorCode::InvalidArgument, "both sets must be non-empty");
  if (correct_iid > n_iid || correct_ood > n_ood) throw Error(ErrorCode::InvalidArgument, "more correct than total");
  const double iid = static_cast<double>(correct_iid) * static_cast<double>(n_ood) / static_cast<double>(n_iid);
  return (iid + static_cast<double>(correct_ood)) / (2.0 * static_cast<double>(n_ood));
}

EvalResult evaluate_threshold(std::span<const double> iid, std::span<const double> ood, double threshold) {
  EvalResult r;
  r.threshold = threshold;
  r.n_iid = iid.size();
  r.n_ood = ood.size();
  for (double s : iid) r.correct_iid += !is_drifted(s, threshold);
  for (double s : ood) r.correct_ood += is_drifted(s, threshold);
  r.accuracy = scaled_accuracy(r.n_iid, r.n_ood, r.correct_iid, r.correct_ood);
  return r;
}

std::vector<double> candidate_thresholds(std::span<const double> iid, std::span<const double> ood) {
  std::vector<double> t(iid.begin(), iid.end());
  t.insert(t.end(), ood.begin(), ood.end());
  t.push_back(0.0);
  t.push_back(kDefaultThreshold);
  t.push_back(1.0);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

BenchmarkResult sweep_scores(std::vector<double> iid, std::vector<double> ood, std::span<const double> requested) {
  BenchmarkResult r;
  for (double t : candidate_thresholds(iid, ood)) r.sweep.push_back(evaluate_threshold(iid, ood, t));
  r.best = r.sweep.front();
  for (const auto& e : r.sweep) {
    if (e.accuracy > r.best.accuracy) r.best = e;
  }
  r.at_default = evaluate_threshold(iid, ood, kDefaultThreshold);
  for (double t : requested) r.requested.push_back(evaluate_threshold(iid, ood, t));
  r.iid_scores = std::move(iid);
  r.ood_scores = std::move(ood);
  return r;
}

BenchmarkResult run_benchmark(std::span<const Document> iid_docs, std::span<const Document> ood_docs,
                              const PipelineConfig& config, std::span<const double> requested, double fraction,
                              const ProviderOptions& provider) {
  if (iid_docs.empty() || ood_docs.empty()) throw Error(ErrorCode::EmptyCorpus, "both corpora must be non-empty");
  const bool none_labeled =
      std::none_of(iid_docs.begin(), iid_docs.end(), [](const Document& d) { return d.label.has_value(); });
  StratifiedSplit split;
  if (none_labeled) {
    std::vector<Document> single(iid_docs.begin(), iid_docs.end());
    for (auto& d : single) d.label = "all";
    split = stratified_split(single, fraction, config.seed);
  } else {
    split = stratified_split(iid_docs, fraction, config.seed);
  }

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const TrainedPipeline pipe = train_pipeline(split.train, config, provider);
  const auto t1 = clock::now();
  const auto iid_verdicts = score_payloads(pipe, split.held_out);
  const auto ood_verdicts = score_payloads(pipe, ood_docs);
  const auto t2 = clock::now();

  std::vector<double> iid, ood;
  for (const auto& v : iid_verdicts) iid.push_back(v.score.value);
  for (const auto& v : ood_verdicts) ood.push_back(v.score.value);
  BenchmarkResult r = sweep_scores(std::move(iid), std::move(ood), requested);
  r.n_train = split.train.size();
  r.train_seconds = std::chrono::duration<double>(t1 - t0).count();
  r.infer_seconds = std::chrono::duration<double>(t2 - t1).count();
  return r;
}

namespace {

std::vector<EvalResult> csv_rows(const BenchmarkResult& r) {
  if (!r.requested.empty()) return r.requested;
  return {r.best, r.at_default};
}

nlohmann::json result_json(const EvalResult& e) {
  return {{"threshold", e.threshold},     {"accuracy", e.accuracy},         {"n_iid", e.n_iid},
          {"n_ood", e.n_ood},             {"correct_iid", e.correct_iid},   {"correct_ood", e.correct_ood}};
}

}  // namespace

std::string benchmark_csv(const BenchmarkResult& r, const std::string& pair, const PipelineConfig& config) {
  std::ostringstream out;
  out.precision(17);
  out << kBenchmarkCsvHeader << "\n";
  for (const auto& e : csv_rows(r)) {
    out << pair << ',' << to_string(config.backend.kind) << ',' << to_string(config.model_kind) << ','
        << e.threshold << ',' << e.accuracy << ',' << r.train_seconds << ',' << r.infer_seconds << "\n";
  }
  return out.str();
}

nlohmann::json benchmark_json(const BenchmarkResult& r, const std::string& pair, const PipelineConfig& config) {
  nlohmann::json requested = nlohmann::json::array();
  for (const auto& e : r.requested) requested.push_back(result_json(e));
  return {{"schema_version", 1},
          {"pair", pair},
          {"backend", to_string(config.backend.kind)},
          {"model", to_string(config.model_kind)},
          {"n_train", r.n_train},
          {"best", result_json(r.best)},
          {"default", result_json(r.at_default)},
          {"requested", requested},
          {"thresholds_swept", r.sweep.size()},
          {"train_s", r.train_seconds},
          {"infer_s", r.infer_seconds}};
}

}  // namespace driftdet
