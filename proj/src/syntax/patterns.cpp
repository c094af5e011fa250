#include <algorithm>
#include <set>

#include "driftdet/error.hpp"
#include "driftdet/syntax_stats.hpp"

namespace driftdet {

double PatternTable::probability(const std::string& pattern) const {
  const auto it = patterns.find(pattern);
  return it == patterns.end() ? 0.0 : it->second.probability;
}

std::vector<std::string> verb_windows(const ChunkedSentence& sentence) {
  const auto& u = sentence.units;
  std::vector<std::string> out;
  for (std::size_t v = 0; v < u.size(); ++v) {
    if (!is_verb_tag(u[v])) continue;
    const std::size_t lo = v >= 2 ? v - 2 : 0;
    const std::size_t hi = std::min(u.size() - 1, v + 2);
    std::string pattern;
    for (std::size_t i = lo; i <= hi; ++i) pattern += "[" + (is_verb_tag(u[i]) ? std::string("VB") : u[i]) + "]";
    out.push_back(std::move(pattern));
  }
  return out;
}

PatternTable pattern_table(std::span<const ChunkedSentence> sentences) {
  PatternTable table;
  for (const auto& s : sentences) {
    for (auto& p : verb_windows(s)) {
      ++table.patterns[p].count;
      ++table.total;
    }
  }
  for (auto& [_, e] : table.patterns) {
    e.probability = static_cast<double>(e.count) / static_cast<double>(table.total);
  }
  return table;
}

PatternTable verb_neighbourhood_patterns(std::span<const AnnotatedSentence> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no sentences");
  std::vector<ChunkedSentence> chunked;
  chunked.reserve(corpus.size());
  for (const auto& s : corpus) chunked.push_back(chunk_np(s));
  return pattern_table(chunked);
}

PatternComparison compare_patterns(const PatternTable& train, const PatternTable& payload, double new_threshold,
                                   std::size_t top_n) {
  PatternComparison out;
  std::set<std::string> all;
  for (const auto& [p, _] : train.patterns) all.insert(p);
  for (const auto& [p, _] : payload.patterns) all.insert(p);

  std::vector<PatternRow> rows;
  for (const auto& p : all) {
    PatternRow row{p, train.probability(p), payload.probability(p), false};
    const bool in_payload = payload.patterns.count(p) > 0;
    // Rare in training and more frequent in the payload.
    row.is_new = in_payload && row.train < new_threshold && row.payload > row.train;
    if (in_payload && train.patterns.count(p)) out.common.push_back(row);
    if (row.is_new) out.new_patterns.push_back(row);
    rows.push_back(std::move(row));
  }
  std::stable_sort(out.new_patterns.begin(), out.new_patterns.end(),
                   [](const PatternRow& a, const PatternRow& b) { return a.payload > b.payload; });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const PatternRow& a, const PatternRow& b) { return a.train + a.payload > b.train + b.payload; });
  if (rows.size() > top_n) rows.resize(top_n);
  out.top = std::move(rows);
  return out;
}

}  // namespace driftdet
