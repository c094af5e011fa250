#include <algorithm>

#include "driftdet/error.hpp"
#include "driftdet/syntax_stats.hpp"

namespace driftdet {

std::string strip_bio(std::string_view label) {
  if (label.size() > 2 && label[1] == '-' && std::string_view("BIES").find(label[0]) != std::string_view::npos) {
    return std::string(label.substr(2));
  }
  return std::string(label);
}

NerDepStats ner_dep_stats(std::span<const AnnotatedSentence> corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no sentences");
  NerDepStats out;
  std::map<std::string, std::map<std::string, std::uint64_t>> by_ner;
  for (const auto& s : corpus) {
    for (const auto& t : s.tokens) {
      ++out.token_count;
      ++out.dep_freq[t.dep];
      const std::string ner = strip_bio(t.ner);
      if (ner.empty() || ner == "O" || ner == "_") continue;
      ++out.ner_freq[ner];
      ++by_ner[ner][t.dep];
    }
  }
  for (const auto& [ner, deps] : by_ner) {
    std::vector<std::pair<std::string, std::uint64_t>> ranked(deps.begin(), deps.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    auto& top = out.ner_dep_top2[ner];
    for (std::size_t i = 0; i < ranked.size() && i < 2; ++i) top.push_back(ranked[i].first);
  }
  return out;
}

}  // namespace driftdet
