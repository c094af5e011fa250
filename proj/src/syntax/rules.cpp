#include <algorithm>
#include <cstdint>

#include "driftdet/error.hpp"
#include "driftdet/syntax_stats.hpp"

namespace driftdet {

std::string rule_regex_text(const std::array<std::string, 6>& tags) {
  std::string out;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (i) out += "\\S+";
    out += "(" + tags[i] + ")+";
  }
  return out;
}

std::vector<SentenceRule> generate_sentence_rules() {
  std::array<std::string, 6> tags;
  std::copy(kCoarseTags.begin(), kCoarseTags.end(), tags.begin());
  std::sort(tags.begin(), tags.end());
  std::vector<SentenceRule> rules;
  rules.reserve(720);
  int id = 1;
  do {
    rules.push_back({id++, tags, rule_regex_text(tags)});
  } while (std::next_permutation(tags.begin(), tags.end()));
  return rules;
}

bool rule_matches(const SentenceRule& rule, std::span<const std::string> coarse) {
  std::size_t next = 0;
  for (const auto& t : coarse) {
    if (t == rule.tags[next] && ++next == rule.tags.size()) return true;
  }
  return false;
}

std::vector<std::string> coarse_tags(const AnnotatedSentence& sentence) {
  std::vector<std::string> out;
  for (const auto& t : sentence.tokens) {
    if (auto c = coarse_tag_of(t); !c.empty()) out.push_back(std::move(c));
  }
  return out;
}

std::map<int, double> rule_probabilities(std::span<const AnnotatedSentence> corpus,
                                         std::span<const SentenceRule> rules) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "no sentences");
  const std::size_t n = corpus.size(), r = rules.size();
  std::vector<std::uint8_t> hits(n * r, 0);
  const auto sn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < sn; ++i) {
    const auto tags = coarse_tags(corpus[static_cast<std::size_t>(i)]);
    if (tags.size() < 6) continue;
    for (std::size_t k = 0; k < r; ++k) hits[static_cast<std::size_t>(i) * r + k] = rule_matches(rules[k], tags);
  }
  std::map<int, double> out;
  for (std::size_t k = 0; k < r; ++k) {
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += hits[i * r + k];
    out[rules[k].id] = static_cast<double>(count) / static_cast<double>(n);
  }
  return out;
}

}  // namespace driftdet
