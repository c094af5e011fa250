#include <algorithm>
#include <array>
#include <map>

#include "driftdet/syntax_stats.hpp"

namespace driftdet {

namespace {

const std::map<std::string_view, std::string_view>& upos_to_ptb() {
  static const std::map<std::string_view, std::string_view> table = {
      {"ADJ", "JJ"},   {"ADP", "IN"},   {"ADV", "RB"},  {"AUX", "VB"},   {"CCONJ", "CC"}, {"DET", "DT"},
      {"INTJ", "UH"},  {"NOUN", "NN"},  {"NUM", "CD"},  {"PART", "RP"},  {"PRON", "PRP"}, {"PROPN", "NNP"},
      {"PUNCT", "."},  {"SCONJ", "IN"}, {"SYM", "SYM"}, {"VERB", "VB"},  {"X", "FW"},
  };
  return table;
}

bool is_noun(std::string_view t) { return t == "NN" || t == "NNS" || t == "NNP" || t == "NNPS"; }
bool is_adj(std::string_view t) { return t == "JJ" || t == "JJR" || t == "JJS"; }

}  // namespace

std::string ptb_tag_of(const AnnotatedToken& token) {
  const auto& map = upos_to_ptb();
  if (!token.ptb_tag.empty() && token.ptb_tag != "_" && !map.count(token.ptb_tag)) return token.ptb_tag;
  if (auto it = map.find(token.upos); it != map.end()) return std::string(it->second);
  if (auto it = map.find(token.ptb_tag); it != map.end()) return std::string(it->second);
  return token.ptb_tag.empty() ? token.upos : token.ptb_tag;
}

bool is_verb_tag(std::string_view t) {
  static constexpr std::array<std::string_view, 8> verbs = {"VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "VERB", "AUX"};
  return std::find(verbs.begin(), verbs.end(), t) != verbs.end();
}

std::string coarse_tag_of(const AnnotatedToken& token) {
  const std::string_view u = token.upos;
  if (u == "NOUN" || u == "PROPN") return "NOUN";
  if (u == "VERB" || u == "AUX") return "VERB";
  if (u == "PRON" || u == "ADV" || u == "ADJ" || u == "DET") return std::string(u);
  if (!u.empty() && u != "_") return "";
  const std::string p = token.ptb_tag;
  if (p.rfind("NN", 0) == 0) return "NOUN";
  if (p.rfind("VB", 0) == 0 || p == "MD") return "VERB";
  if (p == "PRP" || p == "PRP$" || p == "WP" || p == "WP$") return "PRON";
  if (p.rfind("RB", 0) == 0 || p == "WRB") return "ADV";
  if (p.rfind("JJ", 0) == 0) return "ADJ";
  if (p == "DT" || p == "PDT" || p == "WDT") return "DET";
  return "";
}

ChunkedSentence chunk_np(std::span<const std::string> tags) {
  ChunkedSentence out;
  std::size_t i = 0;
  while (i < tags.size()) {
    std::size_t j = i;
    if (tags[j] == "DT") ++j;
    while (j < tags.size() && is_adj(tags[j])) ++j;
    std::size_t k = j;
    while (k < tags.size() && is_noun(tags[k])) ++k;
    if (k > j) {
      out.units.emplace_back("NP");
      i = k;
    } else {
      out.units.push_back(tags[i]);
      ++i;
    }
  }
  return out;
}

ChunkedSentence chunk_np(const AnnotatedSentence& sentence) {
  std::vector<std::string> tags;
  tags.reserve(sentence.tokens.size());
  for (const auto& t : sentence.tokens) tags.push_back(ptb_tag_of(t));
  return chunk_np(tags);
}

}  // namespace driftdet
