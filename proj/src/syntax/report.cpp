#include <cstdio>
#include <set>
#include <sstream>

#include "driftdet/syntax_stats.hpp"

namespace driftdet {

using nlohmann::json;

DatasetStats compute_stats(std::span<const AnnotatedSentence> corpus, std::span<const SentenceRule> rules,
                           const BigramChunker* chunker) {
  DatasetStats s;
  s.sentence_count = corpus.size();
  s.verb_patterns = verb_neighbourhood_patterns(corpus);
  s.rule_probs = rule_probabilities(corpus, rules);
  s.ner_dep = ner_dep_stats(corpus);
  if (chunker) s.chunk_density = chunk_density(*chunker, corpus);
  return s;
}

namespace {

std::vector<ShareDelta> share_deltas(const std::map<std::string, std::uint64_t>& train, std::uint64_t train_total,
                                     const std::map<std::string, std::uint64_t>& payload,
                                     std::uint64_t payload_total) {
  auto share = [](const std::map<std::string, std::uint64_t>& m, const std::string& k, std::uint64_t total) {
    const auto it = m.find(k);
    return it == m.end() || total == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
  };
  std::set<std::string> tags;
  for (const auto& [k, _] : train) tags.insert(k);
  for (const auto& [k, _] : payload) tags.insert(k);
  std::vector<ShareDelta> out;
  for (const auto& t : tags) {
    const double a = share(train, t, train_total), b = share(payload, t, payload_total);
    out.push_back({t, a, b, b - a});
  }
  return out;
}

double passive_share(const NerDepStats& s) {
  if (s.token_count == 0) return 0.0;
  std::uint64_t n = 0;
  for (const char* rel : {"nsubjpass", "nsubj:pass"}) {
    if (auto it = s.dep_freq.find(rel); it != s.dep_freq.end()) n += it->second;
  }
  return static_cast<double>(n) / static_cast<double>(s.token_count);
}

std::string percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f %%", 100.0 * p);
  return buf;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string bracket_list(const std::vector<std::string>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out + "]";
}

json pattern_rows(const std::vector<PatternRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"pattern", r.pattern}, {"train", r.train}, {"payload", r.payload}, {"new", r.is_new}});
  }
  return out;
}

json share_rows(const std::vector<ShareDelta>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    out.push_back({{"tag", r.tag}, {"train", r.train}, {"payload", r.payload}, {"delta", r.delta}});
  }
  return out;
}

json density_json(const ChunkDensity& d) {
  return {{"np_per_sentence", d.np_per_sentence},
          {"vp_per_sentence", d.vp_per_sentence},
          {"np_chunks", d.np_chunks},
          {"vp_chunks", d.vp_chunks},
          {"sentences", d.sentences}};
}

}  // namespace

DriftStatisticsReport compare_stats(const DatasetStats& train, const DatasetStats& payload,
                                    std::span<const SentenceRule> rules, const StatsThresholds& thr) {
  DriftStatisticsReport r;
  r.train_sentences = train.sentence_count;
  r.payload_sentences = payload.sentence_count;
  r.patterns = compare_patterns(train.verb_patterns, payload.verb_patterns, thr.new_pattern, thr.top_patterns);

  for (const auto& rule : rules) {
    const auto t = train.rule_probs.find(rule.id);
    const auto p = payload.rule_probs.find(rule.id);
    const double tp = t == train.rule_probs.end() ? 0.0 : t->second;
    const double pp = p == payload.rule_probs.end() ? 0.0 : p->second;
    if (tp < thr.rule_train_max && pp >= thr.rule_payload_min) r.new_rules.push_back({rule.id, rule.regex_text, tp, pp});
  }

  r.ner_shares = share_deltas(train.ner_dep.ner_freq, train.ner_dep.token_count, payload.ner_dep.ner_freq,
                              payload.ner_dep.token_count);
  r.dep_shares = share_deltas(train.ner_dep.dep_freq, train.ner_dep.token_count, payload.ner_dep.dep_freq,
                              payload.ner_dep.token_count);
  r.passive_delta = passive_share(payload.ner_dep) - passive_share(train.ner_dep);

  for (const auto& [ner, top] : payload.ner_dep.ner_dep_top2) {
    const auto it = train.ner_dep.ner_dep_top2.find(ner);
    const std::vector<std::string> train_top = it == train.ner_dep.ner_dep_top2.end() ? std::vector<std::string>{}
                                                                                       : it->second;
    if (top.empty()) continue;
    if (std::find(train_top.begin(), train_top.end(), top.front()) == train_top.end()) {
      r.ner_dep_mismatches.push_back({ner, top, train_top});
    }
  }

  if (train.chunk_density && payload.chunk_density) {
    r.train_chunks = train.chunk_density;
    r.payload_chunks = payload.chunk_density;
  } else {
    r.notes.emplace_back("chunk density skipped: no chunker training file");
  }
  return r;
}

json report_json(const DriftStatisticsReport& r) {
  json rules = json::array();
  for (const auto& row : r.new_rules) {
    rules.push_back({{"id", row.id}, {"rule", row.regex_text}, {"train", row.train}, {"payload", row.payload}});
  }
  json mismatches = json::array();
  for (const auto& m : r.ner_dep_mismatches) {
    mismatches.push_back({{"ner", m.ner}, {"payload_top2", m.payload_top2}, {"train_top2", m.train_top2}});
  }
  json j = {
      {"schema_version", 1},
      {"train_sentences", r.train_sentences},
      {"payload_sentences", r.payload_sentences},
      {"verb_patterns",
       {{"common", pattern_rows(r.patterns.common)},
        {"new", pattern_rows(r.patterns.new_patterns)},
        {"top", pattern_rows(r.patterns.top)}}},
      {"new_sentence_rules", rules},
      {"ner_shares", share_rows(r.ner_shares)},
      {"dep_shares", share_rows(r.dep_shares)},
      {"passive_delta", r.passive_delta},
      {"ner_dep_mismatches", mismatches},
      {"notes", r.notes},
  };
  if (r.train_chunks && r.payload_chunks) {
    j["chunk_density"] = {{"train", density_json(*r.train_chunks)}, {"payload", density_json(*r.payload_chunks)}};
  } else {
    j["chunk_density"] = nullptr;
  }
  return j;
}

std::string report_text(const DriftStatisticsReport& r) {
  std::ostringstream out;
  out << "Drift Statistics (train: " << r.train_sentences << " sentences, payload: " << r.payload_sentences
      << " sentences)\n\n";

  out << "1) Verb neighbourhood patterns\n";
  if (r.patterns.new_patterns.empty()) {
    out << "   no new patterns\n";
  } else {
    out << "   Pattern                                  Likelihood in train   Likelihood in payload\n";
    for (const auto& row : r.patterns.new_patterns) {
      char line[256];
      std::snprintf(line, sizeof line, "   %-40s %-21s %s\n", row.pattern.c_str(), percent(row.train).c_str(),
                    percent(row.payload).c_str());
      out << line;
    }
  }
  out << "   Top patterns (train / payload):\n";
  for (const auto& row : r.patterns.top) {
    char line[256];
    std::snprintf(line, sizeof line, "   %-40s %-21s %s%s\n", row.pattern.c_str(), percent(row.train).c_str(),
                  percent(row.payload).c_str(), row.is_new ? "  new" : "");
    out << line;
  }

  out << "\n2) Sentence rules\n";
  if (r.new_rules.empty()) {
    out << "   no new sentence rules\n";
  } else {
    out << "   New Sentence Rules\n";
    for (const auto& row : r.new_rules) {
      out << "   #" << row.id << ": " << row.regex_text << "   train " << percent(row.train) << ", payload "
          << percent(row.payload) << "\n";
    }
  }

  out << "\n3) Dependency of particular NER tag in payload vs training\n";
  if (r.ner_dep_mismatches.empty()) {
    out << "   no mismatches\n";
  } else {
    out << "   NER Tag    Dependency in payload    Top two most common dependencies in training\n";
    for (const auto& m : r.ner_dep_mismatches) {
      char line[256];
      std::snprintf(line, sizeof line, "   %-10s %-24s %s\n", m.ner.c_str(), m.payload_top2.front().c_str(),
                    bracket_list(m.train_top2).c_str());
      out << line;
    }
  }

  out << "\n4) NER tag frequency (share of tokens)\n";
  if (r.ner_shares.empty()) out << "   no entities\n";
  for (const auto& d : r.ner_shares) {
    out << "   " << d.tag << ": train " << percent(d.train) << ", payload " << percent(d.payload) << ", delta "
        << percent(d.delta) << "\n";
  }

  out << "\n5) Dependency tag frequency (share of tokens)\n";
  for (const auto& d : r.dep_shares) {
    out << "   " << d.tag << ": train " << percent(d.train) << ", payload " << percent(d.payload) << ", delta "
        << percent(d.delta) << "\n";
  }
  const double passive = 100.0 * r.passive_delta;
  if (passive >= 0.0) {
    out << "   payload is " << fixed2(passive) << " percent more passive than the training data\n";
  } else {
    out << "   payload is " << fixed2(-passive) << " percent less passive than the training data\n";
  }

  out << "\n6) Noun and verb phrase chunks\n";
  if (r.train_chunks && r.payload_chunks) {
    out << "   payload has " << fixed2(r.payload_chunks->vp_per_sentence)
        << " verb phrases per sentence as compared to " << fixed2(r.train_chunks->vp_per_sentence)
        << " in training\n";
    out << "   payload has " << fixed2(r.payload_chunks->np_per_sentence)
        << " noun phrases per sentence as compared to " << fixed2(r.train_chunks->np_per_sentence)
        << " in training\n";
  }
  for (const auto& n : r.notes) out << "   note: " << n << "\n";
  return out.str();
}

}  // namespace driftdet
