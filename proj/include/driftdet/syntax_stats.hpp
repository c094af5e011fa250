#pragma once

// Dataset-level syntactic statistics over annotated corpora and their
// train-vs-payload comparison.

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftdet/corpus.hpp"

namespace driftdet {

// ------------------------------------------------------------ POS helpers

/// Penn Treebank tag of a token; UPOS is mapped when no fine tag exists.
std::string ptb_tag_of(const AnnotatedToken& token);
/// PTB VB* tags, and the UPOS tags VERB and AUX.
bool is_verb_tag(std::string_view tag);
/// One of NOUN, PRON, VERB, ADV, ADJ, DET, or empty for every other tag.
std::string coarse_tag_of(const AnnotatedToken& token);

// ------------------------------------------------------------ NP chunks

struct ChunkedSentence {
  std::vector<std::string> units;
};

/// Greedy left-to-right DT? (JJ|JJR|JJS)* (NN|NNS|NNP|NNPS)+ over PTB tags.
ChunkedSentence chunk_np(std::span<const std::string> ptb_tags);
ChunkedSentence chunk_np(const AnnotatedSentence& sentence);

// ------------------------------------------------------------ verb patterns

struct PatternEntry {
  std::uint64_t count = 0;
  double probability = 0.0;
};

struct PatternTable {
  std::map<std::string, PatternEntry> patterns;
  std::uint64_t total = 0;

  double probability(const std::string& pattern) const;
};

/// Window of up to two units either side of every verb unit, e.g.
/// "[NP][RB][VB][NP]"; all VB-class labels render as "[VB]".
std::vector<std::string> verb_windows(const ChunkedSentence& sentence);
PatternTable pattern_table(std::span<const ChunkedSentence> sentences);
PatternTable verb_neighbourhood_patterns(std::span<const AnnotatedSentence> corpus);

struct PatternRow {
  std::string pattern;
  double train = 0.0;
  double payload = 0.0;
  bool is_new = false;
};

struct PatternComparison {
  std::vector<PatternRow> common;       // in both tables, by pattern
  std::vector<PatternRow> new_patterns; // payload patterns with train probability < threshold
  std::vector<PatternRow> top;          // top-N by train + payload probability
};

PatternComparison compare_patterns(const PatternTable& train, const PatternTable& payload,
                                   double new_threshold = 0.01, std::size_t top_n = 25);

// ------------------------------------------------------------ sentence rules

inline constexpr std::array<std::string_view, 6> kCoarseTags = {"NOUN", "PRON", "VERB", "ADV", "ADJ", "DET"};

struct SentenceRule {
  int id = 0;
  std::array<std::string, 6> tags;
  std::string regex_text;
};

/// All 720 orderings, ids 1..720 in lexicographic order of the tag names.
std::vector<SentenceRule> generate_sentence_rules();
std::string rule_regex_text(const std::array<std::string, 6>& tags);
/// True when the rule's tags occur in order (gaps allowed) in `coarse_tags`.
bool rule_matches(const SentenceRule& rule, std::span<const std::string> coarse_tags);
std::vector<std::string> coarse_tags(const AnnotatedSentence& sentence);
/// Fraction of sentences each rule matches.
std::map<int, double> rule_probabilities(std::span<const AnnotatedSentence> corpus,
                                         std::span<const SentenceRule> rules);

// ------------------------------------------------------------ NER / DEP

struct NerDepStats {
  std::map<std::string, std::uint64_t> ner_freq;  // tokens, BIO prefix stripped, "O" excluded
  std::map<std::string, std::uint64_t> dep_freq;
  std::map<std::string, std::vector<std::string>> ner_dep_top2;
  std::uint64_t token_count = 0;
};

NerDepStats ner_dep_stats(std::span<const AnnotatedSentence> corpus);
/// Entity label without a B-/I-/E-/S- prefix; "O" stays "O".
std::string strip_bio(std::string_view label);

// ------------------------------------------------------------ chunker

struct ChunkTaggedSentence {
  std::vector<std::string> words;
  std::vector<std::string> pos;
  std::vector<std::string> chunks;  // IOB tags
};

/// "TOKEN POS CHUNKTAG" lines, blank-line separated.
std::vector<ChunkTaggedSentence> parse_conll2000(std::istream& in);
std::vector<ChunkTaggedSentence> load_conll2000(const std::filesystem::path& path);

class BigramChunker {
 public:
  static BigramChunker train(std::span<const ChunkTaggedSentence> sentences);

  /// Bigram (prev POS, POS), then unigram POS, then "O". Sentence start uses
  /// "<S>" as the previous tag.
  std::string tag(std::string_view prev_pos, std::string_view pos) const;
  std::vector<std::string> tag_sentence(std::span<const std::string> pos) const;

  std::size_t bigram_count() const noexcept { return bigram_.size(); }
  std::size_t unigram_count() const noexcept { return unigram_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, std::string> bigram_;
  std::map<std::string, std::string> unigram_;
};

BigramChunker train_bigram_chunker(const std::filesystem::path& conll2000_path);
/// Per-token chunk-tag accuracy on gold-tagged sentences.
double chunk_accuracy(const BigramChunker& chunker, std::span<const ChunkTaggedSentence> gold);

struct ChunkCounts {
  std::uint64_t np = 0;
  std::uint64_t vp = 0;
};
/// Spans start at B-X, or at I-X following a chunk of another type or O.
ChunkCounts count_chunks(std::span<const std::string> iob);

struct ChunkDensity {
  double np_per_sentence = 0.0;
  double vp_per_sentence = 0.0;
  std::uint64_t np_chunks = 0;
  std::uint64_t vp_chunks = 0;
  std::size_t sentences = 0;
};

ChunkDensity chunk_density(const BigramChunker& chunker, std::span<const AnnotatedSentence> corpus);
ChunkDensity chunk_density(std::span<const std::vector<std::string>> iob_sentences);

// ------------------------------------------------------------ dataset stats

struct DatasetStats {
  PatternTable verb_patterns;
  std::map<int, double> rule_probs;
  NerDepStats ner_dep;
  std::optional<ChunkDensity> chunk_density;
  std::size_t sentence_count = 0;
};

DatasetStats compute_stats(std::span<const AnnotatedSentence> corpus, std::span<const SentenceRule> rules,
                           const BigramChunker* chunker = nullptr);

struct StatsThresholds {
  double new_pattern = 0.01;
  double rule_train_max = 0.01;
  double rule_payload_min = 0.05;
  std::size_t top_patterns = 25;
};

struct RuleRow {
  int id = 0;
  std::string regex_text;
  double train = 0.0;
  double payload = 0.0;
};

struct ShareDelta {
  std::string tag;
  double train = 0.0;    // count / total tokens
  double payload = 0.0;
  double delta = 0.0;    // payload - train
};

struct NerDepMismatch {
  std::string ner;
  std::vector<std::string> payload_top2;
  std::vector<std::string> train_top2;
};

struct DriftStatisticsReport {
  PatternComparison patterns;
  std::vector<RuleRow> new_rules;
  std::vector<ShareDelta> ner_shares;
  std::vector<ShareDelta> dep_shares;
  double passive_delta = 0.0;  // payload - train share of passive subjects
  std::vector<NerDepMismatch> ner_dep_mismatches;
  std::optional<ChunkDensity> train_chunks;
  std::optional<ChunkDensity> payload_chunks;
  std::vector<std::string> notes;
  std::size_t train_sentences = 0;
  std::size_t payload_sentences = 0;
};

DriftStatisticsReport compare_stats(const DatasetStats& train, const DatasetStats& payload,
                                    std::span<const SentenceRule> rules, const StatsThresholds& thresholds = {});

nlohmann::json report_json(const DriftStatisticsReport& report);
std::string report_text(const DriftStatisticsReport& report);

}  // namespace driftdet
