#pragma once

// Corpus ingestion and text preprocessing.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driftdet {

struct Document {
  std::string id;
  std::string raw_text;
  std::optional<std::string> label;
};

// Output of `clean`. `tokens` is what word-vector backends pool over;
// `sentence_text` is the stopword-preserving, unstemmed token stream joined
// by single spaces, which sentence-level backends embed.
struct CleanDocument {
  std::string id;
  std::vector<std::string> tokens;
  std::string sentence_text;
};

struct AnnotatedToken {
  std::string form;
  std::string lemma;
  std::string upos;
  std::string ptb_tag;
  std::string ner = "O";
  std::string dep;
  std::size_t head = 0;
};

struct AnnotatedSentence {
  std::vector<AnnotatedToken> tokens;
};

enum class CorpusFormat { PlainLines, Csv };

struct CorpusSource {
  CorpusFormat format = CorpusFormat::PlainLines;
  std::string text_column = "text";
  std::optional<std::string> label_column;
  std::optional<std::string> id_column;
};

/// Loads raw documents. Blank lines/rows are skipped; documents without an
/// explicit id get "doc-<row#>" where row# is the 0-based line (plain) or
/// data-row (CSV) index.
std::vector<Document> load_corpus(const std::filesystem::path& path,
                                  const CorpusSource& source = {});
std::vector<Document> parse_corpus(std::istream& in, const CorpusSource& source = {});

/// CoNLL-U reader. NER comes from MISC "NER=<label>", defaulting to "O".
std::vector<AnnotatedSentence> load_annotated_corpus(const std::filesystem::path& path);
std::vector<AnnotatedSentence> parse_conllu(std::istream& in);
void write_conllu(std::ostream& out, std::span<const AnnotatedSentence> sentences);

/// Strips URLs, HTML tags and emoji, lowercases and tokenizes. With
/// `for_word_vectors`, stopwords are dropped and the rest Porter-stemmed.
/// Throws EmptyAfterCleaning when no token survives.
CleanDocument clean(const Document& doc, bool for_word_vectors);

// Building blocks of `clean`, exposed for tests and reuse.
std::string strip_noise(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);
bool is_stopword(std::string_view word);
std::span<const std::string_view> stopword_list();
std::string porter_stem(std::string_view word);

}  // namespace driftdet
