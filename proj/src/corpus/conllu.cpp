#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "driftdet/corpus.hpp"
#include "driftdet/error.hpp"

namespace driftdet {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find('\t', start);
    cols.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cols;
}

std::string ner_from_misc(const std::string& misc) {
  std::size_t start = 0;
  while (start <= misc.size()) {
    const auto bar = misc.find('|', start);
    const auto item = misc.substr(start, bar - start);
    if (item.rfind("NER=", 0) == 0 && item.size() > 4) return item.substr(4);
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return "O";
}

void check_heads(const AnnotatedSentence& s, std::size_t line) {
  for (const auto& t : s.tokens) {
    if (t.head > s.tokens.size()) {
      throw Error::format(line, "head " + std::to_string(t.head) + " outside sentence");
    }
  }
}

}  // namespace

std::vector<AnnotatedSentence> parse_conllu(std::istream& in) {
  std::vector<AnnotatedSentence> sentences;
  AnnotatedSentence current;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&] {
    if (current.tokens.empty()) return;
    check_heads(current, line_no);
    sentences.push_back(std::move(current));
    current = AnnotatedSentence{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    const auto cols = split_tabs(line);
    if (cols.size() != 10) {
      throw Error::format(line_no, "expected 10 columns, found " + std::to_string(cols.size()));
    }
    // Multiword ranges (1-2) and empty nodes (1.1) carry no annotation we use.
    if (cols[0].find_first_of("-.") != std::string::npos) continue;

    AnnotatedToken tok;
    tok.form = cols[1];
    tok.lemma = cols[2];
    tok.upos = cols[3];
    tok.ptb_tag = (cols[4].empty() || cols[4] == "_") ? cols[3] : cols[4];
    if (cols[7].empty() || cols[7] == "_") throw Error::format(line_no, "empty dependency relation");
    tok.dep = cols[7];
    try {
      std::size_t used = 0;
      const auto head = std::stoul(cols[6], &used);
      if (used != cols[6].size()) throw std::invalid_argument("head");
      tok.head = head;
    } catch (const std::logic_error&) {
      throw Error::format(line_no, "invalid head '" + cols[6] + "'");
    }
    tok.ner = ner_from_misc(cols[9]);
    current.tokens.push_back(std::move(tok));
  }
  flush();
  if (sentences.empty()) throw Error(ErrorCode::EmptyCorpus, "no sentences in CoNLL-U input");
  return sentences;
}

std::vector<AnnotatedSentence> load_annotated_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  return parse_conllu(in);
}

void write_conllu(std::ostream& out, std::span<const AnnotatedSentence> sentences) {
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const auto& t = s.tokens[i];
      out << (i + 1) << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << '\t'
          << (t.ptb_tag.empty() ? "_" : t.ptb_tag) << "\t_\t" << t.head << '\t' << t.dep
          << "\t_\t" << (t.ner == "O" ? std::string("_") : "NER=" + t.ner) << '\n';
    }
    out << '\n';
  }
}

}  // namespace driftdet
