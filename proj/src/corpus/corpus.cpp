#include <algorithm>
#include <fstream>
#include <istream>
#include <string>
#include <unordered_set>

#include "csv.hpp"
#include "driftdet/corpus.hpp"
#include "driftdet/error.hpp"

namespace driftdet {

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

std::size_t column_index(const detail::CsvRecord& header, const std::string& name) {
  const auto it = std::find(header.fields.begin(), header.fields.end(), name);
  if (it == header.fields.end()) {
    throw Error::format(header.line, "missing column '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.fields.begin());
}

std::vector<Document> parse_plain(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  for (std::size_t row = 0; std::getline(in, line); ++row) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    docs.push_back(Document{"doc-" + std::to_string(row), line, std::nullopt});
  }
  return docs;
}

std::vector<Document> parse_csv(std::istream& in, const CorpusSource& source) {
  const auto records = detail::read_csv(in);
  if (records.empty()) return {};
  const auto& header = records.front();
  const std::size_t text_col = column_index(header, source.text_column);
  std::optional<std::size_t> label_col;
  std::optional<std::size_t> id_col;
  if (source.label_column) label_col = column_index(header, *source.label_column);
  if (source.id_column) id_col = column_index(header, *source.id_column);

  std::vector<Document> docs;
  for (std::size_t row = 1; row < records.size(); ++row) {
    const auto& rec = records[row];
    if (rec.fields.size() != header.fields.size()) {
      throw Error::format(rec.line, "expected " + std::to_string(header.fields.size()) +
                                        " fields, found " + std::to_string(rec.fields.size()));
    }
    if (is_blank(rec.fields[text_col])) continue;
    Document doc;
    doc.id = id_col ? rec.fields[*id_col] : "doc-" + std::to_string(row - 1);
    doc.raw_text = rec.fields[text_col];
    if (label_col) doc.label = rec.fields[*label_col];
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

std::vector<Document> parse_corpus(std::istream& in, const CorpusSource& source) {
  auto docs = source.format == CorpusFormat::Csv ? parse_csv(in, source) : parse_plain(in);
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents in corpus");
  std::unordered_set<std::string> seen;
  for (const auto& d : docs) {
    if (!seen.insert(d.id).second) throw Error(ErrorCode::FormatError, "duplicate document id '" + d.id + "'");
  }
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path, const CorpusSource& source) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  return parse_corpus(in, source);
}

}  // namespace driftdet
