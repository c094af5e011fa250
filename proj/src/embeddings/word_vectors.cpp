#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "driftdet/embeddings.hpp"

namespace driftdet {

WordVectorTable::WordVectorTable(std::vector<std::string> words, std::vector<float> matrix, std::size_t dim)
    : words_(std::move(words)), matrix_(std::move(matrix)), dim_(dim) {
  if (dim_ == 0) throw Error(ErrorCode::DimensionMismatch, "word vector dimension must be positive");
  if (matrix_.size() != words_.size() * dim_) {
    throw Error(ErrorCode::DimensionMismatch, "word vector matrix does not match vocabulary size");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw Error(ErrorCode::FormatError, "duplicate word '" + words_[i] + "' in vocabulary");
    }
  }
}

std::optional<std::size_t> WordVectorTable::index_of(const std::string& word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::span<const float>> WordVectorTable::find(const std::string& word) const {
  const auto idx = index_of(word);
  if (!idx) return std::nullopt;
  return row(*idx);
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace

WordVectorTable load_vector_file(const std::filesystem::path& path, VectorFileReport* report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());

  std::vector<std::string> words;
  std::vector<float> matrix;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t dim = 0;
  std::size_t duplicates = 0;
  bool header = false;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_ws(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2) {
      std::size_t n = 0, d = 0;
      if (parse_number(fields[0], n) && parse_number(fields[1], d)) {
        if (d == 0) throw Error::format(line_no, "header dimension is zero");
        header = true;
        dim = d;
        words.reserve(n);
        matrix.reserve(n * d);
        continue;
      }
    }
    if (dim == 0) {
      if (fields.size() < 2) throw Error::format(line_no, "row has no vector components");
      dim = fields.size() - 1;
    }
    if (fields.size() - 1 != dim) {
      Error e(ErrorCode::DimensionMismatch, "line " + std::to_string(line_no) + ": expected " +
                                                std::to_string(dim) + " components, found " +
                                                std::to_string(fields.size() - 1));
      e.location = line_no;
      throw e;
    }
    std::vector<float> row(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!parse_number(fields[j + 1], row[j]) || !std::isfinite(row[j])) {
        throw Error::format(line_no, "invalid number '" + std::string(fields[j + 1]) + "'");
      }
    }
    std::string word(fields[0]);
    if (seen.contains(word)) {
      ++duplicates;
      continue;
    }
    seen.emplace(word, words.size());
    words.push_back(std::move(word));
    matrix.insert(matrix.end(), row.begin(), row.end());
  }
  if (words.empty()) throw Error(ErrorCode::EmptyCorpus, "no vectors in " + path.string());
  if (report) {
    report->duplicate_words = duplicates;
    report->had_header = header;
  }
  return WordVectorTable(std::move(words), std::move(matrix), dim);
}

void save_vector_file(const std::filesystem::path& path, const WordVectorTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    for (float v : table.row(i)) {
      // 9 significant digits round-trip any float32.
      std::snprintf(buf, sizeof buf, " %.9g", static_cast<double>(v));
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::FileNotFound, "write failed for " + path.string());
}

EmbeddingVector mean_pool(std::span<const std::string> tokens, const WordVectorTable& table) {
  EmbeddingVector out;
  out.values.assign(table.dim(), 0.0);
  std::size_t used = 0;
  for (const auto& tok : tokens) {
    const auto row = table.find(tok);
    if (!row) continue;
    for (std::size_t j = 0; j < table.dim(); ++j) out.values[j] += static_cast<double>((*row)[j]);
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::NoRepresentableTokens, "every token is out of vocabulary");
  const double inv = static_cast<double>(used);
  for (double& v : out.values) v /= inv;
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "cosine of vectors with different widths");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace driftdet
