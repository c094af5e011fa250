#include <fstream>
#include <sstream>

#include "driftdet/error.hpp"
#include "driftdet/syntax_stats.hpp"

namespace driftdet {

namespace {

constexpr std::string_view kStart = "<S>";

std::string most_frequent(const std::map<std::string, std::uint64_t>& counts) {
  std::string best;
  std::uint64_t best_count = 0;
  for (const auto& [tag, c] : counts) {
    if (c > best_count) {
      best = tag;
      best_count = c;
    }
  }
  return best;
}

}  // namespace

std::vector<ChunkTaggedSentence> parse_conll2000(std::istream& in) {
  std::vector<ChunkTaggedSentence> out;
  ChunkTaggedSentence current;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&] {
    if (!current.words.empty()) out.push_back(std::move(current));
    current = {};
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      flush();
      continue;
    }
    std::istringstream fields(line);
    std::string word, pos, chunk, extra;
    if (!(fields >> word >> pos >> chunk) || (fields >> extra)) {
      throw Error::format(line_no, "expected 'TOKEN POS CHUNKTAG'");
    }
    if (word == "-DOCSTART-") continue;
    if (chunk != "O" && (chunk.size() < 3 || (chunk[0] != 'B' && chunk[0] != 'I') || chunk[1] != '-')) {
      throw Error::format(line_no, "bad chunk tag '" + chunk + "'");
    }
    current.words.push_back(std::move(word));
    current.pos.push_back(std::move(pos));
    current.chunks.push_back(std::move(chunk));
  }
  flush();
  if (out.empty()) throw Error(ErrorCode::EmptyCorpus, "no chunk-tagged sentences");
  return out;
}

std::vector<ChunkTaggedSentence> load_conll2000(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, path.string());
  return parse_conll2000(in);
}

BigramChunker BigramChunker::train(std::span<const ChunkTaggedSentence> sentences) {
  if (sentences.empty()) throw Error(ErrorCode::EmptyCorpus, "no chunker training sentences");
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::uint64_t>> bigram;
  std::map<std::string, std::map<std::string, std::uint64_t>> unigram;
  for (const auto& s : sentences) {
    std::string prev(kStart);
    for (std::size_t i = 0; i < s.pos.size(); ++i) {
      ++bigram[{prev, s.pos[i]}][s.chunks[i]];
      ++unigram[s.pos[i]][s.chunks[i]];
      prev = s.pos[i];
    }
  }
  BigramChunker c;
  for (const auto& [key, counts] : bigram) c.bigram_.emplace(key, most_frequent(counts));
  for (const auto& [pos, counts] : unigram) c.unigram_.emplace(pos, most_frequent(counts));
  return c;
}

std::string BigramChunker::tag(std::string_view prev_pos, std::string_view pos) const {
  if (auto it = bigram_.find({std::string(prev_pos), std::string(pos)}); it != bigram_.end()) return it->second;
  if (auto it = unigram_.find(std::string(pos)); it != unigram_.end()) return it->second;
  return "O";
}

std::vector<std::string> BigramChunker::tag_sentence(std::span<const std::string> pos) const {
  std::vector<std::string> out;
  out.reserve(pos.size());
  std::string_view prev = kStart;
  for (const auto& p : pos) {
    out.push_back(tag(prev, p));
    prev = p;
  }
  return out;
}

BigramChunker train_bigram_chunker(const std::filesystem::path& path) {
  return BigramChunker::train(load_conll2000(path));
}

double chunk_accuracy(const BigramChunker& chunker, std::span<const ChunkTaggedSentence> gold) {
  std::uint64_t total = 0, correct = 0;
  for (const auto& s : gold) {
    const auto predicted = chunker.tag_sentence(s.pos);
    for (std::size_t i = 0; i < predicted.size(); ++i, ++total) correct += predicted[i] == s.chunks[i];
  }
  if (total == 0) throw Error(ErrorCode::EmptyCorpus, "no gold tokens");
  return static_cast<double>(correct) / static_cast<double>(total);
}

ChunkCounts count_chunks(std::span<const std::string> iob) {
  ChunkCounts c;
  std::string prev;
  for (const auto& tag : iob) {
    if (tag.size() < 3 || tag[1] != '-') {
      prev.clear();
      continue;
    }
    const std::string type = tag.substr(2);
    if (tag[0] == 'B' || type != prev) {
      if (type == "NP") ++c.np;
      if (type == "VP") ++c.vp;
    }
    prev = type;
  }
  return c;
}

ChunkDensity chunk_density(std::span<const std::vector<std::string>> iob_sentences) {
  if (iob_sentences.empty()) throw Error(ErrorCode::EmptyCorpus, "no sentences");
  ChunkDensity d;
  d.sentences = iob_sentences.size();
  for (const auto& s : iob_sentences) {
    const auto c = count_chunks(s);
    d.np_chunks += c.np;
    d.vp_chunks += c.vp;
  }
  d.np_per_sentence = static_cast<double>(d.np_chunks) / static_cast<double>(d.sentences);
  d.vp_per_sentence = static_cast<double>(d.vp_chunks) / static_cast<double>(d.sentences);
  return d;
}

ChunkDensity chunk_density(const BigramChunker& chunker, std::span<const AnnotatedSentence> corpus) {
  std::vector<std::vector<std::string>> tagged;
  tagged.reserve(corpus.size());
  for (const auto& s : corpus) {
    std::vector<std::string> pos;
    for (const auto& t : s.tokens) pos.push_back(ptb_tag_of(t));
    tagged.push_back(chunker.tag_sentence(pos));
  }
  return chunk_density(tagged);
}

}  // namespace driftdet
