#include <doctest.h>

#include <algorithm>
#include <random>

#include "driftdet/embeddings.hpp"
#include "synth.hpp"

using namespace driftdet;
using testsupport::TempDir;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no driftdet::Error thrown");
  return ErrorCode::InvalidArgument;
}

CleanDocument doc_of(std::vector<std::string> tokens, std::string id = "d") {
  CleanDocument d{std::move(id), std::move(tokens), {}};
  for (std::size_t i = 0; i < d.tokens.size(); ++i) d.sentence_text += (i ? " " : "") + d.tokens[i];
  return d;
}

std::vector<CleanDocument> pet_corpus() {
  const std::vector<std::vector<std::string>> frames = {
      {"the", "X", "chased", "a", "mouse"}, {"my", "X", "sleeps", "on", "the", "sofa"},
      {"feed", "the", "X", "every", "morning"}, {"the", "X", "purrs", "and", "barks", "softly"}};
  const std::vector<std::vector<std::string>> rock = {{"the", "stone", "lay", "in", "the", "river"},
                                                      {"granite", "stone", "walls", "crumble", "slowly"}};
  std::vector<CleanDocument> docs;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> t;
    if (i % 3 == 2) {
      t = rock[rng() % rock.size()];
    } else {
      t = frames[rng() % frames.size()];
      for (auto& w : t) {
        if (w == "X") w = i % 3 == 0 ? "cat" : "dog";
      }
    }
    docs.push_back(doc_of(t, "s" + std::to_string(i)));
  }
  return docs;
}

std::shared_ptr<const WordVectorTable> tiny_table() {
  return std::make_shared<const WordVectorTable>(std::vector<std::string>{"a", "b", "c"},
                                                 std::vector<float>{1, 0, 0, 1, 2, 4}, 2);
}

}  // namespace

TEST_SUITE("embeddings") {

TEST_CASE("mean pooling") {
  auto table = tiny_table();
  auto v = mean_pool(std::vector<std::string>{"a", "b"}, *table);
  CHECK(v.values == std::vector<double>{0.5, 0.5});
  v = mean_pool(std::vector<std::string>{"a", "zzz", "c", "c"}, *table);
  CHECK(v.values[0] == doctest::Approx(5.0 / 3.0));
  CHECK(v.values[1] == doctest::Approx(8.0 / 3.0));
  CHECK(code_of([&] { mean_pool(std::vector<std::string>{"x", "y"}, *table); }) == ErrorCode::NoRepresentableTokens);
}

TEST_CASE("mean pooling against a brute-force oracle, and order invariance") {
  std::mt19937_64 rng(9);
  std::vector<std::string> words;
  std::vector<float> m;
  const std::size_t dim = 17;
  for (int i = 0; i < 50; ++i) {
    words.push_back("w" + std::to_string(i));
    for (std::size_t j = 0; j < dim; ++j) m.push_back(std::uniform_real_distribution<float>(-2, 2)(rng));
  }
  WordVectorTable table(words, m, dim);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> toks;
    const int n = 1 + static_cast<int>(rng() % 30);
    for (int i = 0; i < n; ++i) toks.push_back(rng() % 5 ? words[rng() % words.size()] : "oov");
    if (std::none_of(toks.begin(), toks.end(), [](auto& t) { return t != "oov"; })) toks.push_back("w0");
    std::vector<double> sum(dim, 0.0);
    int used = 0;
    for (const auto& t : toks) {
      if (t == "oov") continue;
      const auto row = *table.find(t);
      for (std::size_t j = 0; j < dim; ++j) sum[j] += row[j];
      ++used;
    }
    const auto v = mean_pool(toks, table);
    for (std::size_t j = 0; j < dim; ++j) CHECK(v.values[j] == doctest::Approx(sum[j] / used).epsilon(1e-12));
    std::shuffle(toks.begin(), toks.end(), rng);
    const auto p = mean_pool(toks, table);
    for (std::size_t j = 0; j < dim; ++j) CHECK(p.values[j] == doctest::Approx(v.values[j]).epsilon(1e-12));
  }
}

TEST_CASE("word-vector backend batches keep order and collect failures") {
  WordVectorBackend backend(BackendKind::VectorFile, tiny_table());
  std::vector<CleanDocument> docs = {doc_of({"a"}), doc_of({"nope"}), doc_of({"b", "c"})};
  auto batch = backend.embed_batch(docs, 2);
  REQUIRE(batch.vectors.size() == 3);
  CHECK(batch.vectors[0]->values == std::vector<double>{1.0, 0.0});
  CHECK_FALSE(batch.vectors[1].has_value());
  CHECK(batch.vectors[2]->values == std::vector<double>{1.0, 2.5});
  REQUIRE(batch.failures.size() == 1);
  CHECK(batch.failures[0].index == 1);
  CHECK(batch.failures[0].code == ErrorCode::NoRepresentableTokens);
  CHECK(batch.succeeded() == 2);
}

TEST_CASE("vector files") {
  TempDir dir("vec");
  testsupport::write_text(dir / "w2v.txt", "2 3\nfoo 1 2 3\nbar 4 5 6\n");
  VectorFileReport report;
  auto t = load_vector_file(dir / "w2v.txt", &report);
  CHECK(t.dim() == 3);
  CHECK(t.size() == 2);
  CHECK(report.had_header);
  CHECK((*t.find("bar"))[2] == 6.0f);

  testsupport::write_text(dir / "glove.txt", "x 1 2 3 4 5\ny 1 1 1 1 1\nx 9 9 9 9 9\n");
  t = load_vector_file(dir / "glove.txt", &report);
  CHECK(t.dim() == 5);
  CHECK(t.size() == 2);
  CHECK_FALSE(report.had_header);
  CHECK(report.duplicate_words == 1);
  CHECK((*t.find("x"))[0] == 1.0f);

  testsupport::write_text(dir / "bad.txt", "x 1 2 3 4 5\ny 1 1 1 1\n");
  CHECK(code_of([&] { load_vector_file(dir / "bad.txt"); }) == ErrorCode::DimensionMismatch);
  testsupport::write_text(dir / "nan.txt", "x 1 2\ny 1 abc\n");
  CHECK(code_of([&] { load_vector_file(dir / "nan.txt"); }) == ErrorCode::FormatError);
  CHECK(code_of([&] { load_vector_file(dir / "missing.txt"); }) == ErrorCode::FileNotFound);
}

TEST_CASE("vector file round trip keeps 6 significant digits") {
  std::mt19937_64 rng(2);
  std::vector<std::string> words;
  std::vector<float> m;
  for (int i = 0; i < 40; ++i) {
    words.push_back("word" + std::to_string(i));
    for (int j = 0; j < 8; ++j) m.push_back(std::normal_distribution<float>(0, 3)(rng));
  }
  WordVectorTable table(words, m, 8);
  TempDir dir("vecrt");
  save_vector_file(dir / "v.txt", table);
  auto back = load_vector_file(dir / "v.txt");
  REQUIRE(back.size() == table.size());
  CHECK(back.words() == table.words());
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(back.matrix()[i] == doctest::Approx(m[i]).epsilon(1e-6));
  }
}

TEST_CASE("skip-gram places shared-context words together") {
  SkipGramOptions opts;
  opts.dim = 32;
  opts.epochs = 20;
  opts.seed = 1;
  opts.min_count = 1;
  SkipGramReport report;
  const auto docs = pet_corpus();
  const auto table = train_skipgram(docs, opts, &report);
  auto vec = [&](const std::string& w) {
    const auto r = *table.find(w);
    return std::vector<double>(r.begin(), r.end());
  };
  CHECK(cosine_similarity(vec("cat"), vec("dog")) > cosine_similarity(vec("cat"), vec("stone")));

  REQUIRE(report.epoch_loss.size() == opts.epochs);
  CHECK(report.epoch_loss.back() < report.initial_loss);
  double prev = report.initial_loss;
  for (double l : report.epoch_loss) {
    CHECK(l <= prev + 0.01 * report.initial_loss);
    prev = l;
  }
}

TEST_CASE("skip-gram is deterministic and validates input") {
  SkipGramOptions opts;
  opts.dim = 16;
  opts.epochs = 2;
  const auto docs = pet_corpus();
  const auto a = train_skipgram(docs, opts);
  const auto b = train_skipgram(docs, opts);
  CHECK(a.words() == b.words());
  CHECK(std::equal(a.matrix().begin(), a.matrix().end(), b.matrix().begin(), b.matrix().end()));

  std::vector<CleanDocument> degenerate = {doc_of({"a", "a"})};
  CHECK(code_of([&] { train_skipgram(degenerate, opts); }) == ErrorCode::DegenerateVocabulary);
  std::vector<CleanDocument> none;
  CHECK(code_of([&] { train_skipgram(none, opts); }) == ErrorCode::EmptyCorpus);

  // every word appears once: min_count falls back to 1
  std::vector<CleanDocument> singles = {doc_of({"alpha", "beta", "gamma"})};
  SkipGramReport report;
  const auto t = train_skipgram(singles, opts, &report);
  CHECK(t.size() == 3);
  CHECK(report.min_count_used == 1);
}

TEST_CASE("backend descriptor validation") {
  BackendDescriptor d;
  d.kind = BackendKind::RemoteSentence;
  CHECK(code_of([&] { d.validate(); }) == ErrorCode::ConfigError);
  d.endpoint = "http://localhost:1";
  CHECK_NOTHROW(d.validate());
  d.kind = BackendKind::NativeSkipgram;
  CHECK(code_of([&] { d.validate(); }) == ErrorCode::ConfigError);
  CHECK(backend_kind_from_string("remote-token-avg") == BackendKind::RemoteTokenAvg);
  CHECK(to_string(BackendKind::VectorFile) == "vector-file");
  CHECK(code_of([] { backend_kind_from_string("bert"); }) == ErrorCode::ConfigError);
}

}  // TEST_SUITE
