#include <doctest.h>

#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "driftdet/corpus.hpp"
#include "driftdet/error.hpp"
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

std::vector<Document> parse(const std::string& text, const CorpusSource& src = {}) {
  std::istringstream in(text);
  return parse_corpus(in, src);
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("plain lines get positional ids and skip blanks") {
  auto docs = parse("first\nsecond\nthird\n");
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].id == "doc-0");
  CHECK(docs[2].id == "doc-2");
  CHECK(docs[1].raw_text == "second");

  docs = parse("\n\nonly line\n");
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].raw_text == "only line");
}

TEST_CASE("csv with text and label columns") {
  CorpusSource src{CorpusFormat::Csv, "review", std::string("label"), std::nullopt};
  auto docs = parse("review,label\n\"good, really\",pos\nbad,neg\n", src);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].raw_text == "good, really");
  CHECK(docs[0].label == std::optional<std::string>("pos"));
  CHECK(docs[1].label == std::optional<std::string>("neg"));
  CHECK(docs[1].id == "doc-1");
}

TEST_CASE("csv quoting with embedded quotes and newlines") {
  CorpusSource src{CorpusFormat::Csv, "text", std::nullopt, std::string("id")};
  auto docs = parse("id,text\na,\"he said \"\"hi\"\"\nthen left\"\n", src);
  REQUIRE(docs.size() == 1);
  CHECK(docs[0].id == "a");
  CHECK(docs[0].raw_text == "he said \"hi\"\nthen left");
}

TEST_CASE("corpus errors") {
  CorpusSource csv{CorpusFormat::Csv, "text", std::nullopt, std::nullopt};
  CHECK(code_of([&] { parse("text,extra\na,b\nc,d,e\n", csv); }) == ErrorCode::FormatError);
  try {
    parse("text,extra\na,b\nc,d,e\n", csv);
  } catch (const Error& e) {
    REQUIRE(e.location.has_value());
    CHECK(*e.location == 3);
  }
  CHECK(code_of([&] { parse("review\nx\n", csv); }) == ErrorCode::FormatError);
  CHECK(code_of([&] { parse("\n\n"); }) == ErrorCode::EmptyCorpus);
  CHECK(code_of([&] { load_corpus("/nonexistent/corpus.txt"); }) == ErrorCode::FileNotFound);
}

TEST_CASE("clean strips urls, html and emoji") {
  auto c = clean({"d", "Visit http://a.b <br/> NOW! \xF0\x9F\x98\x80", {}}, false);
  CHECK(c.tokens == std::vector<std::string>{"visit", "now"});
  CHECK(c.sentence_text == "visit now");
  c = clean({"d", "see www.example.com/x and <a href='y'>link</a>", {}}, false);
  CHECK(c.tokens == std::vector<std::string>{"see", "and", "link"});
}

TEST_CASE("clean for word vectors drops stopwords and stems") {
  auto c = clean({"d", "The cats are running", {}}, true);
  CHECK(c.tokens == std::vector<std::string>{"cat", "run"});
  CHECK(c.sentence_text == "the cats are running");
}

TEST_CASE("nothing left after cleaning") {
  CHECK(code_of([] { clean({"d", "\xF0\x9F\x98\x80\xF0\x9F\x98\x80", {}}, false); }) ==
        ErrorCode::EmptyAfterCleaning);
  CHECK(code_of([] { clean({"d", "the and of", {}}, true); }) == ErrorCode::EmptyAfterCleaning);
}

TEST_CASE("tokenize keeps inner apostrophes and drops punctuation") {
  CHECK(tokenize("Don't stop -- it's fine!") == std::vector<std::string>{"don't", "stop", "it's", "fine"});
  CHECK(tokenize("Ünïcode Straße") == std::vector<std::string>{"ünïcode", "straße"});
}

TEST_CASE("stopword list is the 179-word list") {
  CHECK(stopword_list().size() == 179);
  CHECK(is_stopword("the"));
  CHECK(is_stopword("wouldn't"));
  CHECK_FALSE(is_stopword("movie"));
}

TEST_CASE("porter stems match the reference table") {
  std::ifstream in(testsupport::data_dir() / "samples" / "porter_reference.tsv");
  REQUIRE(in);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const std::string word = line.substr(0, tab), stem = line.substr(tab + 1);
    CHECK_MESSAGE(porter_stem(word) == stem, word);
    ++n;
  }
  CHECK(n > 100);
}

TEST_CASE("clean invariants on random noisy text") {
  static const std::vector<std::string> pieces = {
      "The",  "movie", "was", "GREAT", "http://x.y/z?q=1", "<b>",  "</b>", "www.site.org", "\xF0\x9F\x98\x82",
      "\xE2\x98\x80", "running", "cats", "it's", "!!", ",", "generalization", "\xEF\xB8\x8F", "café", "<br/>"};
  const std::regex url(R"([A-Za-z][A-Za-z0-9+.\-]*://\S*|[Ww][Ww][Ww]\.\S*)"), html("<[^>]*>");
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int i = 0; i < n; ++i) text += pieces[rng() % pieces.size()] + (rng() % 3 ? " " : "");
    Document doc{"r", text, {}};
    CleanDocument plain, stemmed;
    try {
      plain = clean(doc, false);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyAfterCleaning);
      continue;
    }
    for (const auto& t : plain.tokens) {
      CHECK_FALSE(std::regex_search(t, url));
      CHECK_FALSE(std::regex_search(t, html));
      CHECK(t.find("\xF0\x9F") == std::string::npos);
      CHECK(t.find("\xE2\x98") == std::string::npos);
    }
    // idempotent
    CHECK(clean({"r", plain.sentence_text, {}}, false).tokens == plain.tokens);

    try {
      stemmed = clean(doc, true);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyAfterCleaning);
      continue;
    }
    CHECK(clean({"r", plain.sentence_text, {}}, true).tokens == stemmed.tokens);
    // stemmed stream = non-stopwords of the plain stream, stemmed, in order
    std::vector<std::string> expect;
    for (const auto& t : plain.tokens) {
      if (!is_stopword(t)) expect.push_back(porter_stem(t));
    }
    CHECK(stemmed.tokens == expect);
    for (const auto& t : stemmed.tokens) CHECK_FALSE(is_stopword(t));
  }
}

TEST_CASE("conllu parsing") {
  std::istringstream in(
      "# sent_id = 1\n"
      "1\tAcme\tAcme\tPROPN\tNNP\t_\t2\tnsubj\t_\tNER=ORG\n"
      "2\tsells\tsell\tVERB\tVBZ\t_\t0\troot\t_\t_\n"
      "3\ttools\ttool\tNOUN\tNNS\t_\t2\tobj\t_\tSpaceAfter=No|NER=B-PRODUCT\n"
      "\n"
      "1\tHi\thi\tINTJ\tUH\t_\t0\troot\t_\t_\n");
  auto s = parse_conllu(in);
  REQUIRE(s.size() == 2);
  REQUIRE(s[0].tokens.size() == 3);
  CHECK(s[0].tokens[0].ner == "ORG");
  CHECK(s[0].tokens[1].ner == "O");
  CHECK(s[0].tokens[2].ner == "B-PRODUCT");
  CHECK(s[0].tokens[2].ptb_tag == "NNS");
  CHECK(s[0].tokens[0].head == 2);
  CHECK(s[1].tokens[0].dep == "root");

  std::istringstream bad("1\tA\ta\tDET\n");
  CHECK(code_of([&] { parse_conllu(bad); }) == ErrorCode::FormatError);
  std::istringstream empty("\n# only a comment\n");
  CHECK(code_of([&] { parse_conllu(empty); }) == ErrorCode::EmptyCorpus);
}

TEST_CASE("conllu round trip") {
  auto original = load_annotated_corpus(testsupport::data_dir() / "samples" / "train.conllu");
  REQUIRE(original.size() == 5);
  std::ostringstream out;
  write_conllu(out, original);
  std::istringstream in(out.str());
  auto back = parse_conllu(in);
  REQUIRE(back.size() == original.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    REQUIRE(back[i].tokens.size() == original[i].tokens.size());
    for (std::size_t j = 0; j < back[i].tokens.size(); ++j) {
      const auto &a = back[i].tokens[j], &b = original[i].tokens[j];
      CHECK(a.form == b.form);
      CHECK(a.lemma == b.lemma);
      CHECK(a.upos == b.upos);
      CHECK(a.ptb_tag == b.ptb_tag);
      CHECK(a.dep == b.dep);
      CHECK(a.head == b.head);
      CHECK(a.ner == b.ner);
    }
  }
}

TEST_CASE("files on disk") {
  TempDir dir("corpus");
  testsupport::write_text(dir / "a.txt", "one\n\ntwo\n");
  CHECK(load_corpus(dir / "a.txt").size() == 2);
}

}  // TEST_SUITE
