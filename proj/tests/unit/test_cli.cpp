#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "driftdet/cli.hpp"
#include "stub_provider.hpp"
#include "synth.hpp"

using namespace driftdet;
using nlohmann::json;
using testsupport::TempDir;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// A small trained native model shared by several cases.
struct Fixture {
  TempDir tmp{"cli"};
  std::filesystem::path corpus = tmp / "train.txt";
  std::filesystem::path payload = tmp / "payload.txt";
  std::filesystem::path model = tmp / "model";

  Fixture() {
    testsupport::write_lines(corpus, testsupport::movie_reviews(100, 1));
    auto mixed = testsupport::movie_reviews(3, 2);
    for (auto& d : testsupport::restaurant_reviews(3, 3)) mixed.push_back(d);
    testsupport::write_lines(payload, mixed);
    const auto r = cli({"train", "--corpus", corpus.string(), "--out", model.string(), "--dim", "16", "--epochs",
                        "2", "--threshold", "0.9"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
  }
};

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("train writes a model directory") {
    Fixture f;
    CHECK(std::filesystem::is_regular_file(f.model / "manifest.json"));
    CHECK(std::filesystem::is_regular_file(f.model / "tensors.bin"));
  }

  TEST_CASE("train reports summary lines") {
    TempDir tmp;
    testsupport::write_lines(tmp / "c.txt", testsupport::movie_reviews(40, 4));
    const auto r =
        cli({"train", "--corpus", (tmp / "c.txt").string(), "--out", (tmp / "m").string(), "--dim", "8", "--epochs", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("model: centroid") != std::string::npos);
    CHECK(r.out.find("backend: native-skipgram") != std::string::npos);
    CHECK(r.out.find("N: 40 (of 40;") != std::string::npos);
  }

  TEST_CASE("missing corpus exits 1 with the code name") {
    TempDir tmp;
    const auto r = cli({"train", "--corpus", (tmp / "nope.txt").string(), "--out", (tmp / "m").string()});
    CHECK(r.code == kExitError);
    CHECK(r.err.find("FileNotFound") != std::string::npos);
  }

  TEST_CASE("gmm on three documents is InsufficientData") {
    TempDir tmp;
    testsupport::write_text(tmp / "c.txt", "the film was long\nthe actor was great\na quiet movie\n");
    const auto r = cli({"train", "--corpus", (tmp / "c.txt").string(), "--out", (tmp / "m").string(), "--model",
                        "gmm", "--dim", "8", "--epochs", "1"});
    CHECK(r.code == kExitError);
    CHECK(r.err.find("InsufficientData") != std::string::npos);
  }

  TEST_CASE("usage errors exit 2") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"train", "--dim", "0"}).code == kExitUsage);
    CHECK(cli({"explain", "--top-k", "0"}).code == kExitUsage);
  }

  TEST_CASE("score prints verdicts and the drift rate") {
    Fixture f;
    const auto r = cli({"score", "--model-dir", f.model.string(), "--payload", f.payload.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 7);
    for (std::size_t i = 0; i < 6; ++i) {
      const bool ok = lines[i].find(": Drifted, ") != std::string::npos ||
                      lines[i].find(": Not drifted, ") != std::string::npos;
      CHECK_MESSAGE(ok, lines[i]);
    }
    CHECK(lines[6].rfind("drift rate: ", 0) == 0);
  }

  TEST_CASE("score --json emits one object per document") {
    Fixture f;
    const auto r = cli({"score", "--model-dir", f.model.string(), "--payload", f.payload.string(), "--json"});
    REQUIRE(r.code == 0);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 6);
    for (const auto& l : lines) {
      const auto j = json::parse(l);
      CHECK(j["schema_version"] == 1);
      CHECK(j["threshold"].get<double>() == doctest::Approx(0.9));
      const double s = j["score"].get<double>();
      CHECK(s >= 0.0);
      CHECK(s <= 1.0);
      CHECK(j["drifted"].get<bool>() == (s < 0.9));
    }
    CHECK(r.err.find("drift rate: ") != std::string::npos);
    const auto again = cli({"score", "--model-dir", f.model.string(), "--payload", f.payload.string(), "--json"});
    CHECK(again.out == r.out);
  }

  TEST_CASE("empty payload is EmptyCorpus") {
    Fixture f;
    testsupport::write_text(f.tmp / "empty.txt", "");
    const auto r = cli({"score", "--model-dir", f.model.string(), "--payload", (f.tmp / "empty.txt").string()});
    CHECK(r.code == kExitError);
    CHECK(r.err.find("EmptyCorpus") != std::string::npos);
  }

  TEST_CASE("all-stopword payload is flagged") {
    Fixture f;
    testsupport::write_text(f.tmp / "stop.txt", "the and of\n");
    const auto r = cli({"score", "--model-dir", f.model.string(), "--payload", (f.tmp / "stop.txt").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("Drifted, 0 [EmptyAfterCleaning]") != std::string::npos);
  }

  TEST_CASE("explain output") {
    Fixture f;
    const auto r = cli({"explain", "--model-dir", f.model.string(), "--payload", f.payload.string(), "--json",
                        "--top-k", "2"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 6);
    for (const auto& l : lines) {
      const auto j = json::parse(l);
      if (j["drifted"].get<bool>()) {
        CHECK(j.contains("explanation"));
        CHECK(j["highlights"].is_string());
      } else {
        CHECK(j["note"] == "not drifted, no explanation");
      }
    }
    const auto again = cli({"explain", "--model-dir", f.model.string(), "--payload", f.payload.string(), "--json",
                            "--top-k", "2"});
    CHECK(again.out == r.out);
  }

  TEST_CASE("explain on a non-drifted document") {
    Fixture f;
    TempDir tmp;
    const auto t = cli({"train", "--corpus", f.corpus.string(), "--out", (tmp / "m").string(), "--dim", "16",
                        "--epochs", "2", "--threshold", "0.0001"});
    REQUIRE(t.code == 0);
    testsupport::write_lines(tmp / "p.txt", testsupport::movie_reviews(1, 1));
    const auto e = cli({"explain", "--model-dir", (tmp / "m").string(), "--payload", (tmp / "p.txt").string()});
    REQUIRE(e.code == 0);
    CHECK(e.out.find(": not drifted, no explanation (") != std::string::npos);
  }

  TEST_CASE("stats on identical corpora") {
    const auto train = (testsupport::data_dir() / "samples" / "train.conllu").string();
    const auto r = cli({"stats", train, train, "--json"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = json::parse(r.out);
    CHECK(j["passive_delta"].get<double>() == 0.0);
    CHECK(j["verb_patterns"]["new"].empty());
    CHECK(j["new_sentence_rules"].empty());
    CHECK(j["ner_dep_mismatches"].empty());
    for (const auto& row : j["ner_shares"]) CHECK(row["delta"].get<double>() == 0.0);
    for (const auto& row : j["dep_shares"]) CHECK(row["delta"].get<double>() == 0.0);
    const auto again = cli({"stats", train, train, "--json"});
    CHECK(again.out == r.out);
  }

  TEST_CASE("stats with a missing chunker notes and skips") {
    TempDir tmp;
    const auto train = (testsupport::data_dir() / "samples" / "train.conllu").string();
    const auto walk = (testsupport::data_dir() / "samples" / "walkthrough.conllu").string();
    const auto r = cli({"stats", train, walk, "--chunker", (tmp / "absent.txt").string(), "--json"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto j = json::parse(r.out);
    REQUIRE(j["notes"].size() == 1);
    CHECK(j["notes"][0].get<std::string>().find("not found") != std::string::npos);
    CHECK(j["chunk_density"].is_null());

    testsupport::write_conll2000(tmp / "chunks.txt", testsupport::conll2000_like(200, 4));
    const auto c = cli({"stats", train, walk, "--chunker", (tmp / "chunks.txt").string(), "--json-out",
                        (tmp / "r.json").string()});
    REQUIRE(c.code == 0);
    std::ifstream in(tmp / "r.json");
    const auto written = json::parse(in);
    CHECK(written["chunk_density"]["train"]["sentences"] == 5);
    CHECK(c.out.find("New Sentence Rules") != std::string::npos);
  }

  TEST_CASE("eval writes CSV") {
    TempDir tmp;
    testsupport::write_csv(tmp / "iid.csv", testsupport::movie_reviews(60, 5));
    testsupport::write_lines(tmp / "ood.txt", testsupport::restaurant_reviews(20, 6));
    const auto r = cli({"eval", "--iid", (tmp / "iid.csv").string(), "--format", "csv", "--ood",
                        (tmp / "ood.txt").string(), "--dim", "16", "--epochs", "2", "--thresholds", "0,0.995",
                        "--pair", "movie-vs-food", "--json-out", (tmp / "e.json").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "pair,backend,model,threshold,accuracy,train_s,infer_s");
    CHECK(lines[1].rfind("movie-vs-food,native-skipgram,centroid,0,0.5,", 0) == 0);
    std::ifstream in(tmp / "e.json");
    const auto j = json::parse(in);
    CHECK(j["n_train"] == 48);
    CHECK(j["requested"].size() == 2);
  }

  TEST_CASE("eval rejects a bad threshold list") {
    const auto r = cli({"eval", "--iid", "a", "--ood", "b", "--thresholds", "0.5,x"});
    CHECK(r.code == kExitError);
    CHECK(r.err.find("ConfigError") != std::string::npos);
  }

  TEST_CASE("flags override the config file") {
    TempDir tmp;
    testsupport::write_lines(tmp / "c.txt", testsupport::movie_reviews(40, 7));
    const json cfg = {{"pipeline", {{"threshold", 0.5}, {"backend", {{"dim", 8}}}, {"skipgram", {{"epochs", 1}}}}},
                      {"paths", {{"train_corpus", "c.txt"}, {"model_dir", "m"}}}};
    testsupport::write_text(tmp / "run.json", cfg.dump());
    auto r = cli({"train", "--config", (tmp / "run.json").string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(r.out.find("dim: 8") != std::string::npos);
    testsupport::write_text(tmp / "p.txt", "a great film\n");
    auto s = cli({"score", "--model-dir", (tmp / "m").string(), "--payload", (tmp / "p.txt").string(), "--json"});
    CHECK(json::parse(s.out)["threshold"].get<double>() == 0.5);

    r = cli({"train", "--config", (tmp / "run.json").string(), "--threshold", "0.25", "--out",
             (tmp / "m2").string()});
    REQUIRE(r.code == 0);
    s = cli({"score", "--model-dir", (tmp / "m2").string(), "--payload", (tmp / "p.txt").string(), "--json"});
    CHECK(json::parse(s.out)["threshold"].get<double>() == 0.25);
  }

  TEST_CASE("unknown config keys are rejected") {
    TempDir tmp;
    testsupport::write_text(tmp / "run.json", R"({"pipeline": {"thresold": 0.5}})");
    const auto r = cli({"train", "--config", (tmp / "run.json").string()});
    CHECK(r.code == kExitError);
    CHECK(r.err.find("ConfigError") != std::string::npos);
  }

  TEST_CASE("provider URL from the environment") {
    TempDir tmp;
    testsupport::write_lines(tmp / "c.txt", testsupport::movie_reviews(20, 8));
    testsupport::write_text(tmp / "p.txt", "a fine film\nthe soup was cold\n");
    std::string model = (tmp / "m").string();
    {
      testsupport::StubProvider first({.dim = 8});
      const auto r = cli({"train", "--corpus", (tmp / "c.txt").string(), "--out", model, "--backend",
                          "remote-sentence", "--endpoint", first.endpoint(), "--dim", "8"});
      REQUIRE_MESSAGE(r.code == 0, r.err);
    }
    testsupport::StubProvider second({.dim = 8});
    ::setenv("DRIFTDET_PROVIDER_URL", second.endpoint().c_str(), 1);
    const auto s = cli({"score", "--model-dir", model, "--payload", (tmp / "p.txt").string()});
    ::unsetenv("DRIFTDET_PROVIDER_URL");
    REQUIRE_MESSAGE(s.code == 0, s.err);
    CHECK(second.requests() >= 1);
    CHECK(lines_of(s.out).size() == 3);
  }
}
