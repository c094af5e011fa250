#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "driftdet/eval.hpp"
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

std::vector<Document> labelled(std::size_t per_class, std::vector<std::string> labels) {
  std::vector<Document> docs;
  for (const auto& l : labels) {
    for (std::size_t i = 0; i < per_class; ++i) {
      docs.push_back({l + "-" + std::to_string(i), "text " + l + " " + std::to_string(i), l});
    }
  }
  return docs;
}

std::size_t count_label(const std::vector<Document>& docs, const std::string& label) {
  return static_cast<std::size_t>(
      std::count_if(docs.begin(), docs.end(), [&](const Document& d) { return d.label == label; }));
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("stratified split keeps 80/20 per class") {
    const auto docs = labelled(10, {"a", "b"});
    const auto s = stratified_split(docs, 0.8, 1);
    CHECK(s.train.size() == 16);
    CHECK(s.held_out.size() == 4);
    CHECK(count_label(s.train, "a") == 8);
    CHECK(count_label(s.train, "b") == 8);
    CHECK(count_label(s.held_out, "a") == 2);
    CHECK(count_label(s.held_out, "b") == 2);
  }

  TEST_CASE("split is disjoint, complete and seeded") {
    const auto docs = labelled(37, {"x", "y", "z"});
    const auto a = stratified_split(docs, 0.8, 9);
    const auto b = stratified_split(docs, 0.8, 9);
    std::set<std::string> ids;
    for (const auto& d : a.train) ids.insert(d.id);
    for (const auto& d : a.held_out) CHECK(ids.insert(d.id).second);
    CHECK(ids.size() == docs.size());
    REQUIRE(a.train.size() == b.train.size());
    for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(a.train[i].id == b.train[i].id);
    const auto c = stratified_split(docs, 0.8, 10);
    bool differs = false;
    for (std::size_t i = 0; i < a.train.size(); ++i) differs |= a.train[i].id != c.train[i].id;
    CHECK(differs);
  }

  TEST_CASE("split errors") {
    auto docs = labelled(10, {"a"});
    docs.push_back({"lonely", "one", std::string("b")});
    CHECK(code_of([&] { stratified_split(docs, 0.8, 1); }) == ErrorCode::ClassTooSmall);
    auto unl = labelled(4, {"a"});
    unl[2].label.reset();
    CHECK(code_of([&] { stratified_split(unl, 0.8, 1); }) == ErrorCode::UnlabeledDocument);
    CHECK(code_of([&] { stratified_split(labelled(4, {"a"}), 1.0, 1); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("scaled accuracy examples") {
    CHECK(scaled_accuracy(10, 20, 9, 18) == 0.9);
    CHECK(scaled_accuracy(10, 20, 10, 20) == 1.0);
    CHECK(scaled_accuracy(10, 20, 0, 0) == 0.0);
    CHECK(scaled_accuracy(7, 7, 3, 5) == doctest::Approx(8.0 / 14.0).epsilon(1e-15));
    CHECK(code_of([] { scaled_accuracy(0, 5, 0, 0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { scaled_accuracy(5, 5, 6, 0); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("scaled accuracy equals the average of per-set rates") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> n(1, 5000);
    for (int t = 0; t < 1000; ++t) {
      const std::size_t ni = n(rng), no = n(rng);
      const std::size_t ci = std::uniform_int_distribution<std::size_t>(0, ni)(rng);
      const std::size_t co = std::uniform_int_distribution<std::size_t>(0, no)(rng);
      const double a = scaled_accuracy(ni, no, ci, co);
      const double ref = 0.5 * (static_cast<double>(ci) / static_cast<double>(ni) +
                                static_cast<double>(co) / static_cast<double>(no));
      CHECK(a == doctest::Approx(ref).epsilon(1e-12));
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      const double same = scaled_accuracy(no, no, std::min(ci, no), co);
      CHECK(same == static_cast<double>(std::min(ci, no) + co) / static_cast<double>(2 * no));
    }
  }

  TEST_CASE("degenerate thresholds give one half") {
    const std::vector<double> iid = {0.2, 0.7, 0.99, 0.999};
    const std::vector<double> ood = {0.1, 0.5, 0.6};
    CHECK(evaluate_threshold(iid, ood, 0.0).accuracy == 0.5);
    CHECK(evaluate_threshold(iid, ood, 1.0).accuracy == 0.5);
    const auto r = evaluate_threshold(iid, ood, 0.7);
    CHECK(r.correct_iid == 3);
    CHECK(r.correct_ood == 3);
  }

  TEST_CASE("candidate thresholds") {
    const std::vector<double> iid = {0.3, 0.9, 0.3};
    const std::vector<double> ood = {0.9, 1.0};
    const auto t = candidate_thresholds(iid, ood);
    CHECK(t == std::vector<double>{0.0, 0.3, 0.9, kDefaultThreshold, 1.0});
  }

  TEST_CASE("sweep matches a direct recount") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> iid(200), ood(150);
    for (auto& v : iid) v = std::min(1.0, 0.4 + u(rng));
    for (auto& v : ood) v = 0.8 * u(rng);
    const std::vector<double> req = {0.5, 0.995};
    const auto r = sweep_scores(iid, ood, req);
    double best = 0.0;
    for (double t : candidate_thresholds(iid, ood)) {
      std::size_t ci = 0, co = 0;
      for (double s : iid) ci += s >= t;
      for (double s : ood) co += s < t;
      const double acc = (static_cast<double>(ci) * 150.0 / 200.0 + static_cast<double>(co)) / 300.0;
      best = std::max(best, acc);
    }
    CHECK(r.best.accuracy == doctest::Approx(best).epsilon(1e-12));
    CHECK(r.sweep.size() == candidate_thresholds(iid, ood).size());
    REQUIRE(r.requested.size() == 2);
    CHECK(r.requested[1].accuracy == r.at_default.accuracy);
    for (const auto& e : r.sweep) CHECK(e.accuracy <= r.best.accuracy);
  }

  TEST_CASE("benchmark on a separable pair") {
    testsupport::HardPairOptions o;
    o.dim = 32;
    o.common = 0.0;
    o.topic = 3.0;
    o.noise = 0.1;
    o.insurance_per_topic = 60;
    o.news_docs = 120;
    o.seed = 11;
    const auto pair = testsupport::hard_pair(o);
    TempDir tmp;
    save_vector_file(tmp / "v.txt", pair.vectors);
    PipelineConfig c;
    c.backend.kind = BackendKind::VectorFile;
    c.vector_file = tmp / "v.txt";
    c.model_kind = ModelKind::Centroid;
    const std::vector<double> req = {0.0, 0.9};
    const auto r = run_benchmark(pair.insurance, pair.news, c, req);
    CHECK(r.n_train == 192);
    CHECK(r.iid_scores.size() == 48);
    CHECK(r.ood_scores.size() == 120);
    CHECK(r.best.accuracy >= 0.99);
    CHECK(r.requested[0].accuracy == 0.5);

    const auto csv = benchmark_csv(r, "ins-vs-news", c);
    CHECK(csv.rfind(std::string(kBenchmarkCsvHeader) + "\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(csv.find("ins-vs-news,vector-file,centroid,0,0.5,") != std::string::npos);
    const auto j = benchmark_json(r, "ins-vs-news", c);
    CHECK(j["schema_version"] == 1);
    CHECK(j["requested"].size() == 2);
    CHECK(j["best"]["accuracy"].get<double>() == r.best.accuracy);
  }

  TEST_CASE("benchmark without labels uses one stratum") {
    auto movie = testsupport::movie_reviews(60, 2);
    for (auto& d : movie) d.label.reset();
    const auto food = testsupport::restaurant_reviews(30, 3);
    PipelineConfig c;
    c.backend.dim = 16;
    c.skipgram.epochs = 2;
    const auto r = run_benchmark(movie, food, c);
    CHECK(r.n_train == 48);
    CHECK(r.iid_scores.size() == 12);
  }

  TEST_CASE("benchmark input errors") {
    PipelineConfig c;
    const std::vector<Document> none;
    CHECK(code_of([&] { run_benchmark(none, labelled(3, {"a"}), c); }) == ErrorCode::EmptyCorpus);
  }
}
