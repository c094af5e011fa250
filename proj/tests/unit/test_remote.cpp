#include <doctest.h>

#include "driftdet/embeddings.hpp"
#include "stub_provider.hpp"

using namespace driftdet;
using testsupport::StubOptions;
using testsupport::StubProvider;

namespace {

CleanDocument doc_of(std::string text, std::string id) {
  CleanDocument d{std::move(id), {}, std::move(text)};
  std::size_t start = 0;
  while (start < d.sentence_text.size()) {
    auto end = d.sentence_text.find(' ', start);
    if (end == std::string::npos) end = d.sentence_text.size();
    d.tokens.push_back(d.sentence_text.substr(start, end - start));
    start = end + 1;
  }
  return d;
}

ProviderOptions fast_retry() {
  ProviderOptions p;
  p.retry.initial_backoff = std::chrono::milliseconds(1);
  p.timeout = std::chrono::seconds(5);
  return p;
}

BackendDescriptor remote(BackendKind kind, const StubProvider& stub, std::size_t dim) {
  BackendDescriptor d;
  d.kind = kind;
  d.dim = dim;
  d.endpoint = stub.endpoint();
  return d;
}

std::vector<CleanDocument> five_docs() {
  return {doc_of("alpha beta", "d0"), doc_of("gamma", "d1"), doc_of("delta epsilon zeta", "d2"),
          doc_of("eta", "d3"), doc_of("theta iota", "d4")};
}

}  // namespace

TEST_SUITE("remote") {

TEST_CASE("sentence backend chunks by batch size and preserves order") {
  StubProvider stub({.dim = 6});
  auto opts = fast_retry();
  opts.max_in_flight = 3;
  RemoteBackend backend(remote(BackendKind::RemoteSentence, stub, 6), opts);
  const auto docs = five_docs();
  const auto batch = backend.embed_batch(docs, 2);
  CHECK(stub.requests() == 3);
  REQUIRE(batch.vectors.size() == 5);
  CHECK(batch.failures.empty());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(batch.vectors[i]->values == StubProvider::vector_for(docs[i].sentence_text, 6));
  }
  std::size_t sent = 0;
  for (const auto& b : stub.batches()) {
    CHECK(b.size() <= 2);
    sent += b.size();
  }
  CHECK(sent == 5);
}

TEST_CASE("sentence vectors pass through unchanged") {
  StubProvider stub({.dim = 384});
  RemoteBackend backend(remote(BackendKind::RemoteSentence, stub, 384), fast_retry());
  const auto d = doc_of("a fixed sentence", "x");
  CHECK(backend.embed(d).values == StubProvider::vector_for("a fixed sentence", 384));
}

TEST_CASE("token-average backend averages one vector per token") {
  StubProvider stub({.dim = 4});
  RemoteBackend backend(remote(BackendKind::RemoteTokenAvg, stub, 4), fast_retry());
  const auto d = doc_of("red green blue", "x");
  const auto v = backend.embed(d);
  for (std::size_t j = 0; j < 4; ++j) {
    const double expect = (StubProvider::vector_for("red", 4)[j] + StubProvider::vector_for("green", 4)[j] +
                           StubProvider::vector_for("blue", 4)[j]) / 3.0;
    CHECK(v.values[j] == doctest::Approx(expect).epsilon(1e-12));
  }
  REQUIRE(stub.batches().size() == 1);
  CHECK(stub.batches()[0] == std::vector<std::string>{"red", "green", "blue"});
}

TEST_CASE("retries transient failures") {
  StubProvider stub({.dim = 3, .fail_first = 2});
  RemoteBackend backend(remote(BackendKind::RemoteSentence, stub, 3), fast_retry());
  const auto v = backend.embed(doc_of("hello", "x"));
  CHECK(v.values == StubProvider::vector_for("hello", 3));
  CHECK(stub.requests() == 3);
}

TEST_CASE("gives up after three attempts") {
  StubProvider stub({.dim = 3, .fail_first = 100, .fail_status = 503});
  RemoteBackend backend(remote(BackendKind::RemoteSentence, stub, 3), fast_retry());
  const auto docs = five_docs();
  try {
    backend.embed_batch(docs, 5);
    FAIL("expected ProviderError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProviderError);
    CHECK(e.status == 503);
  }
  CHECK(stub.requests() == 3);
}

TEST_CASE("unreachable provider") {
  BackendDescriptor d;
  d.kind = BackendKind::RemoteSentence;
  d.dim = 3;
  d.endpoint = "http://127.0.0.1:1";
  RemoteBackend backend(d, fast_retry());
  try {
    backend.embed(doc_of("x", "x"));
    FAIL("expected ProviderError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProviderError);
    CHECK(e.status == 0);
  }
}

TEST_CASE("wrong reply width is a dimension mismatch") {
  StubProvider stub({.dim = 8, .reply_width = 5});
  RemoteBackend backend(remote(BackendKind::RemoteSentence, stub, 8), fast_retry());
  try {
    backend.embed_batch(five_docs(), 2);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("endpoint must be http") {
  BackendDescriptor d;
  d.kind = BackendKind::RemoteSentence;
  d.endpoint = "ftp://host";
  CHECK_THROWS_AS(RemoteBackend(d, ProviderOptions{}), Error);
}

}  // TEST_SUITE
