#include <doctest.h>

#include <cmath>
#include <random>

#include "driftdet/kernels.hpp"

using namespace driftdet;
namespace ks = driftdet::kernels::serial;
namespace ko = driftdet::kernels::omp;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (auto& v : m.data()) v = u(rng);
  return m;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("omp kernels agree with the serial reference bit for bit") {
  std::mt19937_64 rng(5);
  const std::size_t n = 157, d = 13, k = 4;
  const Matrix x = random_matrix(n, d, rng);
  const Matrix means = random_matrix(k, d, rng);
  const Matrix vars = random_matrix(k, d, rng, 0.1, 2.0);
  std::vector<double> logw = {std::log(0.1), std::log(0.2), std::log(0.3), std::log(0.4)};

  Matrix a(n, k), b(n, k);
  ks::diag_gaussian_log_joint(x, logw, means, vars, a);
  ko::diag_gaussian_log_joint(x, logw, means, vars, b);
  CHECK(a == b);

  std::vector<double> la(n), lb(n);
  ks::row_logsumexp(a, la);
  ko::row_logsumexp(a, lb);
  CHECK(la == lb);

  Matrix resp = random_matrix(n, k, rng, 0.0, 1.0);
  std::vector<double> ca(k), cb(k);
  Matrix ma(k, d), mb(k, d), va(k, d), vb(k, d);
  ks::weighted_moments(x, resp, 1e-6, ca, ma, va);
  ko::weighted_moments(x, resp, 1e-6, cb, mb, vb);
  CHECK(ca == cb);
  CHECK(ma == mb);
  CHECK(va == vb);

  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % 3);
  labels[0] = 3;  // singleton cluster
  std::vector<double> sa(n), sb(n);
  ks::silhouette_samples(x, labels, 4, sa);
  ko::silhouette_samples(x, labels, 4, sb);
  CHECK(sa == sb);
  CHECK(sa[0] == 0.0);

  const auto w = random_vector(7 * d, rng);
  const auto bias = random_vector(7, rng);
  Matrix oa(n, 7), ob(n, 7);
  ks::affine(x, w, bias, oa);
  ko::affine(x, w, bias, ob);
  CHECK(oa == ob);

  Matrix delta = random_matrix(n, 7, rng);
  Matrix da(n, d), db(n, d);
  ks::affine_input_grad(delta, w, da);
  ko::affine_input_grad(delta, w, db);
  CHECK(da == db);

  std::vector<double> gwa(7 * d, 0.0), gwb(7 * d, 0.0), gba(7, 0.0), gbb(7, 0.0);
  ks::accumulate_weight_grad(delta, x, gwa, gba);
  ko::accumulate_weight_grad(delta, x, gwb, gbb);
  CHECK(gwa == gwb);
  CHECK(gba == gbb);

  const auto ref = random_vector(d, rng);
  std::vector<double> cra(n), crb(n);
  ks::cosine_rows(x, ref, cra);
  ko::cosine_rows(x, ref, crb);
  CHECK(cra == crb);
}

TEST_CASE("serial kernels against direct formulas") {
  Matrix x = Matrix::from_rows({{1.0, 2.0}, {0.0, 0.0}});
  std::vector<double> logw = {0.0};
  Matrix means = Matrix::from_rows({{0.0, 0.0}});
  Matrix vars = Matrix::from_rows({{1.0, 4.0}});
  Matrix out(2, 1);
  ks::diag_gaussian_log_joint(x, logw, means, vars, out);
  const double log2pi = std::log(2.0 * M_PI);
  CHECK(out(0, 0) == doctest::Approx(-0.5 * (2 * log2pi + std::log(4.0) + 1.0 + 1.0)).epsilon(1e-14));

  Matrix m = Matrix::from_rows({{1000.0, 1000.0}, {-1e308, 0.0}});
  std::vector<double> lse(2);
  ks::row_logsumexp(m, lse);
  CHECK(lse[0] == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(lse[1] == doctest::Approx(0.0));

  std::vector<double> cos(2);
  ks::cosine_rows(x, std::vector<double>{2.0, 4.0}, cos);
  CHECK(cos[0] == doctest::Approx(1.0));
  CHECK(cos[1] == 0.0);
}

}  // TEST_SUITE
