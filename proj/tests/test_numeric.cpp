#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "sqm/numeric.hpp"
#include "support.hpp"

using namespace sqm;

TEST_CASE("pairwise_sum matches plain summation and is chunking-independent") {
  std::vector<double> v(1001);
  Rng rng(7);
  for (auto& x : v) x = rng.uniform() - 0.5;
  double plain = 0.0;
  for (double x : v) plain += x;
  CHECK(pairwise_sum(v) == doctest::Approx(plain).epsilon(1e-12));
  // exact on binary-friendly values regardless of length
  std::vector<double> dyadic(4096, 0.25);
  CHECK(pairwise_sum(dyadic) == 1024.0);
}

TEST_CASE("gk_integrate on known integrals") {
  CHECK(gk_integrate([](double x) { return std::sin(x); }, 0.0, M_PI) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(gk_integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0) ==
        doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  // integrable endpoint behaviour
  CHECK(gk_integrate([](double x) { return std::sqrt(1.0 - x * x); }, 0.0,
                     1.0, 1e-12) == doctest::Approx(M_PI / 4.0).epsilon(1e-9));
}

TEST_CASE("fft_radix2 against a naive DFT") {
  const std::size_t n = 64;
  std::vector<std::complex<double>> a(n);
  Rng rng(3);
  for (auto& x : a) x = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  auto b = a;
  fft_radix2(b, false);
  for (std::size_t k = 0; k < n; k += 7) {
    std::complex<double> ref(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      ref += a[j] * std::polar(1.0, -2.0 * M_PI * double(j * k) / double(n));
    CHECK(std::abs(b[k] - ref) < 1e-10);
  }
  fft_radix2(b, true);
  for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(b[j] - a[j]) < 1e-12);
}

TEST_CASE("sine_table_sums equals direct sine sums") {
  Rng rng(11);
  SUBCASE("power-of-two length (DST route)") {
    const std::size_t m = 32;
    std::vector<double> d(m);
    for (auto& x : d) x = rng.uniform() - 0.5;
    const auto sums = sine_table_sums(d, 70);  // includes k > 2m wraparound
    for (std::size_t k = 0; k <= 70; ++k) {
      double ref = 0.0;
      for (std::size_t j = 1; j < m; ++j)
        ref += d[j] * std::sin(M_PI * double(j) * double(k) / double(m));
      CHECK(sums[k] == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
    }
  }
  SUBCASE("generic length (recurrence route)") {
    const std::size_t m = 37;
    std::vector<double> d(m);
    for (auto& x : d) x = rng.uniform() - 0.5;
    const auto sums = sine_table_sums(d, 25);
    for (std::size_t k = 0; k <= 25; ++k) {
      double ref = 0.0;
      for (std::size_t j = 1; j < m; ++j)
        ref += d[j] * std::sin(M_PI * double(j) * double(k) / double(m));
      CHECK(sums[k] == doctest::Approx(ref).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("Rng streams are reproducible and gaussian moments are sane") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.uniform() == b.uniform());
  Rng g(5);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = g.gaussian();
    sum += x;
    sumsq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("simpson oracle and gk agree") {
  const auto f = [](double x) { return std::cos(3.0 * x) * std::exp(-x); };
  const double a = sqm_test::simpson_oracle(f, 0.0, 2.0);
  const double b = gk_integrate(f, 0.0, 2.0);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}
