#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "sqm/cons_basis.hpp"
#include "sqm/path.hpp"
#include "support.hpp"

using namespace sqm;

namespace {

// Independent evaluation of the coefficient formula:
// sqrt(2/T) [ (-1)^k phi(T) + Int_0^pi phi(Ts/pi) k sin(ks) ds ]
// with the integral done by adaptive Simpson on the interpolated path.
double coefficient_oracle(const Path& p, std::size_t k) {
  if (k == 0) return p.values.back() / std::sqrt(p.T);
  const double kd = double(k);
  const auto integrand = [&](double s) {
    const double t = std::min(s * p.T / M_PI, p.T);
    return p.eval(t) * kd * std::sin(kd * s);
  };
  // split at the path's own breakpoints to keep Simpson honest
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < p.grid.size(); ++i) {
    const double a = M_PI * p.grid[i] / p.T;
    const double b = M_PI * p.grid[i + 1] / p.T;
    acc += sqm_test::simpson_oracle(integrand, a, b, 1e-13);
  }
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return std::sqrt(2.0 / p.T) * (sign * p.values.back() + acc);
}

Path sample_basis_mode(std::size_t k, double T, std::size_t steps) {
  std::vector<double> coeffs(k + 1, 0.0);
  coeffs[k] = 1.0;
  return make_smooth_fourier(T, steps, coeffs);
}

}  // namespace

TEST_CASE("basis_eval special values") {
  CHECK(basis_eval(0, 2.0, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(basis_eval(1, 0.5, 1.0) == doctest::Approx(std::sqrt(2.0) / M_PI));
  for (std::size_t k : {1, 3, 10}) CHECK(basis_eval(k, 0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(basis_eval(2, -0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(basis_eval(2, 1.1, 1.0), std::domain_error);
}

TEST_CASE("coefficients of phi(t)=t: (1, 0, 0, ...)") {
  const Path lin = make_linear(1.0, 4096, 1.0);
  CHECK(cons_coefficient(lin, 0) == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t k : {1, 2, 5, 17})
    CHECK(std::abs(cons_coefficient(lin, k)) < 1e-12);
}

TEST_CASE("zero path has zero coefficients") {
  const Path z = make_zero(1.0, 128);
  const CoefficientSequence seq = coefficient_sequence(z, 100);
  for (double c : seq.coeffs) CHECK(c == 0.0);
}

TEST_CASE("batched output equals elementwise calls bit for bit") {
  const Path b = make_brownian(1.0, 512, 9);
  const CoefficientSequence seq = coefficient_sequence(b, 40);
  for (std::size_t k : {0, 1, 7, 23, 40})
    CHECK(seq.coeffs[k] == cons_coefficient(b, k));
  // non-uniform grid goes through the recurrence route
  Path nu = b;
  nu.grid[100] += 0.3 * (nu.grid[101] - nu.grid[100]);
  const CoefficientSequence seq2 = coefficient_sequence(nu, 12);
  for (std::size_t k : {0, 3, 12}) CHECK(seq2.coeffs[k] == cons_coefficient(nu, k));
}

TEST_CASE("exact segment evaluation matches the quadrature oracle") {
  const Path b = make_brownian(2.0, 256, 4);
  for (std::size_t k : {1, 2, 5, 17}) {
    CHECK(cons_coefficient(b, k) ==
          doctest::Approx(coefficient_oracle(b, k)).epsilon(1e-10).scale(1.0));
  }
  // T != 1 linear path
  const Path lin = make_linear(2.0, 512, 0.7);
  for (std::size_t k : {1, 4})
    CHECK(cons_coefficient(lin, k) ==
          doctest::Approx(coefficient_oracle(lin, k)).epsilon(1e-10).scale(1.0));
}

TEST_CASE("Gram matrix of sampled basis modes is the identity to 1e-8") {
  const double T = 1.0;
  const std::size_t steps = 1 << 19;
  for (std::size_t i : {0, 1, 2, 7, 13, 20}) {
    const Path ei = sample_basis_mode(i, T, steps);
    const CoefficientSequence seq = coefficient_sequence(ei, 20);
    for (std::size_t j = 0; j <= 20; ++j) {
      const double expected = (i == j) ? 1.0 : 0.0;
      CHECK(std::abs(seq.coeffs[j] - expected) < 1e-8);
    }
  }
}

TEST_CASE("linearity on a shared grid") {
  const Path a = make_brownian(1.0, 512, 100);
  const Path b = make_brownian(1.0, 512, 200);
  Path combo = a;
  for (std::size_t i = 0; i < combo.values.size(); ++i)
    combo.values[i] = 2.0 * a.values[i] - 0.5 * b.values[i];
  for (std::size_t k : {0, 1, 9}) {
    const double lhs = cons_coefficient(combo, k);
    const double rhs =
        2.0 * cons_coefficient(a, k) - 0.5 * cons_coefficient(b, k);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("Nyquist flag") {
  const Path b = make_brownian(1.0, 256, 5);
  CHECK(coefficient_sequence(b, 100).resolution_limited() == false);
  CHECK(coefficient_sequence(b, 200).resolution_limited() == true);
  CHECK(coefficient_sequence(b, 200).nyquist_index == 128);
}
