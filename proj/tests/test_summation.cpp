#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "sqm/cons_basis.hpp"
#include "sqm/summation.hpp"

using namespace sqm;

TEST_CASE("cesaro_mean basics") {
  std::vector<double> ones(200, 1.0);
  // constant c: (n+1)/n * c
  CHECK(cesaro_mean(ones, 100) == doctest::Approx(101.0 / 100.0));
  std::vector<double> delta(200, 0.0);
  delta[0] = 1.0;
  CHECK(cesaro_mean(delta, 100) == doctest::Approx(0.01));
  CHECK_THROWS_AS(cesaro_mean(ones, 0), std::invalid_argument);
  CHECK_THROWS_AS(cesaro_mean(std::vector<double>{1.0}, 5),
                  std::invalid_argument);
}

TEST_CASE("abel_sum basics") {
  std::vector<double> c(6000, 3.5);
  SUBCASE("constant sequence sums to the constant") {
    for (double x : {0.0, 0.3, 0.9, 0.995})
      CHECK(abel_sum(c, x, 1e-10).value == doctest::Approx(3.5).epsilon(1e-9));
  }
  SUBCASE("delta sequence") {
    std::vector<double> d(64, 0.0);
    d[0] = 1.0;
    CHECK(abel_sum(d, 0.5).value == doctest::Approx(0.5));
  }
  SUBCASE("alternating 1,0,1,0,... tends to 1/2 like 1/(1+x)") {
    std::vector<double> alt(60000);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = (i % 2 == 0) ? 1.0 : 0.0;
    for (double x : {0.5, 0.9, 0.99}) {
      CHECK(abel_sum(alt, x, 1e-12).value ==
            doctest::Approx(1.0 / (1.0 + x)).epsilon(1e-9));
    }
  }
  SUBCASE("truncation error carries the achievable bound") {
    std::vector<double> small(8, 1.0);
    try {
      abel_sum(small, 0.99, 1e-12);
      FAIL("expected truncation_error");
    } catch (const truncation_error& e) {
      CHECK(e.achievable_bound() ==
            doctest::Approx(std::pow(0.99, 8.0)).epsilon(1e-12));
    }
  }
  SUBCASE("the reported bound is honored when eps is refined") {
    std::vector<double> seq(100000);
    for (std::size_t i = 0; i < seq.size(); ++i)
      seq[i] = 1.0 + 0.5 * std::sin(0.1 * double(i));
    const SummationResult coarse = abel_sum(seq, 0.99, 1e-4);
    const SummationResult fine = abel_sum(seq, 0.99, 1e-10);
    CHECK(std::abs(coarse.value - fine.value) <= coarse.truncation_bound);
    CHECK(fine.truncation_bound < coarse.truncation_bound);
  }
}

TEST_CASE("linearity of both engines") {
  std::vector<double> a(512), b(512), combo(512);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = std::cos(0.2 * double(i));
    b[i] = 1.0 / (1.0 + double(i));
    combo[i] = 2.0 * a[i] + 3.0 * b[i];
  }
  CHECK(cesaro_mean(combo, 300) ==
        doctest::Approx(2.0 * cesaro_mean(a, 300) + 3.0 * cesaro_mean(b, 300))
            .epsilon(1e-13));
  // the truncation point depends on sup|seq|, so match tolerances to eps
  CHECK(abel_sum(combo, 0.7, 1e-13).value ==
        doctest::Approx(2.0 * abel_sum(a, 0.7, 1e-13).value +
                        3.0 * abel_sum(b, 0.7, 1e-13).value)
            .epsilon(1e-10));
}

TEST_CASE("tauberian_check") {
  SUBCASE("constant sequence: gap tends to zero") {
    std::vector<double> c(70000, 2.0);
    const std::vector<double> xs{0.5, 0.9375, 0.998};
    const std::vector<std::size_t> ns{2, 16, 512};
    const TauberianReport rep = tauberian_check(c, xs, ns);
    CHECK(rep.nonnegative);
    REQUIRE(rep.gaps.size() == 3);
    CHECK(rep.gaps.back() < rep.gaps.front());
    CHECK(rep.gaps.back() < 0.01);
  }
  SUBCASE("negative entry flags the precondition") {
    std::vector<double> seq(100, 1.0);
    seq[17] = -0.5;
    const TauberianReport rep = tauberian_check(seq, {}, {});
    CHECK_FALSE(rep.nonnegative);
    REQUIRE(rep.negative_indices.size() == 1);
    CHECK(rep.negative_indices[0] == 17);
  }
  SUBCASE("brownian energies: both engines track the same limit") {
    const Path b = make_brownian(1.0, 1 << 14, 42);
    // the finest Abel scale needs ~20k terms for its geometric tail
    const CoefficientSequence seq = coefficient_sequence(b, 1 << 15);
    const TauberianSchedules sched = tauberian_matched_schedules(4, 11);
    const TauberianReport rep =
        tauberian_check(seq.energy, sched.x, sched.n, 1e-3);
    CHECK(rep.nonnegative);
    // trajectories converge toward the same value; flag (not fail) slow
    // convergence by a loose relative bound at the finest matched scale
    const double scale = rep.cesaro_trajectory.back().second;
    CHECK(rep.gaps.back() < 0.2 * scale);
    CHECK(rep.gaps.back() < rep.gaps.front() + 0.05 * scale);
  }
}

TEST_CASE("cesaro_qv") {
  SUBCASE("phi(t)=t has energies (1,0,0,...) so the mean is 1/n") {
    const Path lin = make_linear(1.0, 2048, 1.0);
    for (std::size_t n : {16, 256})
      CHECK(cesaro_qv(lin, n) == doctest::Approx(1.0 / double(n)).epsilon(1e-10));
  }
  SUBCASE("finite-mode path: (sum c_k^2)/n") {
    const std::vector<double> coeffs{0.3, -1.2, 0.0, 0.7};
    const Path p = make_smooth_fourier(1.0, 8192, coeffs);
    double energy = 0.0;
    for (double ck : coeffs) energy += ck * ck;
    for (std::size_t n : {64, 1024})
      CHECK(cesaro_qv(p, n) ==
            doctest::Approx(energy / double(n)).epsilon(1e-6));
  }
  SUBCASE("brownian: near the dyadic QV for large n") {
    const Path b = make_brownian(1.0, 1 << 14, 42);
    const double q = qv_limit_dyadic(b, 6, 12).limit;
    CHECK(cesaro_qv(b, 2048) == doctest::Approx(q).epsilon(0.2));
  }
}
