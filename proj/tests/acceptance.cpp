// Acceptance suite: every release criterion with its pinned tolerance, one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sqm/cons_basis.hpp"
#include "sqm/levy.hpp"
#include "sqm/numeric.hpp"
#include "sqm/path.hpp"
#include "sqm/poisson.hpp"
#include "sqm/random_systems.hpp"
#include "sqm/report.hpp"
#include "sqm/sqrt_calculus.hpp"
#include "sqm/summation.hpp"

using namespace sqm;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string name)
      : number_(number), name_(std::move(name)),
        start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) {
      pass_ = false;
      details_.push_back(detail);
    }
  }

  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

  ~Criterion() {
    std::printf("[%2d] %-22s %s (%.2f s)\n", number_, name_.c_str(),
                pass_ ? "PASS" : "FAIL", seconds());
    for (const auto& d : details_) std::printf("     - %s\n", d.c_str());
    if (!pass_) ++g_failures;
  }

 private:
  int number_;
  std::string name_;
  bool pass_ = true;
  std::vector<std::string> details_;
  std::chrono::steady_clock::time_point start_;
};

std::string num(double v) { return format_float(v); }

// ---- 1: kernel moment limits -------------------------------------------------
void criterion_kernel_limits() {
  Criterion c(1, "kernel-limits");
  const double x = 1.0 - 1e-4;
  const KernelMoments m = kernel_moment_integrals(x, 0.5);
  c.expect(std::abs(m.abs_moment - 5.0 / (2.0 * M_PI)) < 1e-2,
           "abs moment " + num(m.abs_moment));
  c.expect(std::abs(m.signed_moment + 2.0 / M_PI) < 1e-3,
           "signed moment " + num(m.signed_moment));
  c.expect(m.tail_abs_moment < 1e-3, "tail " + num(m.tail_abs_moment));
  c.expect(c.seconds() < 1.0, "runtime " + num(c.seconds()));
}

// ---- 2: delta action ----------------------------------------------------------
void criterion_delta_action() {
  Criterion c(2, "delta-action");
  const double x = 1.0 - 1e-4;
  const std::size_t m = 4096;
  std::vector<double> nodes(m + 1), ones(m + 1), coss(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    nodes[i] = M_PI * double(i) / double(m);
    ones[i] = 1.0;
    coss[i] = std::cos(nodes[i]);
  }
  const double got_cos = p1_delta_action(nodes, coss, x);
  c.expect(std::abs(got_cos - 2.0 / M_PI) < 1e-3,
           "cos action " + num(got_cos));
  const double closed =
      (1.0 + x) / M_PI - (1.0 - x) * (1.0 - x) / ((1.0 + x) * M_PI);
  const double got_one = p1_delta_action(nodes, ones, x);
  c.expect(std::abs(got_one - closed) < 1e-10,
           "constant action " + num(got_one) + " vs " + num(closed));
}

// ---- 3: theta_x ---------------------------------------------------------------
void criterion_theta() {
  Criterion c(3, "theta-zero");
  for (double x : {0.1, 0.5, 0.9, 0.999}) {
    const double p2 = std::abs(poisson_p2(x, theta_x(x)));
    c.expect(p2 < 1e-10, "P2 at theta(" + num(x) + ") = " + num(p2));
  }
  c.expect(theta_x(0.999) < 0.15, "theta(0.999) = " + num(theta_x(0.999)));
}

// ---- 4: deterministic Cesaro branch -------------------------------------------
void criterion_cesaro_deterministic() {
  Criterion c(4, "cesaro-deterministic");
  const std::vector<double> coeffs{0.4, -0.7, 0.3, 0.0, 0.2, -0.1, 0.05, 0.15,
                                   -0.25};
  const Path p = make_smooth_fourier(1.0, std::size_t{1} << 18, coeffs);
  double energy = 0.0;
  for (double ck : coeffs) energy += ck * ck;
  for (std::size_t n : {64, 1024, 4096}) {
    const double mean = cesaro_qv(p, n);
    const double expected = energy / double(n);
    const double rel = std::abs(mean - expected) / expected;
    c.expect(rel < 1e-8,
             "n=" + std::to_string(n) + " rel err " + num(rel));
  }
}

// ---- 5 and 6: stochastic Cesaro branch and the Abel comparison ----------------
void criteria_brownian_cesaro_and_abel() {
  const std::size_t steps = std::size_t{1} << 16;
  const std::size_t n_ces = 4096;
  const std::size_t n_abel = 32768;  // enough for the geometric tail at x
  const double x_abel = 1.0 - 1.0 / 4096.0;
  const int seeds = 20;

  std::vector<double> rel_errors, abel_ratios;
  {
    Criterion c(5, "cesaro-brownian");
    int within = 0;
    double rel_sum = 0.0;
    for (int s = 0; s < seeds; ++s) {
      const Path b = make_brownian(1.0, steps, 1000 + s);
      const CoefficientSequence seq = coefficient_sequence(b, n_abel);
      const double q_dyadic = qv_limit_dyadic(b, 6, 12).limit;
      const double mean = cesaro_mean(seq.energy, n_ces);
      const double rel = std::abs(mean - q_dyadic) / q_dyadic;
      rel_errors.push_back(rel);
      rel_sum += rel;
      if (rel < 0.15) ++within;
      const double abel = abel_sum(seq.energy, x_abel, 0.011).value;
      abel_ratios.push_back(std::abs(abel - mean) / q_dyadic);
    }
    c.expect(within >= 16, "within 15%: " + std::to_string(within) + "/20");
    c.expect(rel_sum / seeds < 0.10,
             "seed-averaged rel err " + num(rel_sum / seeds));
    c.expect(c.seconds() < 60.0, "runtime " + num(c.seconds()));
  }
  {
    Criterion c(6, "abel-cesaro-gap");
    std::sort(abel_ratios.begin(), abel_ratios.end());
    const double median = 0.5 * (abel_ratios[abel_ratios.size() / 2 - 1] +
                                 abel_ratios[abel_ratios.size() / 2]);
    c.expect(median < 0.05, "median |abel-cesaro|/Q " + num(median));
  }
}

// ---- 7: symbol scaling ---------------------------------------------------------
void criterion_symbol_scaling() {
  Criterion c(7, "symbol-scaling");
  const Path b = make_brownian(1.0, std::size_t{1} << 16, 7);
  const double base = levy_symbol(b);
  for (double sigma : {0.5, 2.0}) {
    const double scaled = levy_symbol(scale_path(b, sigma));
    c.expect(scaled == sigma * sigma * base,
             "sigma=" + num(sigma) + " not bitwise");
  }
  const double s3 = levy_symbol(scale_path(b, 3.0));
  c.expect(std::abs(s3 - 9.0 * base) <= 8.0 * 1e-15 * std::abs(9.0 * base),
           "sigma=321 beyond ulp scale: " + num(s3 - 9.0 * base));
}

// ---- 8: Gaussian calculus suite -------------------------------------------------
void criterion_gauss_suite() {
  Criterion c(8, "gauss-suite");
  Rng rng(7);
  // Parseval
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const MixtureSystem f = random_mixture(rng, 3, 3);
    worst = std::max(worst,
                     std::abs(hellinger_norm(fourier(f)) - hellinger_norm(f)));
  }
  c.expect(worst < 1e-10, "parseval " + num(worst));
  // Hellinger closed form vs quadrature
  {
    const Factor f = GaussFactor::plain(0.4, 0.8, 1.0);
    const Factor g = GaussFactor::plain(-0.9, 1.7, 1.0);
    const double closed = factor_overlap(f, g).real();
    const double numeric = gk_integrate(
        [&](double x) {
          return (factor_eval(f, x) * std::conj(factor_eval(g, x))).real();
        },
        -40.0, 40.0, 1e-14);
    c.expect(std::abs(closed - numeric) < 1e-10,
             "hellinger quadrature " + num(closed - numeric));
  }
  // pairing and derivative-Fourier compatibility
  double worst_pair = 0.0, worst_df = 0.0;
  for (int i = 0; i < 8; ++i) {
    const MixtureSystem f =
        MixtureSystem::single(random_plain_system(rng, 3, true));
    const MixtureSystem g =
        MixtureSystem::single(random_plain_system(rng, 3, true));
    const std::vector<double> rho{2.0 * rng.uniform() - 1.0,
                                  2.0 * rng.uniform() - 1.0,
                                  2.0 * rng.uniform() - 1.0};
    const cxd pair =
        hellinger_inner(
            directional_derivative(f, rho, DerivativeMethod::closed_form), g) +
        hellinger_inner(
            f, directional_derivative(g, rho, DerivativeMethod::closed_form));
    worst_pair = std::max(worst_pair, std::abs(pair));
    std::vector<cxd> lambda;
    for (double r : rho) lambda.push_back(cxd(0.0, 2.0 * M_PI * r));
    worst_df = std::max(
        worst_df, hellinger_distance(
                      fourier(directional_derivative(
                          f, rho, DerivativeMethod::closed_form)),
                      multiply_linear(fourier(f), lambda)));
  }
  c.expect(worst_pair < 1e-8, "pairing " + num(worst_pair));
  c.expect(worst_df < 1e-8, "derivative fourier " + num(worst_df));
  // cross moments
  double worst_cm = 0.0;
  for (int i = 0; i < 8; ++i) {
    const MixtureSystem f =
        MixtureSystem::single(random_plain_system(rng, 3, true));
    worst_cm = std::max(worst_cm, std::abs(cross_moment(f, 1, 2)));
  }
  c.expect(worst_cm < 1e-10, "cross moment " + num(worst_cm));
  // derivative bound on 100 random instances
  bool frechet_ok = true;
  for (int i = 0; i < 100; ++i) {
    MixtureSystem f;
    f.terms.push_back(
        {cxd(0.1 + rng.uniform(), 0.0), random_plain_system(rng, 3, true)});
    const std::vector<double> a{0.5 + rng.uniform(), 0.5 + rng.uniform(),
                                0.5 + rng.uniform()};
    const std::vector<double> rho{2.0 * rng.uniform() - 1.0,
                                  2.0 * rng.uniform() - 1.0,
                                  2.0 * rng.uniform() - 1.0};
    frechet_ok = frechet_ok && frechet_bound_check(f, a, rho).holds;
  }
  c.expect(frechet_ok, "derivative bound violated");
  // convolution theorem
  double worst_conv = 0.0;
  for (int i = 0; i < 5; ++i) {
    const ProductSystem mu = random_plain_system(rng, 3, false);
    const MixtureSystem f =
        MixtureSystem::single(random_plain_system(rng, 3, true));
    worst_conv =
        std::max(worst_conv, convolution_theorem_check(mu, f).distance);
  }
  c.expect(worst_conv < 1e-8, "convolution " + num(worst_conv));
  c.expect(c.seconds() < 10.0, "runtime " + num(c.seconds()));
}

// ---- 9: spherical kernel --------------------------------------------------------
void criterion_spherical() {
  Criterion c(9, "spherical-kernel");
  for (std::size_t n : {10, 50, 200}) {
    for (double rho : {0.1, 1.0}) {
      const SphericalKernelEval e =
          spherical_kernel(n, rho, static_cast<double>(n));
      const double diff = std::abs(e.value_quadrature - e.value_series);
      c.expect(diff < 1e-8, "n=" + std::to_string(n) + " rho=" + num(rho) +
                                " diff " + num(diff));
      c.expect(std::abs(e.value_series - std::exp(e.x_n)) <=
                   e.error_bound * (1.0 + 1e-12),
               "bound violated at n=" + std::to_string(n));
    }
    const SphericalKernelEval z = spherical_kernel(n, 0.0, double(n));
    c.expect(z.value_series == 1.0 && z.value_quadrature == 1.0,
             "I_n(0) != 1");
  }
}

// ---- 10: difference quotient -----------------------------------------------------
void criterion_difference_quotient() {
  Criterion c(10, "difference-quotient");
  const double rho = 1e-3;
  for (double q : {0.25, 1.0, 4.0}) {
    const double v = laplacian_difference_quotient(q, rho);
    const double err = std::abs(v + 4.0 * M_PI * M_PI * q);
    const double bound = 4.0 * std::pow(M_PI, 4.0) * q * q * rho * rho * 1.01;
    c.expect(err <= bound, "q=" + num(q) + " err " + num(err));
  }
}

// ---- 11: Riemann sandwich ---------------------------------------------------------
void criterion_sandwich() {
  Criterion c(11, "riemann-sandwich");
  int holds = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Path b = make_brownian(1.0, std::size_t{1} << 14, seed);
    if (riemann_sandwich(b, 8, 14).holds) ++holds;
  }
  c.expect(holds == 10, "holds " + std::to_string(holds) + "/10");
}

// ---- 12: Schwarz suite --------------------------------------------------------------
void criterion_schwarz() {
  Criterion c(12, "schwarz");
  Rng rng(109);
  bool ok = true;
  for (int i = 0; i < 1000; ++i) {
    const MixtureSystem f = random_mixture(rng, 3, 3);
    const MixtureSystem g = random_mixture(rng, 3, 2);
    ok = ok && std::abs(hellinger_inner(f, g)) <=
                   hellinger_norm(f) * hellinger_norm(g) + 1e-12;
  }
  c.expect(ok, "inner-product inequality violated");
  bool box_ok = true;
  for (int i = 0; i < 100; ++i) {
    const MixtureSystem f = random_mixture(rng, 2, 2);
    const MixtureSystem g = random_mixture(rng, 2, 2);
    const double a = 3.0 * (rng.uniform() - 0.5);
    const double b = 3.0 * (rng.uniform() - 0.5);
    const std::vector<std::pair<double, double>> box{
        {a, a + 2.0 * rng.uniform() + 0.1}, {b, b + 2.0 * rng.uniform() + 0.1}};
    const double lhs = std::abs(product_measure_box(f, g, box));
    const double ff = product_measure_box(f, f, box).real();
    const double gg = product_measure_box(g, g, box).real();
    box_ok = box_ok && lhs <= std::sqrt(ff) * std::sqrt(gg) + 1e-10;
  }
  c.expect(box_ok, "cylinder-set inequality violated");
}

// ---- 13: CLI determinism --------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism() {
  Criterion c(13, "determinism");
#ifndef SQM_CLI_PATH
  c.expect(false, "CLI path not configured");
#else
  const std::string cli = SQM_CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "sqm_accept";
  fs::create_directories(dir);
  const auto art = [&](const std::string& n) { return (dir / n).string(); };
  // Every command runs twice with an identical command line; artifacts are
  // snapshotted between the runs and compared byte for byte, as is stdout.
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"paths-gen", "--kind brownian --steps 4096 --seed 42 --out "},
      {"qv",
       "--path " + art("paths-gen.art") + " --level-min 4 --level-max 10 --out "},
      {"kernels", "--x 0.9999 --out "},
      {"spherical", "--n-list 10,50 --rho-list 0.5 --out "},
      {"symbol-ensemble",
       "--modes 16 --count 3 --steps 1024 --seed 5 --n-schedule 32,128 "
       "--out "},
  };
  const std::vector<std::string> stdout_runs = {
      "cesaro --path " + art("paths-gen.art") + " --n 256",
      "abel --path " + art("paths-gen.art") + " --x 0.97 --n-max 1024",
      "delta-action --x 0.999",
      "qv-theorem --kind linear --steps 1024 --n 64",
      "gauss-suite --seed 3 --trials 10",
      "sandwich --seeds 2 --steps 4096 --n 5 --m 9",
  };
  for (const auto& [cmd, args] : runs) {
    const std::string artifact = art(cmd + ".art");
    const std::string log = art(cmd + ".log");
    const std::string full = cli + " " + cmd + " " + args + artifact + " > " + log;
    c.expect(std::system(full.c_str()) == 0, cmd + " failed (run 1)");
    const std::string a1 = slurp(artifact);
    const std::string l1 = slurp(log);
    c.expect(std::system(full.c_str()) == 0, cmd + " failed (run 2)");
    c.expect(!a1.empty() && a1 == slurp(artifact), cmd + " artifacts differ");
    c.expect(l1 == slurp(log), cmd + " summaries differ");
  }
  // usage errors exit with status 2
  {
    const int rc =
        std::system((cli + " bogus-command > /dev/null 2>&1").c_str());
    c.expect(WEXITSTATUS(rc) == 2,
             "usage error status " + std::to_string(WEXITSTATUS(rc)));
  }
  int idx = 0;
  for (const auto& cmd : stdout_runs) {
    const std::string log = art("s" + std::to_string(idx) + ".log");
    const std::string full = cli + " " + cmd + " > " + log;
    c.expect(std::system(full.c_str()) == 0, cmd + " failed (run 1)");
    const std::string l1 = slurp(log);
    c.expect(std::system(full.c_str()) == 0, cmd + " failed (run 2)");
    c.expect(!l1.empty() && l1 == slurp(log), cmd + " output differs");
    ++idx;
  }
#endif
}

}  // namespace

int main() {
  std::printf("acceptance suite\n----------------\n");
  criterion_kernel_limits();
  criterion_delta_action();
  criterion_theta();
  criterion_cesaro_deterministic();
  criteria_brownian_cesaro_and_abel();
  criterion_symbol_scaling();
  criterion_gauss_suite();
  criterion_spherical();
  criterion_difference_quotient();
  criterion_sandwich();
  criterion_schwarz();
  criterion_determinism();
  std::printf("----------------\n%s (%d failing)\n",
              g_failures == 0 ? "ALL CRITERIA PASS" : "FAILURES PRESENT",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
