#include "sqm/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqm/cons_basis.hpp"
#include "sqm/numeric.hpp"
#include "sqm/summation.hpp"

namespace sqm {

void PathEnsemble::validate() const {
  if (paths.size() != weights.size())
    throw std::invalid_argument("PathEnsemble: paths/weights size mismatch");
  if (paths.empty()) throw std::invalid_argument("PathEnsemble: empty");
  for (const auto& w : weights)
    if (w < 0.0) throw std::invalid_argument("PathEnsemble: negative weight");
  for (const auto& p : paths)
    if (p.T != paths.front().T)
      throw std::invalid_argument("PathEnsemble: paths must share T");
}

double PathEnsemble::total_mass() const { return pairwise_sum(weights); }

namespace {

QvEstimate default_qv_estimate(const Path& path, double threshold) {
  int level_max = 0;
  while ((std::size_t{1} << (level_max + 1)) <= path.segments()) ++level_max;
  const int level_min = std::max(2, level_max - 8);
  return qv_limit_dyadic(path, level_min, level_max, threshold);
}

}  // namespace

double levy_symbol(const Path& path, double threshold) {
  const QvEstimate est = default_qv_estimate(path, threshold);
  if (!est.exists())
    throw std::runtime_error(
        "levy_symbol: dyadic quadratic variation did not converge "
        "(relative change " +
        std::to_string(est.rel_change) + ")");
  return -4.0 * M_PI * M_PI * est.qv() / path.T;
}

SymbolConvergenceReport symbol_convergence(
    const PathEnsemble& ensemble, std::span<const std::size_t> n_schedule,
    double threshold) {
  ensemble.validate();
  if (n_schedule.empty())
    throw std::invalid_argument("symbol_convergence: empty schedule");
  std::vector<double> targets(ensemble.paths.size());
  std::vector<std::size_t> failures;
  for (std::size_t i = 0; i < ensemble.paths.size(); ++i) {
    const QvEstimate est = default_qv_estimate(ensemble.paths[i], threshold);
    if (!est.exists()) failures.push_back(i);
    targets[i] = est.qv() / ensemble.paths[i].T;
  }
  if (!failures.empty()) {
    std::string msg = "symbol_convergence: QV gate failed for paths";
    for (std::size_t i : failures) msg += " " + std::to_string(i);
    throw std::runtime_error(msg);
  }
  const std::size_t n_max =
      *std::max_element(n_schedule.begin(), n_schedule.end());

  SymbolConvergenceReport rep;
  rep.n_schedule.assign(n_schedule.begin(), n_schedule.end());
  rep.errors.assign(n_schedule.size(), 0.0);
  std::vector<std::vector<double>> sq_errors(
      n_schedule.size(), std::vector<double>(ensemble.paths.size()));
  for (std::size_t i = 0; i < ensemble.paths.size(); ++i) {
    const CoefficientSequence seq =
        coefficient_sequence(ensemble.paths[i], n_max);
    for (std::size_t j = 0; j < n_schedule.size(); ++j) {
      const double mean = cesaro_mean(seq.energy, n_schedule[j]);
      const double err = mean - targets[i];
      sq_errors[j][i] = ensemble.weights[i] * err * err;
    }
  }
  for (std::size_t j = 0; j < n_schedule.size(); ++j)
    rep.errors[j] = pairwise_sum(sq_errors[j]);
  rep.decreasing = rep.errors.back() <= rep.errors.front();
  return rep;
}

double wallis_ratio(std::size_t n) {
  if (n < 2) throw std::domain_error("wallis_ratio: n must be >= 2");
  const double nd = static_cast<double>(n);
  return std::exp(2.0 * std::lgamma(0.5 * nd) - std::lgamma(0.5 * (nd + 1.0)) -
                  std::lgamma(0.5 * (nd - 1.0)));
}

SphericalKernelEval spherical_kernel(std::size_t n, double rho,
                                     double r_n_sq) {
  if (n < 3) throw std::domain_error("spherical_kernel: n must be >= 3");
  if (r_n_sq < 0.0)
    throw std::domain_error("spherical_kernel: r_n_sq must be >= 0");
  SphericalKernelEval out;
  out.n = n;
  out.rho = rho;
  out.r_n_sq = r_n_sq;
  const double nd = static_cast<double>(n);
  out.x_n = -2.0 * M_PI * M_PI * rho * rho * r_n_sq / nd;
  out.error_bound =
      (std::abs(out.x_n) + 1.0) * std::exp(std::abs(out.x_n)) / nd;

  if (rho == 0.0 || r_n_sq == 0.0) {
    out.value_quadrature = 1.0;
    out.value_series = 1.0;
    return out;
  }

  // Series sum_k (b_k/k!) x^k in extended precision; the terms alternate and
  // cancel heavily for large |x|.
  {
    const long double x = static_cast<long double>(out.x_n);
    long double term = 1.0L;
    long double sum = 1.0L;
    for (std::size_t k = 1; k < 4000; ++k) {
      const long double kd = static_cast<long double>(k);
      term *= x / kd / (1.0L + (2.0L * kd - 1.0L) / nd);
      sum += term;
      if (std::abs(static_cast<double>(term)) <
          1e-18 * std::max(1.0, std::abs(static_cast<double>(sum))))
        break;
    }
    out.value_series = static_cast<double>(sum);
  }

  // Quadrature route: ratio of two integrals, so the rho = 0 normalization
  // is exact by construction.
  {
    const double r = std::sqrt(r_n_sq);
    const double power = 0.5 * nd - 1.0;
    const auto weight = [power](double x) {
      return std::pow(std::max(0.0, 1.0 - x * x), power);
    };
    const double num = gk_integrate(
        [&](double x) { return weight(x) * std::cos(2.0 * M_PI * rho * r * x); },
        0.0, 1.0, 1e-13, 30);
    const double den = gk_integrate(weight, 0.0, 1.0, 1e-13, 30);
    out.value_quadrature = num / den;
  }
  return out;
}

PathEnsemble spherical_mean(const PathEnsemble& ensemble, double rho,
                            std::size_t n) {
  ensemble.validate();
  if (n < 3) throw std::domain_error("spherical_mean: n must be >= 3");
  PathEnsemble out = ensemble;
  for (std::size_t i = 0; i < out.paths.size(); ++i) {
    const CoefficientSequence seq = coefficient_sequence(out.paths[i], n);
    const double r_sq = pairwise_sum(seq.energy);
    const double multiplier = spherical_kernel(n, rho, r_sq).value_series;
    out.weights[i] *= multiplier * multiplier;
  }
  return out;
}

double laplacian_difference_quotient(double q, double rho) {
  if (!(rho > 0.0))
    throw std::invalid_argument("laplacian_difference_quotient: rho <= 0");
  if (q < 0.0)
    throw std::invalid_argument("laplacian_difference_quotient: q < 0");
  return 2.0 * std::expm1(-2.0 * M_PI * M_PI * rho * rho * q) / (rho * rho);
}

RiemannSandwichReport riemann_sandwich(const Path& path, int N, int M,
                                       int sup_inf_trials, std::uint64_t seed) {
  if (M <= N || N < 1)
    throw std::invalid_argument("riemann_sandwich: need M > N >= 1");
  if ((std::size_t{1} << M) > path.segments())
    throw std::invalid_argument(
        "riemann_sandwich: 2^M exceeds the path grid resolution");
  const double T = path.T;
  const double coarse = T / std::pow(2.0, N);
  const double fine = T / std::pow(2.0, M);
  const std::size_t shifts = std::size_t{1} << (M - N);
  const std::size_t p_count = (std::size_t{1} << N) - 1;

  RiemannSandwichReport rep;
  rep.j_r.resize(shifts);
  std::vector<double> sq(p_count);
  for (std::size_t r = 1; r <= shifts; ++r) {
    const double off = static_cast<double>(r) * fine;
    for (std::size_t p = 1; p <= p_count; ++p) {
      const double hi = std::min(static_cast<double>(p) * coarse + off, T);
      const double lo = hi - coarse;
      const double d = path.eval(hi) - path.eval(lo);
      sq[p - 1] = d * d;
    }
    rep.j_r[r - 1] = pairwise_sum(sq);
  }
  const double b0 = path.eval(0.0) - path.eval(fine);
  const double boundary_term = b0 * b0;
  const double mean_scale = std::pow(2.0, N - M);
  rep.i_mn = -(M_PI / (2.0 * T)) * mean_scale *
             (pairwise_sum(rep.j_r) + boundary_term);
  rep.value = -(2.0 * T / M_PI) * rep.i_mn;

  // Boundary-increment slack over v in [0, T/2^N]; the squares are convex on
  // each linear segment, so grid points and the window edge attain the sup.
  double slack = 0.0;
  const auto window_sup = [&](double v) {
    const double a = path.eval(0.0) - path.eval(v);
    const double b = path.eval(T) - path.eval(T - v);
    return a * a + b * b;
  };
  for (double t : path.grid) {
    if (t > coarse) break;
    slack = std::max(slack, window_sup(t));
  }
  slack = std::max(slack, window_sup(coarse));
  rep.boundary_slack = slack;

  const QvSupInf bounds = qv_sup_inf(path, coarse, sup_inf_trials, seed);
  rep.lower = bounds.inf_estimate - slack;
  rep.upper = bounds.sup_estimate + slack;
  rep.holds = rep.lower <= rep.value && rep.value <= rep.upper;
  return rep;
}

PathEnsemble ensemble_from_gaussian_system(const ProductSystem& system,
                                           double T, std::size_t path_steps,
                                           std::size_t count,
                                           std::uint64_t seed) {
  if (count == 0)
    throw std::invalid_argument("ensemble_from_gaussian_system: count == 0");
  // Spectral law per coordinate: the squared Fourier transform of a plain
  // Gaussian factor with sd sigma is the Normal(-modulation, tau^2) density
  // with tau = 1/(4 pi sigma); coordinate i drives basis mode i-1.
  std::vector<double> centers, spreads;
  for (const auto& fac : system.factors) {
    const auto* g = std::get_if<GaussFactor>(&fac);
    if (!g || g->poly.degree() != 0)
      throw std::invalid_argument(
          "ensemble_from_gaussian_system: needs degree-0 Gaussian factors");
    centers.push_back(-g->modulation);
    spreads.push_back(1.0 / (4.0 * M_PI * g->sd));
  }
  Rng rng(seed);
  PathEnsemble out;
  const double w = 1.0 / static_cast<double>(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<double> coeffs(system.level());
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      coeffs[k] = centers[k] + spreads[k] * rng.gaussian();
    Path p = make_smooth_fourier(T, path_steps, coeffs);
    p.kind = "gaussian_system_sample";
    p.seed = seed;
    out.paths.push_back(std::move(p));
    out.weights.push_back(w);
  }
  return out;
}

}  // namespace sqm
