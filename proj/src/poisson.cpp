#include "sqm/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqm/cons_basis.hpp"
#include "sqm/numeric.hpp"
#include "sqm/summation.hpp"

namespace sqm {

namespace {

void check_domain(double x, double s) {
  if (x < 0.0 || x >= 1.0)
    throw std::domain_error("poisson kernel: x must lie in [0,1)");
  if (s < 0.0 || s > M_PI)
    throw std::domain_error("poisson kernel: s must lie in [0,pi]");
}

double denom(double x, double s) {
  const double half = std::sin(0.5 * s);
  return (1.0 - x) * (1.0 - x) + 4.0 * x * half * half;
}

}  // namespace

double poisson_p0(double x, double s) {
  check_domain(x, s);
  return (1.0 - x * x) / (M_PI * denom(x, s));
}

double poisson_p1(double x, double s) {
  check_domain(x, s);
  const double d = denom(x, s);
  return 2.0 / M_PI * x * (1.0 - x) * (1.0 - x * x) * std::sin(s) / (d * d);
}

namespace {

long double p2_fused(long double x, long double s) {
  const long double h = sinl(0.5L * s);
  const long double d = (1.0L - x) * (1.0L - x) + 4.0L * x * h * h;
  // Fused numerator cos(s) D - 4x sin^2 s: the double-precision split form
  // cannot get below ~1e-10 absolute near the sign change for x close to 1,
  // so the cancellation happens in extended precision.
  const long double g = cosl(s) * d - 4.0L * x * sinl(s) * sinl(s);
  return 2.0L / M_PI * x * (1.0L - x) * (1.0L - x * x) * g / (d * d * d);
}

}  // namespace

double poisson_p2(double x, double s) {
  check_domain(x, s);
  return static_cast<double>(p2_fused(x, s));
}

double poisson_eval(int order, double x, double s) {
  switch (order) {
    case 0: return poisson_p0(x, s);
    case 1: return poisson_p1(x, s);
    case 2: return poisson_p2(x, s);
    default: throw std::invalid_argument("poisson_eval: order must be 0,1,2");
  }
}

namespace {

long double p2_slope_extended(long double x, long double s) {
  const long double h = sinl(0.5L * s);
  const long double d = (1.0L - x) * (1.0L - x) + 4.0L * x * h * h;
  const long double g = cosl(s) * d - 4.0L * x * sinl(s) * sinl(s);
  const long double dp = 2.0L * x * sinl(s);
  const long double gp =
      -sinl(s) * d + cosl(s) * dp - 8.0L * x * sinl(s) * cosl(s);
  const long double pref = 2.0L / M_PI * x * (1.0L - x) * (1.0L - x * x);
  return pref * (gp / (d * d * d) - 3.0L * g * dp / (d * d * d * d));
}

}  // namespace

double theta_x(double x) {
  if (!(x > 0.0) || !(x < 1.0))
    throw std::domain_error("theta_x: x must lie in (0,1)");
  // The acos of the displayed radical loses ~sin(theta)^{-1} digits, and the
  // kernel slope near x = 1 amplifies that to well above the tolerance on
  // P2(x, theta); Newton steps in extended precision pin the root down to
  // the last double bit.
  const long double xl = x;
  const long double q = 1.0L + xl * xl;
  const long double c = (sqrtl(q * q + 32.0L * xl * xl) - q) / (4.0L * xl);
  long double theta = acosl(c > 1.0L ? 1.0L : c);
  for (int it = 0; it < 6; ++it) {
    const long double dp = p2_slope_extended(xl, theta);
    if (dp == 0.0L) break;
    theta -= p2_fused(xl, theta) / dp;
  }
  return static_cast<double>(theta);
}

double vp2_primitive(double x, double v) {
  return v * poisson_p1(x, v) + (1.0 - x) * poisson_p0(x, v);
}

KernelMoments kernel_moment_integrals(double x, double delta) {
  if (!(x > 0.0) || !(x < 1.0))
    throw std::domain_error("kernel_moment_integrals: x must lie in (0,1)");
  if (delta < 0.0 || delta > M_PI)
    throw std::domain_error("kernel_moment_integrals: delta outside [0,pi]");
  const double theta = theta_x(x);
  const double f0 = vp2_primitive(x, 0.0);
  const double fpi = vp2_primitive(x, M_PI);
  const double fth = vp2_primitive(x, theta);

  KernelMoments m;
  m.signed_moment = fpi - f0;
  // P2 changes sign exactly at theta: split |P2| there.
  m.abs_moment = 2.0 * fth - f0 - fpi;
  if (delta >= theta) {
    m.tail_abs_moment = vp2_primitive(x, delta) - fpi;
  } else {
    m.tail_abs_moment = 2.0 * fth - vp2_primitive(x, delta) - fpi;
  }
  return m;
}

namespace {

// Antiderivative of P0: Q0(x,s) = (2/pi) atan2(kappa sin(s/2), cos(s/2)),
// kappa = (1+x)/(1-x); continuous on [0,pi] with Q0(x,0)=0, Q0(x,pi)=1.
double p0_primitive(double x, double s) {
  const double kappa = (1.0 + x) / (1.0 - x);
  return 2.0 / M_PI * std::atan2(kappa * std::sin(0.5 * s), std::cos(0.5 * s));
}

// Antiderivative of P1: -(1-x) P0.
double p1_primitive(double x, double s) {
  return -(1.0 - x) * poisson_p0(x, s);
}

// Antiderivative of s P1: -s(1-x)P0 + (1-x)Q0.
double sp1_primitive(double x, double s) {
  return -s * (1.0 - x) * poisson_p0(x, s) + (1.0 - x) * p0_primitive(x, s);
}

}  // namespace

double p1_delta_action(std::span<const double> nodes,
                       std::span<const double> values, double x) {
  if (!(x > 0.0) || !(x < 1.0))
    throw std::domain_error("p1_delta_action: x must lie in (0,1)");
  if (nodes.size() < 2 || nodes.size() != values.size())
    throw std::invalid_argument("p1_delta_action: bad sampling");
  if (nodes.front() != 0.0 || std::abs(nodes.back() - M_PI) > 1e-12)
    throw std::invalid_argument("p1_delta_action: nodes must span [0,pi]");

  std::vector<double> parts(nodes.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double s0 = nodes[i];
    const double s1 = std::min(nodes[i + 1], M_PI);
    const double b = (values[i + 1] - values[i]) / (nodes[i + 1] - nodes[i]);
    const double a = values[i] - b * s0;
    parts[i] = a * (p1_primitive(x, s1) - p1_primitive(x, s0)) +
               b * (sp1_primitive(x, s1) - sp1_primitive(x, s0));
  }
  return pairwise_sum(parts);
}

namespace {

// phi(T s / pi) sampled in the s variable, as (nodes, values) over [0,pi].
struct SampledPhi {
  std::vector<double> nodes;
  std::vector<double> values;
};

SampledPhi sample_in_s(const Path& path, bool reversed) {
  SampledPhi out;
  const std::size_t n = path.grid.size();
  out.nodes.resize(n);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = reversed ? n - 1 - i : i;
    out.nodes[i] =
        reversed ? M_PI * (1.0 - path.grid[src] / path.T)
                 : M_PI * path.grid[src] / path.T;
    out.values[i] = path.values[src];
  }
  out.nodes.front() = 0.0;
  out.nodes.back() = M_PI;
  return out;
}

// Exact G(v) = Int_0^{pi-v} |phi(T(t+v)/pi) - phi(Tt/pi)|^2 dt, recovered
// from increment_energy: I(v) = -(pi/2T) G(v)/v.
double g_of_v(const Path& path, double v) {
  if (v <= 0.0) return 0.0;
  if (v >= M_PI) return 0.0;
  return -increment_energy(path, v) * v * 2.0 * path.T / M_PI;
}

// Exact H(v) = Int |phi(Ts/pi) - phi(T(v-s)/pi)|^2 ds over
// s in [max(0,v-pi), min(pi,v)], for v in [0,2pi]. Piecewise quadratic in s
// between merged breakpoints, integrated by exact Simpson.
double h_of_v(const Path& path, double v) {
  const double lo = std::max(0.0, v - M_PI);
  const double hi = std::min(M_PI, v);
  if (hi <= lo) return 0.0;
  std::vector<double> cuts{lo, hi};
  for (double t : path.grid) {
    const double u = M_PI * t / path.T;
    if (u > lo && u < hi) cuts.push_back(u);
    const double w = v - u;
    if (w > lo && w < hi) cuts.push_back(w);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const auto phi_u = [&](double u) {
    return path.eval(std::clamp(u * path.T / M_PI, 0.0, path.T));
  };
  const auto integrand = [&](double s) {
    const double d = phi_u(s) - phi_u(v - s);
    return d * d;
  };
  std::vector<double> parts(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    // Simpson is exact for the quadratic piece.
    parts[i] = (b - a) / 6.0 *
               (integrand(a) + 4.0 * integrand(0.5 * (a + b)) + integrand(b));
  }
  return pairwise_sum(parts);
}

// Breakpoints for the v-integrals: polynomial pieces of G/H lie between
// consecutive multiples of the grid step, and the kernel spike near v = 0
// (and 2pi - 0 for the extended kernel) gets a geometric refinement.
std::vector<double> v_breakpoints(const Path& path, double x, double v_max) {
  std::vector<double> cuts{0.0, v_max};
  const std::size_t m = path.segments();
  const double h = M_PI / static_cast<double>(m);
  for (double v = h; v < v_max; v += h) cuts.push_back(v);
  for (double w = std::min(1.0 - x, h); w > 1e-14; w *= 0.25) {
    if (w < v_max) cuts.push_back(w);
    if (v_max - w > 0.0) cuts.push_back(v_max - w);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace

AbelEnergyDecomposition abel_energy_decomposition(const Path& path, double x,
                                                  double quad_tol) {
  if (!(x > 0.0) || !(x < 1.0))
    throw std::domain_error("abel_energy_decomposition: x must lie in (0,1)");
  path.validate();
  const double T = path.T;
  const double phiT = path.values.back();

  AbelEnergyDecomposition out;
  out.boundary_term = 2.0 / T * phiT * phiT;
  out.zero_mode_adjustment = (1.0 - x) * phiT * phiT / T;

  // Total: Abel sum of the energy sequence itself. Grow the sequence until
  // the geometric tail bound at this x is reached.
  {
    std::size_t n_terms = 1024;
    for (;;) {
      const CoefficientSequence seq = coefficient_sequence(path, n_terms);
      try {
        out.total = abel_sum(seq.energy, x, 1e-10).value;
        break;
      } catch (const truncation_error&) {
        n_terms *= 4;
        if (n_terms > (std::size_t{1} << 26))
          throw std::runtime_error(
              "abel_energy_decomposition: x too close to 1");
      }
    }
  }

  // I1 = -(2 pi/T) phi(T) Int_0^pi P1(x,s) phi(T(pi-s)/pi) ds.
  {
    const SampledPhi rev = sample_in_s(path, /*reversed=*/true);
    out.i1 = -(2.0 * M_PI / T) * phiT * p1_delta_action(rev.nodes, rev.values, x);
  }

  // J2 = (pi/T) Int_0^pi [P1(x,s) + P1(x,pi-s)] phi^2(Ts/pi) ds.
  {
    const auto phi_sq = [&](double s) {
      const double p = path.eval(std::clamp(s * T / M_PI, 0.0, T));
      return p * p;
    };
    const auto integrand = [&](double s) {
      return (poisson_p1(x, s) + poisson_p1(x, M_PI - s)) * phi_sq(s);
    };
    const std::vector<double> cuts = v_breakpoints(path, x, M_PI);
    out.j2 = M_PI / T * gk_integrate_split(integrand, cuts, quad_tol);
  }

  // K1 = (pi/4T) Int_0^{2pi} P2ext(x,v) H(v) dv, P2ext(v) = P2(2pi-v) past pi.
  {
    const auto p2ext = [&](double v) {
      return poisson_p2(x, v <= M_PI ? v : 2.0 * M_PI - v);
    };
    const auto integrand = [&](double v) { return p2ext(v) * h_of_v(path, v); };
    const std::vector<double> cuts = v_breakpoints(path, x, 2.0 * M_PI);
    out.k1 = M_PI / (4.0 * T) * gk_integrate_split(integrand, cuts, quad_tol);
  }

  // K2 = -(pi/2T) Int_0^pi P2(x,v) G(v) dv  ( = Int v P2(x,v) I(v) dv ).
  {
    const auto integrand = [&](double v) {
      return poisson_p2(x, v) * g_of_v(path, v);
    };
    const std::vector<double> cuts = v_breakpoints(path, x, M_PI);
    out.k2 = -(M_PI / (2.0 * T)) * gk_integrate_split(integrand, cuts, quad_tol);
  }

  out.residual = out.total - (out.boundary_term + out.i1 + out.j2 + out.k1 +
                              out.k2 - out.zero_mode_adjustment);
  return out;
}

}  // namespace sqm
