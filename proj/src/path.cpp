#include "sqm/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqm/cons_basis.hpp"
#include "sqm/numeric.hpp"

namespace sqm {

double Path::eval(double t) const {
  if (t < 0.0 || t > T) throw std::domain_error("Path::eval: t outside [0,T]");
  if (t == grid.front()) return values.front();
  if (t == grid.back()) return values.back();
  // First grid point strictly greater than t.
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - grid.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
  return values[lo] + w * (values[hi] - values[lo]);
}

bool Path::uniform_pow2_grid() const {
  const std::size_t m = segments();
  if (m < 2 || (m & (m - 1)) != 0) return false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] != static_cast<double>(i) * T / static_cast<double>(m))
      return false;
  }
  return true;
}

void Path::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("Path: T must be positive");
  if (grid.size() < 2 || grid.size() != values.size())
    throw std::invalid_argument("Path: grid/values size mismatch");
  if (grid.front() != 0.0 || grid.back() != T)
    throw std::invalid_argument("Path: grid must span [0,T]");
  if (values.front() != 0.0)
    throw std::invalid_argument("Path: value at the origin must be 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("Path: grid must be strictly increasing");
}

double PartitionSpec::mesh() const {
  double m = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i)
    m = std::max(m, points[i] - points[i - 1]);
  return m;
}

void PartitionSpec::validate() const {
  if (points.size() < 2)
    throw std::invalid_argument("PartitionSpec: need at least one interval");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i] > points[i - 1]))
      throw std::invalid_argument("PartitionSpec: not strictly increasing");
}

PartitionSpec PartitionSpec::dyadic(double T, int level) {
  if (level < 0) throw std::invalid_argument("dyadic: negative level");
  const std::size_t n = std::size_t{1} << level;
  return uniform(T, n);
}

PartitionSpec PartitionSpec::uniform(double T, std::size_t n) {
  if (n < 1 || !(T > 0.0)) throw std::invalid_argument("uniform partition");
  PartitionSpec p;
  p.points.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    p.points[i] = static_cast<double>(i) * T / static_cast<double>(n);
  p.points[n] = T;
  return p;
}

PartitionSpec PartitionSpec::shifted_uniform(double T, double step,
                                             double offset) {
  if (!(step > 0.0) || offset < 0.0 || offset > step)
    throw std::invalid_argument("shifted_uniform: need 0 <= offset <= step");
  PartitionSpec p;
  p.points.push_back(0.0);
  for (double v = offset; v < T; v += step) {
    if (v > 0.0 && v < T) p.points.push_back(v);
  }
  p.points.push_back(T);
  return p;
}

Path make_brownian(double T, std::size_t steps, std::uint64_t seed,
                   double sigma) {
  if (steps < 2 || (steps & (steps - 1)) != 0)
    throw std::invalid_argument("make_brownian: steps must be a power of two >= 2");
  if (!(sigma > 0.0)) throw std::invalid_argument("make_brownian: sigma <= 0");
  if (!(T > 0.0)) throw std::invalid_argument("make_brownian: T <= 0");
  Path p;
  p.T = T;
  p.kind = sigma == 1.0 ? "brownian" : "scaled_brownian";
  p.seed = seed;
  p.grid.resize(steps + 1);
  p.values.resize(steps + 1);
  const double sd = sigma * std::sqrt(T / static_cast<double>(steps));
  Rng rng(seed);
  p.values[0] = 0.0;
  for (std::size_t i = 0; i <= steps; ++i)
    p.grid[i] = static_cast<double>(i) * T / static_cast<double>(steps);
  for (std::size_t i = 1; i <= steps; ++i)
    p.values[i] = p.values[i - 1] + sd * rng.gaussian();
  return p;
}

Path make_smooth_fourier(double T, std::size_t steps,
                         std::span<const double> coeffs) {
  if (steps < 2) throw std::invalid_argument("make_smooth_fourier: steps < 2");
  if (!(T > 0.0)) throw std::invalid_argument("make_smooth_fourier: T <= 0");
  Path p;
  p.T = T;
  p.kind = "smooth_fourier";
  p.grid.resize(steps + 1);
  p.values.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * T / static_cast<double>(steps);
    p.grid[i] = t;
    double v = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      v += coeffs[k] * basis_eval(k, t, T);
    p.values[i] = v;
  }
  p.values[0] = 0.0;
  return p;
}

Path make_linear(double T, std::size_t steps, double slope) {
  if (steps < 2) throw std::invalid_argument("make_linear: steps < 2");
  if (!(T > 0.0)) throw std::invalid_argument("make_linear: T <= 0");
  Path p;
  p.T = T;
  p.kind = "linear";
  p.grid.resize(steps + 1);
  p.values.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    p.grid[i] = static_cast<double>(i) * T / static_cast<double>(steps);
    p.values[i] = slope * p.grid[i];
  }
  return p;
}

Path make_zero(double T, std::size_t steps) {
  Path p = make_linear(T, steps, 0.0);
  p.kind = "constant_zero";
  return p;
}

Path scale_path(const Path& path, double alpha) {
  Path p = path;
  for (double& v : p.values) v *= alpha;
  return p;
}

double quadratic_variation(const Path& path, const PartitionSpec& partition) {
  partition.validate();
  if (partition.points.front() < 0.0 || partition.points.back() > path.T)
    throw std::domain_error("quadratic_variation: partition outside [0,T]");
  std::vector<double> sq(partition.intervals());
  double prev = path.eval(partition.points[0]);
  for (std::size_t i = 1; i < partition.points.size(); ++i) {
    const double cur = path.eval(partition.points[i]);
    const double d = cur - prev;
    sq[i - 1] = d * d;
    prev = cur;
  }
  return pairwise_sum(sq);
}

QvEstimate qv_limit_dyadic(const Path& path, int level_min, int level_max,
                           double threshold) {
  if (level_min < 0 || level_max < level_min)
    throw std::invalid_argument("qv_limit_dyadic: bad level range");
  if ((std::size_t{1} << level_max) > path.segments())
    throw std::invalid_argument(
        "qv_limit_dyadic: 2^level_max exceeds the path grid resolution");
  QvEstimate est;
  for (int l = level_min; l <= level_max; ++l) {
    est.levels.push_back(l);
    est.values.push_back(
        quadratic_variation(path, PartitionSpec::dyadic(path.T, l)));
  }
  est.limit = est.values.back();
  const std::size_t n = est.values.size();
  if (n >= 2) {
    const double last = est.values[n - 1];
    const double prev = est.values[n - 2];
    const double scale = std::max(std::abs(last), 1e-300);
    est.rel_change = std::abs(last - prev) / scale;
    if (est.rel_change <= threshold) {
      est.status = QvStatus::converged;
    } else {
      // Geometric decay toward 0 across the finest levels.
      bool decaying = n >= 3;
      for (std::size_t i = n >= 3 ? n - 3 : 0; decaying && i + 1 < n; ++i) {
        decaying = est.values[i + 1] <= 0.75 * est.values[i];
      }
      est.status = decaying ? QvStatus::converging_to_zero
                            : QvStatus::not_converged;
    }
  } else {
    est.rel_change = 1.0;
    est.status = QvStatus::not_converged;
  }
  return est;
}

QvSupInf qv_sup_inf(const Path& path, double mesh_bound, int trials,
                    std::uint64_t seed) {
  if (!(mesh_bound > 0.0) || mesh_bound > path.T)
    throw std::invalid_argument("qv_sup_inf: need 0 < mesh_bound <= T");
  if (trials < 1) throw std::invalid_argument("qv_sup_inf: trials < 1");

  // Finest dyadic partition with mesh <= mesh_bound.
  int level = 0;
  while (path.T / std::pow(2.0, level) > mesh_bound) ++level;
  const double q_dyadic =
      quadratic_variation(path, PartitionSpec::dyadic(path.T, level));

  double sup = q_dyadic;
  double inf = q_dyadic;
  Rng rng(seed);
  const double step = path.T / std::pow(2.0, level);
  for (int t = 0; t < trials; ++t) {
    // Alternate between full-mesh shifted partitions and jittered ones; the
    // former probe the sup at the given mesh, the latter the inf below it.
    double q;
    if (t % 2 == 0) {
      const double offset = rng.uniform() * step;
      q = quadratic_variation(
          path, PartitionSpec::shifted_uniform(path.T, step, offset));
    } else {
      const std::size_t n =
          std::max<std::size_t>(2, static_cast<std::size_t>(
                                       std::ceil(2.0 * path.T / mesh_bound)));
      PartitionSpec p = PartitionSpec::uniform(path.T, n);
      const double h = path.T / static_cast<double>(n);
      for (std::size_t i = 1; i < n; ++i)
        p.points[i] += (rng.uniform() - 0.5) * 0.5 * h;
      q = quadratic_variation(path, p);
    }
    sup = std::max(sup, q);
    inf = std::min(inf, q);
  }
  return {sup, inf};
}

double increment_energy(const Path& path, double v) {
  if (!(v > 0.0) || !(v < M_PI))
    throw std::domain_error("increment_energy: v outside (0,pi)");
  const double T = path.T;
  const double upper = M_PI - v;
  // Breakpoints in the u = pi*t/T variable: grid images and their v-shifts.
  std::vector<double> cuts;
  cuts.reserve(2 * path.grid.size() + 2);
  cuts.push_back(0.0);
  cuts.push_back(upper);
  for (double t : path.grid) {
    const double u = M_PI * t / T;
    if (u > 0.0 && u < upper) cuts.push_back(u);
    const double us = u - v;
    if (us > 0.0 && us < upper) cuts.push_back(us);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Clamp roundoff overshoot at the u = pi (t = T) edge.
  const auto phi_u = [&](double u) {
    return path.eval(std::clamp(u * T / M_PI, 0.0, T));
  };
  std::vector<double> parts;
  parts.reserve(cuts.size());
  double psi_lo = phi_u(v) - phi_u(0.0);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    const double psi_hi = phi_u(cuts[i + 1] + v) - phi_u(cuts[i + 1]);
    // psi is linear on the piece, so psi^2 integrates exactly.
    parts.push_back(len / 3.0 *
                    (psi_lo * psi_lo + psi_lo * psi_hi + psi_hi * psi_hi));
    psi_lo = psi_hi;
  }
  const double integral = pairwise_sum(parts);
  return -(M_PI / (2.0 * T)) * integral / v;
}

}  // namespace sqm
