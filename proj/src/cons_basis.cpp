#include "sqm/cons_basis.hpp"

#include <cmath>
#include <stdexcept>

#include "sqm/numeric.hpp"

namespace sqm {

double basis_eval(std::size_t k, double s, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("basis_eval: T <= 0");
  if (s < 0.0 || s > T) throw std::domain_error("basis_eval: s outside [0,T]");
  if (k == 0) return s / std::sqrt(T);
  const double kd = static_cast<double>(k);
  return std::sqrt(2.0 * T) / (kd * M_PI) * std::sin(kd * M_PI * s / T);
}

namespace {

// Slope changes of phi(T u / pi) at the interior u-nodes. The per-segment
// closed forms
//   Int (a + b u) k sin(ku) du = [-(a + b u) cos(ku) + b sin(ku)/k]
// telescope across the grid (the path is continuous, so the cos terms cancel
// at interior nodes and the boundary terms cancel against (-1)^k phi(T)),
// leaving <phi, e_k> = sqrt(2/T)/k * sum_j (b_{j-1} - b_j) sin(k u_j).
std::vector<double> slope_changes(const Path& path) {
  const std::size_t m = path.segments();
  std::vector<double> d(m, 0.0);
  double b_prev = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double du = M_PI * (path.grid[j + 1] - path.grid[j]) / path.T;
    const double b = (path.values[j + 1] - path.values[j]) / du;
    if (j > 0) d[j] = b_prev - b;
    b_prev = b;
  }
  return d;
}

// sum_j d[j] sin(k u_j) for k = 0..n_max at arbitrary angles u_j, advancing
// per-node rotations in k.
std::vector<double> sine_sums_general(const Path& path,
                                      std::span<const double> d,
                                      std::size_t n_max) {
  const std::size_t m = d.size();
  std::vector<double> s(m, 0.0), c(m, 1.0), s1(m), c1(m);
  for (std::size_t j = 1; j < m; ++j) {
    const double u = M_PI * path.grid[j] / path.T;
    s1[j] = std::sin(u);
    c1[j] = std::cos(u);
  }
  std::vector<double> out(n_max + 1, 0.0);
  for (std::size_t k = 1; k <= n_max; ++k) {
    double acc = 0.0;
    for (std::size_t j = 1; j < m; ++j) {
      const double sn = s[j] * c1[j] + c[j] * s1[j];
      const double cn = c[j] * c1[j] - s[j] * s1[j];
      s[j] = sn;
      c[j] = cn;
      acc += d[j] * sn;
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> coefficient_kernel(const Path& path, std::size_t n_max) {
  path.validate();
  const std::vector<double> d = slope_changes(path);
  const std::vector<double> sums =
      path.uniform_pow2_grid() ? sine_table_sums(d, n_max)
                               : sine_sums_general(path, d, n_max);
  std::vector<double> coeffs(n_max + 1);
  coeffs[0] = path.values.back() / std::sqrt(path.T);
  const double amp = std::sqrt(2.0 / path.T);
  for (std::size_t k = 1; k <= n_max; ++k)
    coeffs[k] = amp * sums[k] / static_cast<double>(k);
  return coeffs;
}

}  // namespace

double cons_coefficient(const Path& path, std::size_t k) {
  return coefficient_kernel(path, k)[k];
}

CoefficientSequence coefficient_sequence(const Path& path, std::size_t n_max) {
  CoefficientSequence seq;
  seq.T = path.T;
  seq.coeffs = coefficient_kernel(path, n_max);
  seq.energy.resize(seq.coeffs.size());
  for (std::size_t k = 0; k < seq.coeffs.size(); ++k)
    seq.energy[k] = seq.coeffs[k] * seq.coeffs[k];
  seq.nyquist_index = path.segments() / 2;
  return seq;
}

}  // namespace sqm
