#ifndef SQM_PATH_HPP
#define SQM_PATH_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sqm {

/// A real-valued function on [0,T], sampled on a strictly increasing grid
/// with value 0 at the origin, and piecewise linear between samples. Every
/// integral against a Path in this library is evaluated exactly per segment.
struct Path {
  double T = 1.0;
  std::vector<double> grid;    // 0 = t_0 < ... < t_M = T
  std::vector<double> values;  // values[0] == 0
  std::string kind;            // generator metadata
  std::uint64_t seed = 0;

  /// Piecewise-linear evaluation; throws std::domain_error outside [0,T].
  double eval(double t) const;

  std::size_t segments() const { return grid.size() - 1; }

  /// True when the grid is exactly {i*T/M} with M a power of two.
  bool uniform_pow2_grid() const;

  /// Throws std::invalid_argument if the invariants do not hold.
  void validate() const;
};

/// A finite partition 0 = v_0 < ... < v_n = T of [0,T].
struct PartitionSpec {
  std::vector<double> points;

  double mesh() const;
  std::size_t intervals() const { return points.size() - 1; }
  void validate() const;

  /// Dyadic partition {k T / 2^level}.
  static PartitionSpec dyadic(double T, int level);

  /// Uniform n-interval partition.
  static PartitionSpec uniform(double T, std::size_t n);

  /// Points {offset + k*step} clipped to (0,T) and completed with 0 and T.
  /// All interval lengths are <= step provided 0 <= offset <= step.
  static PartitionSpec shifted_uniform(double T, double step, double offset);
};

enum class QvStatus { converged, converging_to_zero, not_converged };

/// Per-level quadratic variation along dyadic partitions plus a stopping
/// diagnostic. `limit` is always the finest-level value; callers that need
/// the extrapolated quadratic variation should use `qv()`, which maps a
/// geometrically decaying sequence to 0.
struct QvEstimate {
  std::vector<int> levels;
  std::vector<double> values;
  double limit = 0.0;
  double rel_change = 0.0;
  QvStatus status = QvStatus::not_converged;

  double qv() const {
    return status == QvStatus::converging_to_zero ? 0.0 : limit;
  }
  bool exists() const { return status != QvStatus::not_converged; }
};

// ---- generators -----------------------------------------------------------

/// Dyadic random walk on a uniform grid of `steps` intervals (power of two):
/// i.i.d. Gaussian increments of variance sigma^2 * T / steps.
Path make_brownian(double T, std::size_t steps, std::uint64_t seed,
                   double sigma = 1.0);

/// phi = sum_k coeffs[k] e_k with the H_0^1 basis of cons_basis, sampled on
/// a uniform grid of `steps` intervals.
Path make_smooth_fourier(double T, std::size_t steps,
                         std::span<const double> coeffs);

Path make_linear(double T, std::size_t steps, double slope);
Path make_zero(double T, std::size_t steps);

/// phi -> alpha * phi on the same grid.
Path scale_path(const Path& path, double alpha);

// ---- operations ------------------------------------------------------------

/// Q_T(phi, partition) = sum |phi(v_i) - phi(v_{i-1})|^2, with phi evaluated
/// by piecewise-linear interpolation. Pairwise summation.
double quadratic_variation(const Path& path, const PartitionSpec& partition);

/// Q_T along dyadic levels level_min..level_max. Converged when the relative
/// change between the two finest levels is below `threshold`; a sequence
/// whose last levels decay geometrically is flagged converging_to_zero.
QvEstimate qv_limit_dyadic(const Path& path, int level_min, int level_max,
                           double threshold = 0.02);

struct QvSupInf {
  double sup_estimate = 0.0;
  double inf_estimate = 0.0;
};

/// Randomized search over partitions with mesh <= mesh_bound: the finest
/// dyadic partition of that mesh, shifted uniform partitions with random
/// offsets, and jittered uniform partitions. A diagnostic, not ground truth.
QvSupInf qv_sup_inf(const Path& path, double mesh_bound, int trials,
                    std::uint64_t seed);

/// I(v) = -(pi/2T) * (1/v) * Int_0^{pi-v} |phi(T(t+v)/pi) - phi(Tt/pi)|^2 dt
/// for v in (0,pi), evaluated exactly over the path's linear segments.
/// Always <= 0.
double increment_energy(const Path& path, double v);

}  // namespace sqm

#endif  // SQM_PATH_HPP
