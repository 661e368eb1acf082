#ifndef SQM_SUMMATION_HPP
#define SQM_SUMMATION_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sqm/path.hpp"

namespace sqm {

/// Thrown by abel_sum when the available sequence cannot reach the requested
/// tail bound; carries the bound the sequence can achieve.
class truncation_error : public std::runtime_error {
 public:
  truncation_error(const std::string& what, double achievable)
      : std::runtime_error(what), achievable_bound_(achievable) {}
  double achievable_bound() const { return achievable_bound_; }

 private:
  double achievable_bound_;
};

struct SummationResult {
  enum class Method { cesaro, abel };
  Method method = Method::cesaro;
  double parameter = 0.0;        // n for cesaro, x for abel
  double value = 0.0;
  double truncation_bound = 0.0; // geometric tail bound (abel only)
};

/// (1/n) * sum_{k=0}^{n} seq[k]; note the divisor is n while the sum has
/// n+1 terms, matching the Cesaro normalization used throughout. Pairwise
/// summation. Requires n >= 1 and seq.size() >= n+1.
double cesaro_mean(std::span<const double> seq, std::size_t n);

/// (1-x) * sum_{n=0}^{N} seq[n] x^n with N chosen so that the geometric
/// tail bound sup|seq| * x^{N+1} falls below eps. Throws truncation_error
/// when the sequence is too short for that.
SummationResult abel_sum(std::span<const double> seq, double x,
                         double eps = 1e-10);

struct TauberianReport {
  bool nonnegative = true;
  std::vector<std::size_t> negative_indices;
  std::vector<std::pair<double, double>> abel_trajectory;        // (x, value)
  std::vector<std::pair<std::size_t, double>> cesaro_trajectory; // (n, value)
  std::vector<double> gaps;  // |abel_j - cesaro_j| over matched indices
};

/// Runs both engines over matched schedules on a nonnegative sequence and
/// reports the trajectories and their gap. A consistency diagnostic for the
/// Abel/Cesaro comparison, not a proof.
TauberianReport tauberian_check(std::span<const double> seq,
                                std::span<const double> x_schedule,
                                std::span<const std::size_t> n_schedule,
                                double abel_eps = 1e-10);

/// Matched evaluation scales for the comparison: x_j = 1 - 2^{-j} against
/// n_j = 2^j for j in [j_min, j_max].
struct TauberianSchedules {
  std::vector<double> x;
  std::vector<std::size_t> n;
};
TauberianSchedules tauberian_matched_schedules(int j_min, int j_max);

/// Cesaro mean of the squared basis coefficients of a path:
/// (<phi,e_0>^2 + ... + <phi,e_n>^2) / n. Converges to <phi>_T / T when the
/// quadratic variation of the path exists.
double cesaro_qv(const Path& path, std::size_t n);

}  // namespace sqm

#endif  // SQM_SUMMATION_HPP
