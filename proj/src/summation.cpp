#include "sqm/summation.hpp"

#include <algorithm>
#include <cmath>

#include "sqm/cons_basis.hpp"
#include "sqm/numeric.hpp"

namespace sqm {

double cesaro_mean(std::span<const double> seq, std::size_t n) {
  if (n == 0) throw std::invalid_argument("cesaro_mean: n must be >= 1");
  if (seq.size() < n + 1)
    throw std::invalid_argument("cesaro_mean: sequence shorter than n+1");
  return pairwise_sum(seq.first(n + 1)) / static_cast<double>(n);
}

SummationResult abel_sum(std::span<const double> seq, double x, double eps) {
  if (x < 0.0 || x >= 1.0)
    throw std::invalid_argument("abel_sum: x must lie in [0,1)");
  if (!(eps > 0.0)) throw std::invalid_argument("abel_sum: eps must be > 0");
  if (seq.empty()) throw std::invalid_argument("abel_sum: empty sequence");

  double sup = 0.0;
  for (double v : seq) sup = std::max(sup, std::abs(v));

  SummationResult res;
  res.method = SummationResult::Method::abel;
  res.parameter = x;

  if (sup == 0.0 || x == 0.0) {
    res.value = seq[0];
    res.truncation_bound = 0.0;
    return res;
  }

  // Smallest N with sup * x^{N+1} < eps.
  const double need = std::log(eps / sup) / std::log(x);
  std::size_t n_terms;  // number of terms = N+1
  if (need <= 1.0) {
    n_terms = 1;
  } else {
    n_terms = static_cast<std::size_t>(std::ceil(need));
  }
  if (n_terms > seq.size()) {
    const double achievable =
        sup * std::pow(x, static_cast<double>(seq.size()));
    throw truncation_error(
        "abel_sum: sequence too short for the requested tail bound "
        "(achievable bound " +
            std::to_string(achievable) + ")",
        achievable);
  }
  std::vector<double> terms(n_terms);
  double xpow = 1.0;
  for (std::size_t k = 0; k < n_terms; ++k) {
    terms[k] = seq[k] * xpow;
    xpow *= x;
  }
  res.value = (1.0 - x) * pairwise_sum(terms);
  res.truncation_bound = sup * xpow;  // xpow = x^{N+1} after the loop
  return res;
}

TauberianReport tauberian_check(std::span<const double> seq,
                                std::span<const double> x_schedule,
                                std::span<const std::size_t> n_schedule,
                                double abel_eps) {
  TauberianReport rep;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] < 0.0) {
      rep.nonnegative = false;
      if (rep.negative_indices.size() < 16) rep.negative_indices.push_back(i);
    }
  }
  for (double x : x_schedule)
    rep.abel_trajectory.emplace_back(x, abel_sum(seq, x, abel_eps).value);
  for (std::size_t n : n_schedule)
    rep.cesaro_trajectory.emplace_back(n, cesaro_mean(seq, n));
  const std::size_t m =
      std::min(rep.abel_trajectory.size(), rep.cesaro_trajectory.size());
  for (std::size_t j = 0; j < m; ++j)
    rep.gaps.push_back(std::abs(rep.abel_trajectory[j].second -
                                rep.cesaro_trajectory[j].second));
  return rep;
}

TauberianSchedules tauberian_matched_schedules(int j_min, int j_max) {
  if (j_min < 1 || j_max < j_min)
    throw std::invalid_argument("tauberian_matched_schedules: bad range");
  TauberianSchedules s;
  for (int j = j_min; j <= j_max; ++j) {
    s.x.push_back(1.0 - std::pow(2.0, -j));
    s.n.push_back(std::size_t{1} << j);
  }
  return s;
}

double cesaro_qv(const Path& path, std::size_t n) {
  if (n == 0) throw std::invalid_argument("cesaro_qv: n must be >= 1");
  const CoefficientSequence seq = coefficient_sequence(path, n);
  return cesaro_mean(seq.energy, n);
}

}  // namespace sqm
