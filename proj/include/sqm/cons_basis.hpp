#ifndef SQM_CONS_BASIS_HPP
#define SQM_CONS_BASIS_HPP

#include <cstddef>
#include <vector>

#include "sqm/path.hpp"

namespace sqm {

/// Orthonormal system of H_0^1[0,T]:
///   e_0(s) = s / sqrt(T),
///   e_k(s) = sqrt(2T)/(k pi) * sin(k pi s / T)   (k >= 1).
double basis_eval(std::size_t k, double s, double T);

/// Coefficients <phi, e_k> for k = 0..n_max plus the derived energies
/// <phi, e_k>^2. Modes above the grid's Nyquist index (segments/2) are
/// interpolation-limited and flagged through nyquist_index.
struct CoefficientSequence {
  double T = 1.0;
  std::vector<double> coeffs;
  std::vector<double> energy;
  std::size_t nyquist_index = 0;

  std::size_t n_max() const { return coeffs.size() - 1; }
  bool resolution_limited() const { return n_max() > nyquist_index; }
};

/// <phi, e_k>. For k = 0 this is phi(T)/sqrt(T) (the integration-by-parts
/// value; the k*sin(ks) kernel of the sine modes degenerates at k = 0).
/// For k >= 1:
///   <phi, e_k> = sqrt(2/T) [ (-1)^k phi(T)
///                            + Int_0^pi phi(T s/pi) k sin(k s) ds ],
/// with the oscillatory integral evaluated in closed form per linear
/// segment of the path. Equals cons_coefficient-by-batch bit for bit.
double cons_coefficient(const Path& path, std::size_t k);

/// Batched coefficients 0..n_max in a single pass over the segments
/// (one FFT for uniform power-of-two grids, amortized trig recurrences
/// otherwise).
CoefficientSequence coefficient_sequence(const Path& path, std::size_t n_max);

}  // namespace sqm

#endif  // SQM_CONS_BASIS_HPP
