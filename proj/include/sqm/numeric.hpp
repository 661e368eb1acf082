#ifndef SQM_NUMERIC_HPP
#define SQM_NUMERIC_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace sqm {

/// Pairwise (cascade) summation. All large reductions in this library go
/// through this so that results do not depend on accumulation chunking.
double pairwise_sum(std::span<const double> v);

/// Adaptive Gauss-Kronrod (G7,K15) quadrature of f on [a,b].
/// Subdivides until the embedded error estimate of each panel is below
/// tol * max(1, |whole-interval estimate|) or max_depth is reached.
double gk_integrate(const std::function<double(double)>& f, double a, double b,
                    double tol = 1e-12, int max_depth = 24);

/// Same, with caller-supplied breakpoints (including both endpoints) where
/// the integrand changes character (kernel spikes, kinks).
double gk_integrate_split(const std::function<double(double)>& f,
                          std::span<const double> breakpoints,
                          double tol = 1e-12, int max_depth = 24);

/// In-place radix-2 complex FFT, a.size() must be a power of two.
/// Forward transform uses the e^{-2 pi i jk/n} kernel.
void fft_radix2(std::vector<std::complex<double>>& a, bool inverse = false);

/// Sine sums S_k = sum_{j=1}^{m-1} d[j] * sin(pi j k / m) for k = 0..n_max,
/// where m = d.size(). Uses a DST-I through an odd extension of length 2m
/// when m is a power of two, otherwise rotation recurrences. d[0] is ignored
/// (the j = 0 node does not contribute).
std::vector<double> sine_table_sums(std::span<const double> d, std::size_t n_max);

/// Deterministic random source. std::mt19937_64 output is mandated by the
/// standard, and the uniform/gaussian mappings are fixed here rather than
/// delegated to std distributions (whose algorithms are implementation
/// defined), so streams reproduce across platforms for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0,1) with 53 random bits.
  double uniform();

  /// Standard normal via polar Box-Muller (caches the second deviate).
  double gaussian();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sqm

#endif  // SQM_NUMERIC_HPP
