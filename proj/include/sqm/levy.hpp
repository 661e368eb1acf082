#ifndef SQM_LEVY_HPP
#define SQM_LEVY_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sqm/path.hpp"
#include "sqm/sqrt_calculus.hpp"

namespace sqm {

/// Weighted finite set of paths: the empirical stand-in for the spectral
/// measure |fhat|^2 on path space.
struct PathEnsemble {
  std::vector<Path> paths;
  std::vector<double> weights;

  void validate() const;
  double total_mass() const;
};

/// The multiplier of the Levy Laplacian on the Fourier side,
/// -4 pi^2 <phi>_T / T, with <phi>_T estimated along dyadic partitions.
/// Throws std::runtime_error when the dyadic estimate does not converge.
double levy_symbol(const Path& path, double threshold = 0.02);

struct SymbolConvergenceReport {
  std::vector<std::size_t> n_schedule;
  std::vector<double> errors;  // weighted sum of squared Cesaro errors
  bool decreasing = false;     // last error below the first
};

/// Weighted mean-square error sum_i w_i |cesaro_qv(phi_i, n) - <phi_i>_T/T|^2
/// along the given Cesaro orders. Every path must pass the QV gate.
SymbolConvergenceReport symbol_convergence(const PathEnsemble& ensemble,
                                           std::span<const std::size_t> n_schedule,
                                           double threshold = 0.02);

/// Gamma(n/2)^2 / (Gamma((n+1)/2) Gamma((n-1)/2)) via log-gamma; tends to 1.
double wallis_ratio(std::size_t n);

struct SphericalKernelEval {
  std::size_t n = 0;
  double rho = 0.0;
  double r_n_sq = 0.0;
  double x_n = 0.0;              // -2 pi^2 rho^2 r_n^2 / n
  double value_quadrature = 0.0;
  double value_series = 0.0;
  double error_bound = 0.0;      // (1/n)(|x_n|+1) e^{|x_n|} >= |I_n - e^{x_n}|
};

/// The sphere-average multiplier
///   I_n = Int_0^1 (1-x^2)^{n/2-1} cos(2 pi rho r_n x) dx
///         / Int_0^1 (1-x^2)^{n/2-1} dx,
/// normalized so I_n = 1 at rho = 0, evaluated both by quadrature and by the
/// series sum_k (b_k/k!) x_n^k with b_0 = 1, b_k = prod_j (1+(2j-1)/n)^{-1}.
/// I_n -> e^{x_n} -> e^{-2 pi^2 rho^2 <phi>_T/T} as n grows.
SphericalKernelEval spherical_kernel(std::size_t n, double rho, double r_n_sq);

/// Reweights the ensemble by the squared multiplier I_n(phi_i)^2 with
/// r_n^2 = sum_{k<=n} <phi_i, e_k>^2 (modes 0..n).
PathEnsemble spherical_mean(const PathEnsemble& ensemble, double rho,
                            std::size_t n);

/// Symbol-side difference quotient of the spherical mean:
/// 2 (e^{-2 pi^2 rho^2 q} - 1) / rho^2 -> -4 pi^2 q as rho -> 0.
double laplacian_difference_quotient(double q, double rho);

struct RiemannSandwichReport {
  double i_mn = 0.0;     // the reordered Riemann sum
  double value = 0.0;    // -(2T/pi) I_{M,N}
  double lower = 0.0;
  double upper = 0.0;
  bool holds = false;
  double boundary_slack = 0.0;
  std::vector<double> j_r;  // per-shift partition sums
};

/// The reordered Riemann sum for I(pi/2^N) at step T/2^M including its
/// boundary term, the per-shift sums J_r, and the sandwich check
///   inf-estimate - slack <= -(2T/pi) I_{M,N} <= sup-estimate + slack,
/// where slack = sup_{0<=v<=T/2^N} (|phi(0)-phi(v)|^2 + |phi(T)-phi(T-v)|^2)
/// covers the incomplete boundary increments of the shifted partitions.
RiemannSandwichReport riemann_sandwich(const Path& path, int N, int M,
                                       int sup_inf_trials = 128,
                                       std::uint64_t seed = 1234);

/// Coordinate-sampling bridge from a plain Gaussian product system to path
/// space: draws xi ~ |fhat|^2 per coordinate and synthesizes
/// phi = sum_{k<=n_modes} xi_k e_k on a uniform grid. Coordinate i of the
/// system corresponds to basis mode i-1.
PathEnsemble ensemble_from_gaussian_system(const ProductSystem& system,
                                           double T, std::size_t path_steps,
                                           std::size_t count,
                                           std::uint64_t seed);

}  // namespace sqm

#endif  // SQM_LEVY_HPP
