#ifndef SQM_POISSON_HPP
#define SQM_POISSON_HPP

#include <cstddef>
#include <span>

#include "sqm/path.hpp"

namespace sqm {

/// Poisson kernel family on [0,1) x [0,pi], with D = 1 - 2x cos s + x^2
/// evaluated as (1-x)^2 + 4x sin^2(s/2) to avoid cancellation near x = 1:
///   P0(x,s) = (1/pi) (1-x^2)/D
///   P1(x,s) = -(1-x) d/ds P0 = (2/pi) x(1-x)(1-x^2) sin s / D^2
///   P2(x,s) = d/ds P1
///           = (2/pi) x(1-x)(1-x^2) [cos s / D^2 - 4x sin^2 s / D^3]
double poisson_p0(double x, double s);
double poisson_p1(double x, double s);
double poisson_p2(double x, double s);
double poisson_eval(int order, double x, double s);

/// The zero of P2(x, .) on (0,pi):
///   cos theta_x = (sqrt((1+x^2)^2 + 32 x^2) - (1+x^2)) / (4x).
/// P2 >= 0 exactly on [0, theta_x]; theta_x -> 0 as x -> 1.
double theta_x(double x);

/// Antiderivative of v P2(x,v): F(v) = v P1(x,v) + (1-x) P0(x,v).
double vp2_primitive(double x, double v);

struct KernelMoments {
  double abs_moment = 0.0;      // Int_0^pi  v |P2(x,v)| dv
  double signed_moment = 0.0;   // Int_0^pi  v  P2(x,v)  dv   -> -2/pi
  double tail_abs_moment = 0.0; // Int_delta^pi v |P2(x,v)| dv -> 0
};

/// All three moments in closed form, splitting |P2| at theta_x.
KernelMoments kernel_moment_integrals(double x, double delta);

/// Int_0^pi P1(x,s) phi(s) ds for phi given as a piecewise-linear sampling
/// of [0,pi]; each segment integrates exactly against the closed-form
/// antiderivatives of P1 and s P1. Converges to (2/pi) phi(0) as x -> 1.
double p1_delta_action(std::span<const double> nodes,
                       std::span<const double> values, double x);

/// Abel sum of the path's energy sequence, decomposed into the boundary
/// term, two P1 boundary integrals, and the two P2 double-integral pieces
/// (reduced to single integrals in v = s -/+ t). The pieces reassemble the
/// total up to series truncation; `residual` reports the defect.
struct AbelEnergyDecomposition {
  double total = 0.0;          // (1-x) sum_n <phi,e_n>^2 x^n
  double boundary_term = 0.0;  // (2/T) phi(T)^2
  double i1 = 0.0;             // -> -(4/T) phi(T)^2
  double j2 = 0.0;             // -> +(2/T) phi(T)^2
  double k1 = 0.0;             // -> 0 for continuous paths
  double k2 = 0.0;             // -> <phi>_T / T when the QV exists
  double zero_mode_adjustment = 0.0;  // (1-x) phi(T)^2 / T, see note below
  double residual = 0.0;
};

/// Note: the kernel assembly treats the n = 0 term with the same
/// sqrt(2/T) (-1)^n phi(T) normalization as the sine modes, while the true
/// e_0 coefficient is phi(T)/sqrt(T). zero_mode_adjustment is the exact
/// difference (1-x) phi(T)^2 / T and is subtracted when reassembling.
AbelEnergyDecomposition abel_energy_decomposition(const Path& path, double x,
                                                  double quad_tol = 1e-9);

}  // namespace sqm

#endif  // SQM_POISSON_HPP
