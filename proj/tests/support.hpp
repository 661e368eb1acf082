#ifndef SQM_TESTS_SUPPORT_HPP
#define SQM_TESTS_SUPPORT_HPP

// Test-side oracles, kept independent of the library's quadrature and
// summation paths: adaptive Simpson instead of Gauss-Kronrod, plain
// accumulation instead of pairwise reduction.

#include <cmath>
#include <functional>

namespace sqm_test {

inline double simpson_panel(const std::function<double(double)>& f, double a,
                            double m, double b, double fa, double fm,
                            double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f,
                                   double a, double b, double fa, double fm,
                                   double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_panel(f, a, lm, m, fa, flm, fm);
  const double right = simpson_panel(f, m, rm, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol,
                              depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol,
                              depth - 1);
}

/// Adaptive Simpson quadrature oracle.
inline double simpson_oracle(const std::function<double(double)>& f, double a,
                             double b, double tol = 1e-11, int depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = simpson_panel(f, a, m, b, fa, fm, fb);
  return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth);
}

}  // namespace sqm_test

#endif  // SQM_TESTS_SUPPORT_HPP
