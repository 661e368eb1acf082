#include "sqm/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqm {

double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1].
constexpr double kGkNode[8] = {
    0.0,
    0.207784955007898468,
    0.405845151377397167,
    0.586087235467691130,
    0.741531185599394440,
    0.864864423359769073,
    0.949107912342758525,
    0.991455371120812639};
constexpr double kGkWeight[8] = {
    0.209482141084727828,
    0.204432940075298892,
    0.190350578064785410,
    0.169004726639267903,
    0.140653259715525919,
    0.104790010322250184,
    0.063092092629978553,
    0.022935322010529225};
constexpr double kGaussWeight[4] = {
    0.417959183673469388,
    0.381830050505118945,
    0.279705391489276668,
    0.129484966168869693};

struct Panel {
  double integral;
  double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = kGkWeight[0] * fc;
  double gauss = kGaussWeight[0] * fc;
  for (int i = 1; i < 8; ++i) {
    const double lo = f(c - h * kGkNode[i]);
    const double hi = f(c + h * kGkNode[i]);
    kronrod += kGkWeight[i] * (lo + hi);
    if (i % 2 == 0) gauss += kGaussWeight[i / 2] * (lo + hi);
  }
  kronrod *= h;
  gauss *= h;
  const double diff = std::abs(kronrod - gauss);
  return {kronrod, std::min(diff, std::pow(200.0 * diff, 1.5))};
}

double gk_adapt(const std::function<double(double)>& f, double a, double b,
                double abs_tol, int depth) {
  const Panel p = gk15(f, a, b);
  if (p.error <= abs_tol || depth <= 0) return p.integral;
  const double c = 0.5 * (a + b);
  return gk_adapt(f, a, c, 0.5 * abs_tol, depth - 1) +
         gk_adapt(f, c, b, 0.5 * abs_tol, depth - 1);
}

}  // namespace

double gk_integrate(const std::function<double(double)>& f, double a, double b,
                    double tol, int max_depth) {
  if (!(a <= b)) throw std::invalid_argument("gk_integrate: a > b");
  if (a == b) return 0.0;
  const Panel whole = gk15(f, a, b);
  const double abs_tol = tol * std::max(1.0, std::abs(whole.integral));
  if (whole.error <= abs_tol) return whole.integral;
  const double c = 0.5 * (a + b);
  return gk_adapt(f, a, c, 0.5 * abs_tol, max_depth) +
         gk_adapt(f, c, b, 0.5 * abs_tol, max_depth);
}

double gk_integrate_split(const std::function<double(double)>& f,
                          std::span<const double> breakpoints, double tol,
                          int max_depth) {
  if (breakpoints.size() < 2)
    throw std::invalid_argument("gk_integrate_split: need >= 2 breakpoints");
  std::vector<double> parts;
  parts.reserve(breakpoints.size() - 1);
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
    parts.push_back(
        gk_integrate(f, breakpoints[i], breakpoints[i + 1], tol, max_depth));
  return pairwise_sum(parts);
}

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft_radix2: size must be a power of two");
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

std::vector<double> sine_table_sums(std::span<const double> d,
                                    std::size_t n_max) {
  const std::size_t m = d.size();
  if (m < 2) throw std::invalid_argument("sine_table_sums: need m >= 2");
  std::vector<double> out(n_max + 1, 0.0);
  const bool pow2 = (m & (m - 1)) == 0;
  if (pow2) {
    // DST-I via odd extension: A[k] = -2i * S_k for the length-2m FFT.
    std::vector<std::complex<double>> a(2 * m, 0.0);
    for (std::size_t j = 1; j < m; ++j) {
      a[j] = d[j];
      a[2 * m - j] = -d[j];
    }
    fft_radix2(a, false);
    // S_k is 2m-periodic in k, so the spectrum covers any requested n_max.
    for (std::size_t k = 1; k <= n_max; ++k)
      out[k] = -0.5 * a[k % (2 * m)].imag();
    return out;
  }
  // Rotation recurrence per node: sin(k u_j), cos(k u_j) advanced in k.
  std::vector<double> s(m, 0.0), c(m, 1.0), s1(m), c1(m);
  for (std::size_t j = 1; j < m; ++j) {
    const double u = M_PI * static_cast<double>(j) / static_cast<double>(m);
    s1[j] = std::sin(u);
    c1[j] = std::cos(u);
  }
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

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, r2;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    r2 = u * u + v * v;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = v * scale;
  have_spare_ = true;
  return u * scale;
}

}  // namespace sqm
