#ifndef SQM_SQRT_CALCULUS_HPP
#define SQM_SQRT_CALCULUS_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace sqm {

using cxd = std::complex<double>;

/// Complex polynomial p(w) = sum coef[j] w^j; coef is never empty.
struct Poly {
  std::vector<cxd> coef{cxd(0.0, 0.0)};

  std::size_t degree() const { return coef.size() - 1; }
  cxd eval(cxd w) const;
  Poly derivative() const;
  Poly shifted(cxd delta) const;        // p(w + delta) as a poly in w
  Poly times_monomial(cxd scale) const; // scale * w * p(w)
  Poly operator*(const Poly& other) const;
  Poly& operator*=(cxd s);
  Poly operator+(const Poly& other) const;
};

/// One coordinate of a product system:
///   f(x) = poly(w) * exp(2 pi i modulation w) * (2 pi sd^2)^{-1/4}
///          * exp(-w^2 / (4 sd^2)),           w = x - mean.
/// A plain factor has poly = {mass} and modulation = 0; then the squared
/// factor is mass^2 times the Normal(mean, sd^2) density. Derivatives,
/// Fourier transforms and characteristic-function multipliers stay inside
/// this family with closed-form parameter maps.
struct GaussFactor {
  double mean = 0.0;
  double sd = 1.0;
  Poly poly{{cxd(1.0, 0.0)}};
  double modulation = 0.0;

  static GaussFactor plain(double mean, double sd, double mass);
  bool is_plain() const;
  cxd eval(double x) const;
  double mass() const;  // L2 norm
};

/// Piecewise-linear complex function on a uniform grid, zero outside
/// [x0, x0 + dx*(values.size()-1)]. Used both as a square-root density
/// factor and as a sampled bounded multiplier.
struct GridFactor {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<cxd> values;

  double x_end() const { return x0 + dx * static_cast<double>(values.size() - 1); }
  cxd eval(double x) const;
  double mass() const;  // L2 norm, exact per segment
};

using Factor = std::variant<GaussFactor, GridFactor>;

cxd factor_eval(const Factor& f, double x);
double factor_mass(const Factor& f);

/// <f, g> = Int f(x) conj(g(x)) x^power dx over the real line.
/// Gauss/Gauss pairs are closed form (complex Gaussian moments); pairs
/// involving a grid side integrate per segment with Gauss-Legendre panels.
cxd factor_pair_moment(const Factor& f, const Factor& g, int power = 0);
inline cxd factor_overlap(const Factor& f, const Factor& g) {
  return factor_pair_moment(f, g, 0);
}

/// Same overlap restricted to [a, b].
cxd factor_overlap_interval(const Factor& f, const Factor& g, double a,
                            double b);

/// Product system truncated at level N = factors.size(). The tail beyond N
/// is a product of unit-shape factors whose masses enter only through their
/// product, stored as tail_mass (1.0 = projective tail).
struct ProductSystem {
  std::vector<Factor> factors;
  double tail_mass = 1.0;

  std::size_t level() const { return factors.size(); }
  double norm() const;
};

/// Finite complex linear combination of product systems sharing one level;
/// the finite-truncation avatar of a square root of a measure.
struct MixtureSystem {
  struct Term {
    cxd coefficient;
    ProductSystem system;
  };
  std::vector<Term> terms;

  std::size_t level() const;
  void validate() const;

  static MixtureSystem single(ProductSystem s, cxd coefficient = 1.0);
};

// ---- superprojectivity / projectivization ----------------------------------

struct SuperprojectivityReport {
  bool holds = true;
  double worst_slack = 0.0;          // min over levels of 1 - mass^2
  std::vector<double> slack;         // per coordinate 2..N
};

/// For a positive single-term product system the marginalization condition
/// reduces to mass <= 1 for every coordinate past the first; slack is
/// reported in squared mass. Throws std::invalid_argument for complex
/// mixtures (the condition concerns positive systems).
SuperprojectivityReport check_superprojective(const MixtureSystem& f);

/// Rescales a positive superprojective system to a projective one by pushing
/// all factor masses into the first coordinate; reports the Hellinger
/// distance to the input (0 at finite truncation when masses multiply out).
struct ProjectivizeResult {
  ProductSystem system;
  double distance = 0.0;
};
ProjectivizeResult projectivize(const ProductSystem& f);

// ---- products, inner products, decomposition --------------------------------

/// Level-n density of f * conj(g): bilinear combination over term pairs of
/// per-coordinate 1-D factor products, with the coordinates past n collapsed
/// into scalar overlaps.
struct LevelDensity {
  struct TermPair {
    cxd weight;  // alpha_f * conj(alpha_g) * tail overlaps
    std::vector<std::pair<Factor, Factor>> coords;  // first n coordinates
  };
  std::vector<TermPair> pairs;
  /// Partial tail products Pi_{n < i <= n+k} <f_i, g_i> for k = 0..N-n of
  /// the first term pair, plus a monotonicity flag (meaningful for positive
  /// systems, where the sequence must decrease).
  std::vector<double> tail_partials;
  bool tail_monotone = true;

  cxd eval(std::span<const double> x) const;
};
LevelDensity product_marginal(const MixtureSystem& f, const MixtureSystem& g,
                              std::size_t n);

/// <f, g> = (f . conj(g))(R^infty): sum over term pairs of the product of
/// 1-D overlaps, reduced in fixed term order.
cxd hellinger_inner(const MixtureSystem& f, const MixtureSystem& g);
double hellinger_norm(const MixtureSystem& f);
double hellinger_distance(const MixtureSystem& f, const MixtureSystem& g);

/// (f . conj(g))(E) for E = box x R^infty over the first coordinates; box
/// bounds are (lo, hi) pairs.
cxd product_measure_box(const MixtureSystem& f, const MixtureSystem& g,
                        std::span<const std::pair<double, double>> box);

/// f = h1 - h2 + i (h3 - h4) with positive-coefficient parts, splitting each
/// coefficient a+bi into (a v 0), (-a v 0), (b v 0), (-b v 0). Recombination
/// is exact on coefficients.
std::array<MixtureSystem, 4> decompose(const MixtureSystem& f);

// ---- translation, Fourier transform, convolution ---------------------------

/// tau_h f = f(. - h); exact isometry. h is indexed from coordinate 1.
MixtureSystem translate(const MixtureSystem& f, std::span<const double> h);

/// Componentwise Fourier transform with the e^{+2 pi i <x,xi>} kernel.
/// Gaussian-family factors map in closed form; grid factors by exact
/// segmentwise transform resampled on a spectral grid. Parseval holds.
MixtureSystem fourier(const MixtureSystem& f);
MixtureSystem fourier_inverse(const MixtureSystem& f);

Factor fourier_factor(const Factor& f, bool inverse = false);

/// Exact transform of a piecewise-linear grid factor at one frequency
/// (closed form per segment). fourier_factor resamples this on a spectral
/// grid; this entry point evaluates it without resampling error.
cxd grid_fourier_eval(const GridFactor& g, double xi, bool inverse = false);

/// Convolution with the positive product measure |mu_sqrt|^2. Gaussian
/// coordinates go through the closed Fourier chain F^{-1}(muhat x F(f));
/// grid coordinates convolve exactly at the output nodes.
MixtureSystem convolve(const ProductSystem& mu_sqrt, const MixtureSystem& f);

/// Total mass of the measure |mu_sqrt|^2.
double measure_total_mass(const ProductSystem& mu_sqrt);

// ---- cylinder multiplication -----------------------------------------------
// The multiplication operator w x f for bounded cylinder functions w,
// supported for per-coordinate product multipliers. Grid multipliers realize
// the general bounded case by pointwise multiplication at the multiplier's
// resolution; the characteristic-function, modulation and linear forms are
// exact in the Gaussian family.

/// w(x) = w_grid(x_coord) (zero outside its grid), times f.
MixtureSystem multiply_grid(const MixtureSystem& f, std::size_t coord,
                            const GridFactor& w);

/// One coordinate of a Gaussian characteristic function:
/// w(x) = weight * exp(2 pi i mean x - 2 pi^2 var x^2).
struct GaussCharfn {
  double mean = 0.0;
  double var = 0.0;
  cxd weight = 1.0;
};
MixtureSystem multiply_charfn(const MixtureSystem& f,
                              std::span<const GaussCharfn> parts);

/// w(x) = exp(2 pi i <x, rho>) for finitely supported rho.
MixtureSystem multiply_modulation(const MixtureSystem& f,
                                  std::span<const double> rho);

/// w(x) = sum_k lambda_k x_k (one mixture term per supported coordinate).
MixtureSystem multiply_linear(const MixtureSystem& f,
                              std::span<const cxd> lambda);

MixtureSystem multiply_constant(const MixtureSystem& f, cxd c);

// ---- differentiation and spectral quantities --------------------------------

enum class DerivativeMethod { closed_form, finite_difference };

/// Directional derivative along rho. closed_form differentiates Gaussian
/// factors (product rule across supported coordinates); finite_difference
/// uses central differences of translates at two steps with Richardson
/// extrapolation, step scaled by 1/max|rho|.
MixtureSystem directional_derivative(const MixtureSystem& f,
                                     std::span<const double> rho,
                                     DerivativeMethod method,
                                     double fd_step = 1e-3);

/// Int xi_i xi_j d|fhat|^2 (1-based coordinates). Real by conjugate
/// symmetry of the spectral measure.
double cross_moment(const MixtureSystem& f, std::size_t i, std::size_t j);

/// Int xi_k^2 d|fhat|^2.
double spectral_second_moment(const MixtureSystem& f, std::size_t k);

struct FrechetReport {
  double lhs = 0.0;           // ||d_rho f||^2
  double rhs = 0.0;           // 4 pi^2 (sup_n a_n^{-2} Int xi_n^2 d|fhat|^2) ||rho||_a^2
  double identity_lhs = 0.0;  // ||d_rho f||^2
  double identity_rhs = 0.0;  // 4 pi^2 sum_k rho_k^2 Int xi_k^2 d|fhat|^2
  bool holds = false;
};

/// Both sides of the derivative bound for a real system, plus the exact
/// norm identity behind it. The 4 pi^2 factor comes from
/// F(d_rho f) = 2 pi i <xi, rho> x fhat.
FrechetReport frechet_bound_check(const MixtureSystem& f,
                                  std::span<const double> a_weights,
                                  std::span<const double> rho);

/// phi(x) = <tau_x f, f>: the characteristic function of |fhat|^2.
cxd shift_characteristic(const MixtureSystem& f, std::span<const double> x);

struct MetricResult {
  double value = 0.0;
  double tail_bound = 0.0;  // 2^{-N}
};
/// d(x,y) = sum_{n<=N} 2^{-n} |x_n-y_n| / (1 + |x_n-y_n|).
MetricResult truncated_metric(std::span<const double> x,
                              std::span<const double> y, std::size_t N);

struct ConvolutionTheoremReport {
  double distance = 0.0;
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
};
/// Hellinger distance between F(mu * f) and muhat x F(f) for a Gaussian
/// product measure |mu_sqrt|^2.
ConvolutionTheoremReport convolution_theorem_check(const ProductSystem& mu_sqrt,
                                                   const MixtureSystem& f);

}  // namespace sqm

#endif  // SQM_SQRT_CALCULUS_HPP
