#include "sqm/sqrt_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sqm/numeric.hpp"

namespace sqm {

// ---- Poly -------------------------------------------------------------------

cxd Poly::eval(cxd w) const {
  cxd acc(0.0, 0.0);
  for (std::size_t j = coef.size(); j-- > 0;) acc = acc * w + coef[j];
  return acc;
}

Poly Poly::derivative() const {
  if (coef.size() == 1) return Poly{{cxd(0.0, 0.0)}};
  Poly out;
  out.coef.resize(coef.size() - 1);
  for (std::size_t j = 1; j < coef.size(); ++j)
    out.coef[j - 1] = static_cast<double>(j) * coef[j];
  return out;
}

Poly Poly::shifted(cxd delta) const {
  // p(w + delta) by Horner in the shifted variable.
  Poly out;
  out.coef.assign(coef.size(), cxd(0.0, 0.0));
  for (std::size_t j = coef.size(); j-- > 0;) {
    for (std::size_t k = out.coef.size(); k-- > 1;)
      out.coef[k] = out.coef[k] * delta + out.coef[k - 1];
    out.coef[0] = out.coef[0] * delta + coef[j];
  }
  return out;
}

Poly Poly::times_monomial(cxd scale) const {
  Poly out;
  out.coef.assign(coef.size() + 1, cxd(0.0, 0.0));
  for (std::size_t j = 0; j < coef.size(); ++j)
    out.coef[j + 1] = scale * coef[j];
  return out;
}

Poly Poly::operator*(const Poly& other) const {
  Poly out;
  out.coef.assign(coef.size() + other.coef.size() - 1, cxd(0.0, 0.0));
  for (std::size_t a = 0; a < coef.size(); ++a)
    for (std::size_t b = 0; b < other.coef.size(); ++b)
      out.coef[a + b] += coef[a] * other.coef[b];
  return out;
}

Poly& Poly::operator*=(cxd s) {
  for (auto& c : coef) c *= s;
  return *this;
}

Poly Poly::operator+(const Poly& other) const {
  Poly out;
  out.coef.assign(std::max(coef.size(), other.coef.size()), cxd(0.0, 0.0));
  for (std::size_t j = 0; j < coef.size(); ++j) out.coef[j] += coef[j];
  for (std::size_t j = 0; j < other.coef.size(); ++j)
    out.coef[j] += other.coef[j];
  return out;
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Gauss-Legendre 12 on [-1,1], positive nodes.
constexpr double kGlNode[6] = {0.1252334085114689, 0.3678314989981802,
                               0.5873179542866175, 0.7699026741943047,
                               0.9041172563704749, 0.9815606342467192};
constexpr double kGlWeight[6] = {0.2491470458134028, 0.2334925365383548,
                                 0.2031674267230659, 0.1600783285433462,
                                 0.1069393259953184, 0.0471753363865118};

template <class F>
cxd gl_panel(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  cxd acc(0.0, 0.0);
  for (int i = 0; i < 6; ++i) {
    acc += kGlWeight[i] * (f(c - h * kGlNode[i]) + f(c + h * kGlNode[i]));
  }
  return h * acc;
}

template <class F>
cxd gl_integrate(const F& f, double a, double b, int panels) {
  panels = std::max(panels, 1);
  cxd acc(0.0, 0.0);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    acc += gl_panel(f, a + p * h, a + (p + 1) * h);
  return acc;
}

}  // namespace

// ---- GaussFactor ------------------------------------------------------------

GaussFactor GaussFactor::plain(double mean, double sd, double mass) {
  if (!(sd > 0.0)) throw std::invalid_argument("GaussFactor: sd must be > 0");
  if (mass < 0.0) throw std::invalid_argument("GaussFactor: mass must be >= 0");
  GaussFactor f;
  f.mean = mean;
  f.sd = sd;
  f.poly.coef = {cxd(mass, 0.0)};
  return f;
}

bool GaussFactor::is_plain() const {
  return poly.coef.size() == 1 && poly.coef[0].imag() == 0.0 &&
         modulation == 0.0;
}

cxd GaussFactor::eval(double x) const {
  const double w = x - mean;
  const double env = std::pow(kTwoPi * sd * sd, -0.25) *
                     std::exp(-w * w / (4.0 * sd * sd));
  const cxd osc = std::exp(cxd(0.0, kTwoPi * modulation * w));
  return poly.eval(cxd(w, 0.0)) * osc * env;
}

// ---- GridFactor -------------------------------------------------------------

cxd GridFactor::eval(double x) const {
  const double pos = (x - x0) / dx;
  if (pos < 0.0 || pos > static_cast<double>(values.size() - 1))
    return cxd(0.0, 0.0);
  const std::size_t lo =
      std::min(static_cast<std::size_t>(pos), values.size() - 2);
  const double w = pos - static_cast<double>(lo);
  return values[lo] + w * (values[lo + 1] - values[lo]);
}

double GridFactor::mass() const {
  // |f|^2 is a real quadratic on each segment; Simpson is exact.
  std::vector<double> parts(values.size() - 1);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double q0 = std::norm(values[i]);
    const double q1 = std::norm(values[i + 1]);
    const double qm = std::norm(0.5 * (values[i] + values[i + 1]));
    parts[i] = dx / 6.0 * (q0 + 4.0 * qm + q1);
  }
  return std::sqrt(pairwise_sum(parts));
}

cxd factor_eval(const Factor& f, double x) {
  return std::visit([&](const auto& g) { return g.eval(x); }, f);
}

double factor_mass(const Factor& f) {
  if (const auto* g = std::get_if<GridFactor>(&f)) return g->mass();
  return std::get<GaussFactor>(f).mass();
}

// ---- pair moments -----------------------------------------------------------

namespace {

// The pair-moment engine runs in extended precision: Hellinger distances of
// nearly equal systems cancel ~half the double digits, and the acceptance
// tolerances sit below that floor.
using lcxd = std::complex<long double>;
using lpoly = std::vector<lcxd>;  // coefficients in powers of w

const long double kPiL = acosl(-1.0L);

lpoly lift(const Poly& p, bool conjugate) {
  lpoly out(p.coef.size());
  for (std::size_t j = 0; j < p.coef.size(); ++j) {
    const cxd c = conjugate ? std::conj(p.coef[j]) : p.coef[j];
    out[j] = lcxd(c.real(), c.imag());
  }
  return out;
}

// p(w + delta) by repeated Horner.
lpoly lshift(const lpoly& p, lcxd delta) {
  lpoly out(p.size(), lcxd(0.0L, 0.0L));
  for (std::size_t j = p.size(); j-- > 0;) {
    for (std::size_t k = out.size(); k-- > 1;)
      out[k] = out[k] * delta + out[k - 1];
    out[0] = out[0] * delta + p[j];
  }
  return out;
}

lpoly lmul(const lpoly& a, const lpoly& b) {
  lpoly out(a.size() + b.size() - 1, lcxd(0.0L, 0.0L));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Int f(x) conj(g(x)) x^power dx for two Gaussian-family factors.
lcxd gauss_pair_moment_ld(const GaussFactor& f, const GaussFactor& g,
                          int power) {
  const long double fsd = f.sd, gsd = g.sd, fm = f.mean, gm = g.mean;
  const long double two_pi = 2.0L * kPiL;
  const long double A = 1.0L / (4.0L * fsd * fsd) + 1.0L / (4.0L * gsd * gsd);
  const lcxd B(fm / (2.0L * fsd * fsd) + gm / (2.0L * gsd * gsd),
               two_pi * ((long double)f.modulation - (long double)g.modulation));
  const lcxd C(-fm * fm / (4.0L * fsd * fsd) - gm * gm / (4.0L * gsd * gsd),
               -two_pi * ((long double)f.modulation * fm -
                          (long double)g.modulation * gm));
  const lcxd mu = B / (2.0L * A);
  const lcxd log_amp = C + B * B / (4.0L * A);
  const long double norm = powl(two_pi * fsd * fsd, -0.25L) *
                           powl(two_pi * gsd * gsd, -0.25L);

  lpoly q = lmul(lshift(lift(f.poly, false), mu - fm),
                 lshift(lift(g.poly, true), mu - gm));
  for (int p = 0; p < power; ++p) {
    // multiply by x = w + mu
    lpoly out(q.size() + 1, lcxd(0.0L, 0.0L));
    for (std::size_t j = 0; j < q.size(); ++j) {
      out[j + 1] += q[j];
      out[j] += mu * q[j];
    }
    q = std::move(out);
  }
  // Int w^j e^{-A w^2} dw: zero for odd j, (j-1)!!/(2A)^{j/2} sqrt(pi/A) even.
  std::vector<long double> cm(q.size(), 0.0L);
  cm[0] = sqrtl(kPiL / A);
  for (std::size_t j = 2; j < q.size(); j += 2)
    cm[j] = cm[j - 2] * (long double)(j - 1) / (2.0L * A);
  lcxd acc(0.0L, 0.0L);
  for (std::size_t j = 0; j < q.size(); j += 2) acc += q[j] * cm[j];
  return norm * std::exp(log_amp) * acc;
}

cxd gauss_pair_moment(const GaussFactor& f, const GaussFactor& g, int power) {
  const lcxd v = gauss_pair_moment_ld(f, g, power);
  return cxd(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

// Panels for a smooth complex integrand against Gaussian-family factors.
int panel_count(double a, double b, const GaussFactor& f) {
  const double scale = f.sd / (1.0 + 2.0 * std::abs(f.modulation) * f.sd);
  const double need = (b - a) / (0.25 * scale);
  return static_cast<int>(std::clamp(need, 1.0, 20000.0)) + 1;
}

cxd grid_pair_moment(const GridFactor& gr, const Factor& other, int power,
                     bool grid_is_left) {
  // Integrate over the grid support segment by segment; the other side is
  // smooth there. Gauss-Legendre panels per segment make this exact to
  // roundoff at the grid's own resolution.
  cxd acc(0.0, 0.0);
  for (std::size_t i = 0; i + 1 < gr.values.size(); ++i) {
    const double a = gr.x0 + gr.dx * static_cast<double>(i);
    const double b = a + gr.dx;
    int panels = 1;
    if (const auto* gf = std::get_if<GaussFactor>(&other))
      panels = std::max(1, panel_count(a, b, *gf) / 8);
    acc += gl_integrate(
        [&](double x) {
          const cxd left = grid_is_left ? gr.eval(x) : factor_eval(other, x);
          const cxd right = grid_is_left ? factor_eval(other, x) : gr.eval(x);
          return left * std::conj(right) * std::pow(x, power);
        },
        a, b, panels);
  }
  return acc;
}

}  // namespace

double GaussFactor::mass() const {
  return std::sqrt(std::abs(gauss_pair_moment(*this, *this, 0).real()));
}

cxd factor_pair_moment(const Factor& f, const Factor& g, int power) {
  const auto* fg = std::get_if<GaussFactor>(&f);
  const auto* gg = std::get_if<GaussFactor>(&g);
  if (fg && gg) return gauss_pair_moment(*fg, *gg, power);
  if (const auto* fgr = std::get_if<GridFactor>(&f))
    return grid_pair_moment(*fgr, g, power, /*grid_is_left=*/true);
  return grid_pair_moment(std::get<GridFactor>(g), f, power,
                          /*grid_is_left=*/false);
}

namespace {

// Extended-precision overlap used by the inner-product reductions; grid
// overlaps are grid-resolution-limited anyway and stay in double.
lcxd factor_overlap_ld(const Factor& f, const Factor& g) {
  const auto* fg = std::get_if<GaussFactor>(&f);
  const auto* gg = std::get_if<GaussFactor>(&g);
  if (fg && gg) return gauss_pair_moment_ld(*fg, *gg, 0);
  const cxd v = factor_overlap(f, g);
  return lcxd(v.real(), v.imag());
}

}  // namespace

cxd factor_overlap_interval(const Factor& f, const Factor& g, double a,
                            double b) {
  if (!(a < b)) return cxd(0.0, 0.0);
  int panels = 8;
  if (const auto* fg = std::get_if<GaussFactor>(&f))
    panels = std::max(panels, panel_count(a, b, *fg));
  if (const auto* gg = std::get_if<GaussFactor>(&g))
    panels = std::max(panels, panel_count(a, b, *gg));
  if (const auto* fr = std::get_if<GridFactor>(&f))
    panels = std::max<int>(panels, static_cast<int>((b - a) / fr->dx) + 1);
  if (const auto* gr = std::get_if<GridFactor>(&g))
    panels = std::max<int>(panels, static_cast<int>((b - a) / gr->dx) + 1);
  return gl_integrate(
      [&](double x) { return factor_eval(f, x) * std::conj(factor_eval(g, x)); },
      a, b, std::min(panels, 40000));
}

// ---- systems ----------------------------------------------------------------

double ProductSystem::norm() const {
  double prod = tail_mass * tail_mass;
  for (const auto& f : factors) {
    const double m = factor_mass(f);
    prod *= m * m;
  }
  return std::sqrt(prod);
}

std::size_t MixtureSystem::level() const {
  return terms.empty() ? 0 : terms.front().system.level();
}

void MixtureSystem::validate() const {
  for (const auto& t : terms)
    if (t.system.level() != level())
      throw std::invalid_argument("MixtureSystem: terms must share one level");
}

MixtureSystem MixtureSystem::single(ProductSystem s, cxd coefficient) {
  MixtureSystem m;
  m.terms.push_back({coefficient, std::move(s)});
  return m;
}

namespace {

bool factor_is_positive(const Factor& f) {
  if (const auto* g = std::get_if<GaussFactor>(&f))
    return g->is_plain() && g->poly.coef[0].real() >= 0.0;
  const auto& gr = std::get<GridFactor>(f);
  for (const auto& v : gr.values)
    if (v.imag() != 0.0 || v.real() < 0.0) return false;
  return true;
}

}  // namespace

SuperprojectivityReport check_superprojective(const MixtureSystem& f) {
  if (f.terms.size() != 1)
    throw std::invalid_argument(
        "check_superprojective: expects a single positive term");
  const auto& [alpha, sys] = f.terms.front();
  if (alpha.imag() != 0.0 || alpha.real() < 0.0)
    throw std::invalid_argument(
        "check_superprojective: coefficient must be positive real");
  for (const auto& fac : sys.factors)
    if (!factor_is_positive(fac))
      throw std::invalid_argument(
          "check_superprojective: factors must be positive");

  SuperprojectivityReport rep;
  rep.worst_slack = 1.0;
  // Marginalizing coordinate n+1 scales the level-n square by mass_{n+1}^2,
  // so the condition is mass <= 1 for every coordinate past the first.
  for (std::size_t i = 1; i < sys.factors.size(); ++i) {
    const double m = factor_mass(sys.factors[i]);
    const double slack = 1.0 - m * m;
    rep.slack.push_back(slack);
    rep.worst_slack = std::min(rep.worst_slack, slack);
    if (slack < -1e-12) rep.holds = false;
  }
  return rep;
}

namespace {

Factor scale_factor(const Factor& f, double s) {
  if (const auto* g = std::get_if<GaussFactor>(&f)) {
    GaussFactor out = *g;
    out.poly *= cxd(s, 0.0);
    return out;
  }
  GridFactor out = std::get<GridFactor>(f);
  for (auto& v : out.values) v *= s;
  return out;
}

}  // namespace

ProjectivizeResult projectivize(const ProductSystem& f) {
  const MixtureSystem probe = MixtureSystem::single(f);
  const SuperprojectivityReport rep = check_superprojective(probe);
  if (!rep.holds)
    throw std::invalid_argument("projectivize: system is not superprojective");
  ProductSystem g = f;
  double pushed = f.tail_mass;
  for (std::size_t i = 1; i < g.factors.size(); ++i) {
    const double m = factor_mass(g.factors[i]);
    if (m == 0.0)
      throw std::invalid_argument("projectivize: zero-mass factor");
    g.factors[i] = scale_factor(g.factors[i], 1.0 / m);
    pushed *= m;
  }
  g.factors[0] = scale_factor(g.factors[0], pushed);
  g.tail_mass = 1.0;
  ProjectivizeResult out{std::move(g), 0.0};
  out.distance = hellinger_distance(MixtureSystem::single(f),
                                    MixtureSystem::single(out.system));
  return out;
}

LevelDensity product_marginal(const MixtureSystem& f, const MixtureSystem& g,
                              std::size_t n) {
  if (f.level() != g.level())
    throw std::invalid_argument("product_marginal: level mismatch");
  if (n > f.level())
    throw std::invalid_argument("product_marginal: n exceeds the level");
  LevelDensity out;
  for (const auto& tf : f.terms) {
    for (const auto& tg : g.terms) {
      LevelDensity::TermPair pair;
      pair.weight = tf.coefficient * std::conj(tg.coefficient) *
                    tf.system.tail_mass * tg.system.tail_mass;
      for (std::size_t i = 0; i < n; ++i)
        pair.coords.emplace_back(tf.system.factors[i], tg.system.factors[i]);
      for (std::size_t i = n; i < f.level(); ++i)
        pair.weight *=
            factor_overlap(tf.system.factors[i], tg.system.factors[i]);
      out.pairs.push_back(std::move(pair));
    }
  }
  // Tail-partials diagnostic on the leading term pair.
  if (!f.terms.empty() && !g.terms.empty()) {
    const auto& sf = f.terms.front().system;
    const auto& sg = g.terms.front().system;
    double run = 1.0;
    out.tail_partials.push_back(run);
    for (std::size_t i = n; i < sf.level(); ++i) {
      run *= factor_overlap(sf.factors[i], sg.factors[i]).real();
      out.tail_partials.push_back(run);
      if (out.tail_partials.size() >= 2 &&
          run > out.tail_partials[out.tail_partials.size() - 2] + 1e-12)
        out.tail_monotone = false;
    }
  }
  return out;
}

cxd LevelDensity::eval(std::span<const double> x) const {
  cxd acc(0.0, 0.0);
  for (const auto& pair : pairs) {
    cxd v = pair.weight;
    for (std::size_t i = 0; i < pair.coords.size(); ++i)
      v *= factor_eval(pair.coords[i].first, x[i]) *
           std::conj(factor_eval(pair.coords[i].second, x[i]));
    acc += v;
  }
  return acc;
}

namespace {

lcxd hellinger_inner_ld(const MixtureSystem& f, const MixtureSystem& g) {
  if (f.level() != g.level())
    throw std::invalid_argument("hellinger_inner: level mismatch");
  lcxd acc(0.0L, 0.0L);
  for (const auto& tf : f.terms) {
    for (const auto& tg : g.terms) {
      lcxd v = lcxd(tf.coefficient.real(), tf.coefficient.imag()) *
               lcxd(tg.coefficient.real(), -tg.coefficient.imag());
      v *= (long double)tf.system.tail_mass * (long double)tg.system.tail_mass;
      for (std::size_t i = 0; i < f.level(); ++i)
        v *= factor_overlap_ld(tf.system.factors[i], tg.system.factors[i]);
      acc += v;
    }
  }
  return acc;
}

}  // namespace

cxd hellinger_inner(const MixtureSystem& f, const MixtureSystem& g) {
  const lcxd v = hellinger_inner_ld(f, g);
  return cxd(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

double hellinger_norm(const MixtureSystem& f) {
  const long double n = hellinger_inner_ld(f, f).real();
  return std::sqrt(std::max(0.0, static_cast<double>(n)));
}

double hellinger_distance(const MixtureSystem& f, const MixtureSystem& g) {
  const long double nf = hellinger_inner_ld(f, f).real();
  const long double ng = hellinger_inner_ld(g, g).real();
  const long double cross = hellinger_inner_ld(f, g).real();
  const long double d2 = nf - 2.0L * cross + ng;
  return std::sqrt(std::max(0.0, static_cast<double>(d2)));
}

cxd product_measure_box(const MixtureSystem& f, const MixtureSystem& g,
                        std::span<const std::pair<double, double>> box) {
  if (f.level() != g.level())
    throw std::invalid_argument("product_measure_box: level mismatch");
  if (box.size() > f.level())
    throw std::invalid_argument("product_measure_box: box too deep");
  cxd acc(0.0, 0.0);
  for (const auto& tf : f.terms) {
    for (const auto& tg : g.terms) {
      cxd v = tf.coefficient * std::conj(tg.coefficient) *
              tf.system.tail_mass * tg.system.tail_mass;
      for (std::size_t i = 0; i < f.level(); ++i) {
        if (i < box.size())
          v *= factor_overlap_interval(tf.system.factors[i],
                                       tg.system.factors[i], box[i].first,
                                       box[i].second);
        else
          v *= factor_overlap(tf.system.factors[i], tg.system.factors[i]);
      }
      acc += v;
    }
  }
  return acc;
}

std::array<MixtureSystem, 4> decompose(const MixtureSystem& f) {
  std::array<MixtureSystem, 4> out;
  for (const auto& t : f.terms) {
    const double a = t.coefficient.real();
    const double b = t.coefficient.imag();
    const double parts[4] = {std::max(a, 0.0), std::max(-a, 0.0),
                             std::max(b, 0.0), std::max(-b, 0.0)};
    for (int j = 0; j < 4; ++j)
      out[j].terms.push_back({cxd(parts[j], 0.0), t.system});
  }
  return out;
}

// ---- translation ------------------------------------------------------------

MixtureSystem translate(const MixtureSystem& f, std::span<const double> h) {
  for (std::size_t i = f.level(); i < h.size(); ++i)
    if (h[i] != 0.0)
      throw std::invalid_argument("translate: shift support exceeds the level");
  MixtureSystem out = f;
  for (auto& t : out.terms) {
    for (std::size_t i = 0; i < t.system.factors.size() && i < h.size(); ++i) {
      if (h[i] == 0.0) continue;
      if (auto* g = std::get_if<GaussFactor>(&t.system.factors[i])) {
        g->mean += h[i];
      } else {
        std::get<GridFactor>(t.system.factors[i]).x0 += h[i];
      }
    }
  }
  return out;
}

// ---- Fourier ----------------------------------------------------------------

namespace {

// Closed-form transform of one Gaussian-family factor with the
// e^{sign 2 pi i x xi} kernel: the family is exactly closed under it.
GaussFactor fourier_gauss(const GaussFactor& f, double sign) {
  const double sigma = f.sd;
  const double tau = 1.0 / (4.0 * M_PI * sigma);
  // Moment polynomials in v: m_0 = 1, m_1 = (4 pi i sigma^2) v,
  // m_j = (4 pi i sigma^2) v m_{j-1} + (j-1) 2 sigma^2 m_{j-2}.
  const std::size_t d = f.poly.degree();
  std::vector<Poly> m(d + 1);
  m[0].coef = {cxd(1.0, 0.0)};
  const cxd mu_scale(0.0, 4.0 * M_PI * sigma * sigma);
  if (d >= 1) m[1] = m[0].times_monomial(mu_scale);
  for (std::size_t j = 2; j <= d; ++j) {
    Poly a = m[j - 1].times_monomial(mu_scale);
    Poly b = m[j - 2];
    b *= cxd(static_cast<double>(j - 1) * 2.0 * sigma * sigma, 0.0);
    m[j] = a + b;
  }
  Poly q;
  q.coef.assign(d + 1, cxd(0.0, 0.0));
  for (std::size_t j = 0; j <= d; ++j) {
    Poly term = m[j];
    term *= f.poly.coef[j];
    q = q + term;
  }
  // Substitute v = sign * u and apply the constant phase e^{-2 pi i m c}.
  const cxd phase = std::exp(cxd(0.0, -kTwoPi * f.mean * f.modulation));
  for (std::size_t k = 0; k < q.coef.size(); ++k) {
    double s = (k % 2 == 1 && sign < 0.0) ? -1.0 : 1.0;
    q.coef[k] *= phase * s;
  }
  GaussFactor out;
  out.mean = -sign * f.modulation;
  out.sd = tau;
  out.modulation = sign * f.mean;
  out.poly = q;
  return out;
}

// Exact transform of a piecewise-linear function at one frequency.
cxd grid_transform_at(const GridFactor& g, double xi, double sign) {
  const double omega = sign * kTwoPi * xi;
  cxd acc(0.0, 0.0);
  for (std::size_t i = 0; i + 1 < g.values.size(); ++i) {
    const double t0 = g.x0 + g.dx * static_cast<double>(i);
    const double del = g.dx;
    const cxd v0 = g.values[i];
    const cxd slope = (g.values[i + 1] - g.values[i]) / del;
    cxd inner;
    const double od = omega * del;
    if (std::abs(od) < 1e-4) {
      // Taylor in (i omega): Int_0^D (v0 + b u) e^{i omega u} du.
      cxd iw_pow(1.0, 0.0);
      inner = cxd(0.0, 0.0);
      double factorial = 1.0;
      double dpow = del;
      for (int k = 0; k <= 5; ++k) {
        inner += iw_pow / factorial *
                 (v0 * dpow / static_cast<double>(k + 1) +
                  slope * dpow * del / static_cast<double>(k + 2));
        iw_pow *= cxd(0.0, omega);
        factorial *= static_cast<double>(k + 1);
        dpow *= del;
      }
    } else {
      const cxd iw(0.0, omega);
      const cxd e = std::exp(cxd(0.0, od));
      inner = ((v0 + slope * del) * e - v0) / iw - slope * (e - 1.0) / (iw * iw);
    }
    acc += std::exp(cxd(0.0, omega * t0)) * inner;
  }
  return acc;
}

GridFactor fourier_grid(const GridFactor& g, double sign,
                        std::size_t out_nodes = 4097) {
  // Band: expand until the edge magnitude is negligible, capped at Nyquist.
  const double support = g.x_end() - g.x0;
  const double nyquist = 0.5 / g.dx;
  double band = std::max(4.0 / support, 1e-6);
  double ref = 0.0;
  for (int p = -8; p <= 8; ++p)
    ref = std::max(ref, std::abs(grid_transform_at(g, p * band / 8.0, sign)));
  while (band < nyquist) {
    double edge = 0.0;
    for (int p = 0; p < 4; ++p)
      edge = std::max(edge, std::abs(grid_transform_at(
                                g, band * (0.85 + 0.05 * p), sign)));
    if (edge < 1e-7 * ref) break;
    band *= 2.0;
  }
  band = std::min(band, nyquist);
  GridFactor out;
  out.values.resize(out_nodes);
  out.x0 = -band;
  out.dx = 2.0 * band / static_cast<double>(out_nodes - 1);
  for (std::size_t j = 0; j < out_nodes; ++j)
    out.values[j] = grid_transform_at(g, out.x0 + out.dx * j, sign);
  return out;
}

}  // namespace

Factor fourier_factor(const Factor& f, bool inverse) {
  const double sign = inverse ? -1.0 : 1.0;
  if (const auto* g = std::get_if<GaussFactor>(&f)) return fourier_gauss(*g, sign);
  return fourier_grid(std::get<GridFactor>(f), sign);
}

cxd grid_fourier_eval(const GridFactor& g, double xi, bool inverse) {
  return grid_transform_at(g, xi, inverse ? -1.0 : 1.0);
}

MixtureSystem fourier(const MixtureSystem& f) {
  MixtureSystem out = f;
  for (auto& t : out.terms)
    for (auto& fac : t.system.factors) fac = fourier_factor(fac, false);
  return out;
}

MixtureSystem fourier_inverse(const MixtureSystem& f) {
  MixtureSystem out = f;
  for (auto& t : out.terms)
    for (auto& fac : t.system.factors) fac = fourier_factor(fac, true);
  return out;
}

// ---- cylinder multiplication -------------------------------------------------

namespace {

// Multiply a Gaussian-family factor by K e^{-alpha x^2 + beta x}; the family
// is closed under this for alpha >= 0.
GaussFactor gauss_exp_multiply(const GaussFactor& f, double alpha, cxd beta,
                               cxd K) {
  const double s2 = f.sd * f.sd;
  const double A = 1.0 / (4.0 * s2) + alpha;
  const double B = f.mean / (2.0 * s2) + beta.real();
  const double mu = B / (2.0 * A);
  const double sd_new = 1.0 / (2.0 * std::sqrt(A));
  const double c_new = f.modulation + beta.imag() / kTwoPi;
  const double log_real =
      -f.mean * f.mean / (4.0 * s2) + B * B / (4.0 * A);
  const double phase = (kTwoPi * f.modulation + beta.imag()) * mu -
                       kTwoPi * f.modulation * f.mean;
  const cxd scale = K * std::sqrt(sd_new / f.sd) * std::exp(log_real) *
                    std::exp(cxd(0.0, phase));
  GaussFactor out;
  out.mean = mu;
  out.sd = sd_new;
  out.modulation = c_new;
  out.poly = f.poly.shifted(cxd(mu - f.mean, 0.0));
  out.poly *= scale;
  return out;
}

// Multiply a factor by the coordinate variable x.
Factor multiply_by_x(const Factor& f) {
  if (const auto* g = std::get_if<GaussFactor>(&f)) {
    GaussFactor out = *g;
    // x = w + mean
    Poly shifted = g->poly;
    shifted *= cxd(g->mean, 0.0);
    out.poly = g->poly.times_monomial(1.0) + shifted;
    return out;
  }
  GridFactor out = std::get<GridFactor>(f);
  for (std::size_t j = 0; j < out.values.size(); ++j)
    out.values[j] *= out.x0 + out.dx * static_cast<double>(j);
  return out;
}

}  // namespace

MixtureSystem multiply_grid(const MixtureSystem& f, std::size_t coord,
                            const GridFactor& w) {
  if (coord >= f.level())
    throw std::invalid_argument("multiply_grid: coordinate beyond the level");
  MixtureSystem out = f;
  for (auto& t : out.terms) {
    GridFactor nf;
    nf.x0 = w.x0;
    nf.dx = w.dx;
    nf.values.resize(w.values.size());
    for (std::size_t j = 0; j < w.values.size(); ++j) {
      const double x = w.x0 + w.dx * static_cast<double>(j);
      nf.values[j] = w.values[j] * factor_eval(t.system.factors[coord], x);
    }
    t.system.factors[coord] = std::move(nf);
  }
  return out;
}

MixtureSystem multiply_charfn(const MixtureSystem& f,
                              std::span<const GaussCharfn> parts) {
  if (parts.size() > f.level())
    throw std::invalid_argument("multiply_charfn: too many coordinates");
  MixtureSystem out = f;
  for (auto& t : out.terms) {
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& p = parts[i];
      const double alpha = 2.0 * M_PI * M_PI * p.var;
      const cxd beta(0.0, kTwoPi * p.mean);
      if (auto* g = std::get_if<GaussFactor>(&t.system.factors[i])) {
        t.system.factors[i] = gauss_exp_multiply(*g, alpha, beta, p.weight);
      } else {
        auto& gr = std::get<GridFactor>(t.system.factors[i]);
        for (std::size_t j = 0; j < gr.values.size(); ++j) {
          const double x = gr.x0 + gr.dx * static_cast<double>(j);
          gr.values[j] *= p.weight * std::exp(cxd(-alpha * x * x, 0.0)) *
                          std::exp(cxd(0.0, kTwoPi * p.mean * x));
        }
      }
    }
  }
  return out;
}

MixtureSystem multiply_modulation(const MixtureSystem& f,
                                  std::span<const double> rho) {
  if (rho.size() > f.level())
    throw std::invalid_argument("multiply_modulation: support exceeds level");
  MixtureSystem out = f;
  for (auto& t : out.terms) {
    for (std::size_t i = 0; i < rho.size(); ++i) {
      if (rho[i] == 0.0) continue;
      if (auto* g = std::get_if<GaussFactor>(&t.system.factors[i])) {
        t.system.factors[i] =
            gauss_exp_multiply(*g, 0.0, cxd(0.0, kTwoPi * rho[i]), 1.0);
      } else {
        auto& gr = std::get<GridFactor>(t.system.factors[i]);
        for (std::size_t j = 0; j < gr.values.size(); ++j) {
          const double x = gr.x0 + gr.dx * static_cast<double>(j);
          gr.values[j] *= std::exp(cxd(0.0, kTwoPi * rho[i] * x));
        }
      }
    }
  }
  return out;
}

MixtureSystem multiply_linear(const MixtureSystem& f,
                              std::span<const cxd> lambda) {
  if (lambda.size() > f.level())
    throw std::invalid_argument("multiply_linear: support exceeds level");
  MixtureSystem out;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    if (lambda[k] == cxd(0.0, 0.0)) continue;
    for (const auto& t : f.terms) {
      MixtureSystem::Term nt = t;
      nt.coefficient *= lambda[k];
      nt.system.factors[k] = multiply_by_x(nt.system.factors[k]);
      out.terms.push_back(std::move(nt));
    }
  }
  if (out.terms.empty()) {
    if (f.terms.empty())
      throw std::invalid_argument("multiply_linear: empty system");
    // Zero multiplier: the zero system at the same level.
    MixtureSystem::Term nt = f.terms.front();
    nt.coefficient = cxd(0.0, 0.0);
    out.terms.push_back(std::move(nt));
  }
  return out;
}

MixtureSystem multiply_constant(const MixtureSystem& f, cxd c) {
  MixtureSystem out = f;
  for (auto& t : out.terms) t.coefficient *= c;
  return out;
}

// ---- convolution -------------------------------------------------------------

double measure_total_mass(const ProductSystem& mu_sqrt) {
  const double n = mu_sqrt.norm();
  return n * n;
}

namespace {

// Density of one coordinate of |mu_sqrt|^2 as an evaluable function.
struct CoordDensity {
  const Factor* f;
  double operator()(double y) const { return std::norm(factor_eval(*f, y)); }
  double lo() const {
    if (const auto* g = std::get_if<GaussFactor>(f)) return g->mean - 10.0 * g->sd;
    return std::get<GridFactor>(*f).x0;
  }
  double hi() const {
    if (const auto* g = std::get_if<GaussFactor>(f)) return g->mean + 10.0 * g->sd;
    return std::get<GridFactor>(*f).x_end();
  }
};

Factor convolve_coord(const Factor& mu_fac, const Factor& f_fac) {
  const auto* mg = std::get_if<GaussFactor>(&mu_fac);
  const auto* fg = std::get_if<GaussFactor>(&f_fac);
  if (mg && fg) {
    if (!mg->is_plain())
      throw std::invalid_argument("convolve: measure factors must be plain");
    const double w = mg->poly.coef[0].real();
    if (fg->is_plain()) {
      // Direct closed form: convolving the square-root envelope (variance
      // 2 sd_f^2) with the Normal(mean, sd_mu^2) density gives envelope
      // variance 2 sd_f^2 + sd_mu^2, i.e. sd' = sqrt(sd_f^2 + sd_mu^2/2),
      // and the L2 mass contracts by sqrt(sd_f/sd').
      const double sd_new =
          std::sqrt(fg->sd * fg->sd + 0.5 * mg->sd * mg->sd);
      const double mass_new = w * w * fg->poly.coef[0].real() *
                              std::sqrt(fg->sd / sd_new);
      return GaussFactor::plain(fg->mean + mg->mean, sd_new, mass_new);
    }
    // General Gaussian-family factor: F^{-1}( muhat x F(f) ) in closed form.
    GaussCharfn ch{mg->mean, mg->sd * mg->sd, cxd(w * w, 0.0)};
    GaussFactor hat = fourier_gauss(*fg, 1.0);
    hat = gauss_exp_multiply(hat, 2.0 * M_PI * M_PI * ch.var,
                             cxd(0.0, kTwoPi * ch.mean), ch.weight);
    return fourier_gauss(hat, -1.0);
  }
  // A grid side: evaluate (f * density)(x) on an output grid; each value is
  // an exact piecewise integral (Gauss-Legendre panels over the pieces).
  CoordDensity rho{&mu_fac};
  double f_lo, f_hi, f_dx;
  if (fg) {
    f_lo = fg->mean - 10.0 * fg->sd;
    f_hi = fg->mean + 10.0 * fg->sd;
    f_dx = fg->sd / 16.0;
  } else {
    const auto& gr = std::get<GridFactor>(f_fac);
    f_lo = gr.x0;
    f_hi = gr.x_end();
    f_dx = gr.dx;
  }
  double m_dx = f_dx;
  if (const auto* gr = std::get_if<GridFactor>(&mu_fac)) m_dx = gr->dx;
  if (mg) m_dx = mg->sd / 16.0;

  GridFactor out;
  out.dx = std::min(f_dx, m_dx);
  out.x0 = f_lo + rho.lo();
  const double x_end = f_hi + rho.hi();
  std::size_t nodes =
      static_cast<std::size_t>(std::ceil((x_end - out.x0) / out.dx)) + 1;
  nodes = std::min<std::size_t>(nodes, 1 << 15);
  out.dx = (x_end - out.x0) / static_cast<double>(nodes - 1);
  out.values.resize(nodes);
  for (std::size_t j = 0; j < nodes; ++j) {
    const double x = out.x0 + out.dx * static_cast<double>(j);
    const double ylo = std::max(rho.lo(), x - f_hi);
    const double yhi = std::min(rho.hi(), x - f_lo);
    if (yhi <= ylo) {
      out.values[j] = cxd(0.0, 0.0);
      continue;
    }
    const int panels =
        std::min(8000, static_cast<int>((yhi - ylo) / out.dx) + 4);
    out.values[j] = gl_integrate(
        [&](double y) { return factor_eval(f_fac, x - y) * rho(y); }, ylo, yhi,
        panels);
  }
  return out;
}

}  // namespace

MixtureSystem convolve(const ProductSystem& mu_sqrt, const MixtureSystem& f) {
  if (mu_sqrt.level() != f.level())
    throw std::invalid_argument("convolve: level mismatch");
  MixtureSystem out = f;
  const double mu_tail = mu_sqrt.tail_mass * mu_sqrt.tail_mass;
  for (auto& t : out.terms) {
    for (std::size_t i = 0; i < t.system.factors.size(); ++i)
      t.system.factors[i] =
          convolve_coord(mu_sqrt.factors[i], t.system.factors[i]);
    t.system.tail_mass *= mu_tail;
  }
  return out;
}

// ---- derivatives -------------------------------------------------------------

namespace {

GaussFactor derivative_factor(const GaussFactor& f) {
  // d/dh tau_h f |_0 = -f'(x):
  // -f' = [ w P / (2 sd^2) - P' - 2 pi i c P ] e^{2 pi i c w} E(w).
  GaussFactor out = f;
  Poly a = f.poly.times_monomial(cxd(1.0 / (2.0 * f.sd * f.sd), 0.0));
  Poly b = f.poly.derivative();
  b *= cxd(-1.0, 0.0);
  Poly c = f.poly;
  c *= cxd(0.0, -kTwoPi * f.modulation);
  out.poly = a + b + c;
  return out;
}

}  // namespace

MixtureSystem directional_derivative(const MixtureSystem& f,
                                     std::span<const double> rho,
                                     DerivativeMethod method, double fd_step) {
  if (rho.size() > f.level())
    throw std::invalid_argument(
        "directional_derivative: support exceeds level");
  if (method == DerivativeMethod::closed_form) {
    MixtureSystem out;
    bool any = false;
    for (std::size_t k = 0; k < rho.size(); ++k) {
      if (rho[k] == 0.0) continue;
      any = true;
      for (const auto& t : f.terms) {
        if (!std::holds_alternative<GaussFactor>(t.system.factors[k]))
          throw std::invalid_argument(
              "directional_derivative: closed form needs Gaussian factors");
        MixtureSystem::Term nt = t;
        nt.coefficient *= rho[k];
        nt.system.factors[k] =
            derivative_factor(std::get<GaussFactor>(t.system.factors[k]));
        out.terms.push_back(std::move(nt));
      }
    }
    if (!any) {
      MixtureSystem::Term nt = f.terms.front();
      nt.coefficient = cxd(0.0, 0.0);
      out.terms.push_back(std::move(nt));
    }
    return out;
  }
  // Central differences at steps t and t/2 with Richardson extrapolation:
  // D = (4 D_{t/2} - D_t) / 3.
  double rho_max = 0.0;
  for (double r : rho) rho_max = std::max(rho_max, std::abs(r));
  if (rho_max == 0.0) {
    MixtureSystem out;
    MixtureSystem::Term nt = f.terms.front();
    nt.coefficient = cxd(0.0, 0.0);
    out.terms.push_back(std::move(nt));
    return out;
  }
  const double t = fd_step / rho_max;
  MixtureSystem out;
  const auto add_translates = [&](double step, double weight) {
    std::vector<double> sh(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) sh[i] = step * rho[i];
    MixtureSystem fwd = translate(f, sh);
    for (std::size_t i = 0; i < rho.size(); ++i) sh[i] = -step * rho[i];
    MixtureSystem bwd = translate(f, sh);
    const double c = weight / (2.0 * step);
    for (auto& term : fwd.terms) {
      term.coefficient *= c;
      out.terms.push_back(std::move(term));
    }
    for (auto& term : bwd.terms) {
      term.coefficient *= -c;
      out.terms.push_back(std::move(term));
    }
  };
  add_translates(0.5 * t, 4.0 / 3.0);
  add_translates(t, -1.0 / 3.0);
  return out;
}

// ---- spectral moments ---------------------------------------------------------

namespace {

// Int prod_k xi_k^{p_k} d(fhat . conj(fhat)) over term pairs.
cxd spectral_moment(const MixtureSystem& fhat,
                    std::span<const std::pair<std::size_t, int>> powers) {
  cxd acc(0.0, 0.0);
  for (const auto& ta : fhat.terms) {
    for (const auto& tb : fhat.terms) {
      cxd v = ta.coefficient * std::conj(tb.coefficient) *
              ta.system.tail_mass * tb.system.tail_mass;
      for (std::size_t i = 0; i < fhat.level(); ++i) {
        int p = 0;
        for (const auto& [idx, pw] : powers)
          if (idx == i) p += pw;
        v *= factor_pair_moment(ta.system.factors[i], tb.system.factors[i], p);
      }
      acc += v;
    }
  }
  return acc;
}

}  // namespace

double cross_moment(const MixtureSystem& f, std::size_t i, std::size_t j) {
  if (i < 1 || j < 1 || i > f.level() || j > f.level())
    throw std::invalid_argument("cross_moment: coordinates must be in 1..N");
  const MixtureSystem fhat = fourier(f);
  std::vector<std::pair<std::size_t, int>> powers;
  if (i == j)
    powers.push_back({i - 1, 2});
  else {
    powers.push_back({i - 1, 1});
    powers.push_back({j - 1, 1});
  }
  return spectral_moment(fhat, powers).real();
}

double spectral_second_moment(const MixtureSystem& f, std::size_t k) {
  return cross_moment(f, k, k);
}

FrechetReport frechet_bound_check(const MixtureSystem& f,
                                  std::span<const double> a_weights,
                                  std::span<const double> rho) {
  if (a_weights.size() < f.level())
    throw std::invalid_argument("frechet_bound_check: weights too short");
  for (const auto& t : f.terms)
    if (t.coefficient.imag() != 0.0)
      throw std::invalid_argument("frechet_bound_check: system must be real");

  FrechetReport rep;
  const MixtureSystem df =
      directional_derivative(f, rho, DerivativeMethod::closed_form);
  rep.lhs = hellinger_inner(df, df).real();
  rep.identity_lhs = rep.lhs;

  const double four_pi_sq = 4.0 * M_PI * M_PI;
  double sup = 0.0;
  for (std::size_t n = 1; n <= f.level(); ++n) {
    const double m2 = spectral_second_moment(f, n);
    sup = std::max(sup, m2 / (a_weights[n - 1] * a_weights[n - 1]));
  }
  double rho_norm_sq = 0.0;
  double identity = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    rho_norm_sq += a_weights[k] * a_weights[k] * rho[k] * rho[k];
    if (rho[k] != 0.0)
      identity += rho[k] * rho[k] * spectral_second_moment(f, k + 1);
  }
  rep.rhs = four_pi_sq * sup * rho_norm_sq;
  rep.identity_rhs = four_pi_sq * identity;
  rep.holds = rep.lhs <= rep.rhs * (1.0 + 1e-10) + 1e-12;
  return rep;
}

cxd shift_characteristic(const MixtureSystem& f, std::span<const double> x) {
  return hellinger_inner(translate(f, x), f);
}

MetricResult truncated_metric(std::span<const double> x,
                              std::span<const double> y, std::size_t N) {
  if (x.size() < N || y.size() < N)
    throw std::invalid_argument("truncated_metric: sequences shorter than N");
  MetricResult out;
  std::vector<double> parts(N);
  double w = 1.0;
  for (std::size_t n = 1; n <= N; ++n) {
    w *= 0.5;
    const double d = std::abs(x[n - 1] - y[n - 1]);
    parts[n - 1] = w * d / (1.0 + d);
  }
  out.value = pairwise_sum(parts);
  out.tail_bound = w;
  return out;
}

ConvolutionTheoremReport convolution_theorem_check(
    const ProductSystem& mu_sqrt, const MixtureSystem& f) {
  const MixtureSystem lhs = fourier(convolve(mu_sqrt, f));
  std::vector<GaussCharfn> parts;
  for (const auto& fac : mu_sqrt.factors) {
    const auto* g = std::get_if<GaussFactor>(&fac);
    if (!g || !g->is_plain())
      throw std::invalid_argument(
          "convolution_theorem_check: needs a plain Gaussian measure");
    const double w = g->poly.coef[0].real();
    parts.push_back({g->mean, g->sd * g->sd, cxd(w * w, 0.0)});
  }
  const MixtureSystem rhs = multiply_charfn(fourier(f), parts);
  ConvolutionTheoremReport rep;
  rep.distance = hellinger_distance(lhs, rhs);
  rep.lhs_norm = hellinger_norm(lhs);
  rep.rhs_norm = hellinger_norm(rhs);
  return rep;
}

}  // namespace sqm
