#include "sqm/random_systems.hpp"

namespace sqm {

ProductSystem random_plain_system(Rng& rng, std::size_t level, bool unit_mass) {
  ProductSystem sys;
  for (std::size_t i = 0; i < level; ++i) {
    const double mean = 2.0 * rng.uniform() - 1.0;
    const double sd = 0.4 + 1.2 * rng.uniform();
    const double mass = unit_mass ? 1.0 : 0.2 + 0.8 * rng.uniform();
    sys.factors.push_back(GaussFactor::plain(mean, sd, mass));
  }
  return sys;
}

MixtureSystem random_mixture(Rng& rng, std::size_t level, std::size_t n_terms) {
  MixtureSystem m;
  for (std::size_t t = 0; t < n_terms; ++t) {
    const cxd coeff(2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0);
    m.terms.push_back({coeff, random_plain_system(rng, level, true)});
  }
  return m;
}

}  // namespace sqm
