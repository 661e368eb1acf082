#ifndef SQM_RANDOM_SYSTEMS_HPP
#define SQM_RANDOM_SYSTEMS_HPP

#include "sqm/numeric.hpp"
#include "sqm/sqrt_calculus.hpp"

namespace sqm {

/// Plain Gaussian product system with random means/sds; unit factor masses
/// when unit_mass is set, masses in (0,1] otherwise.
ProductSystem random_plain_system(Rng& rng, std::size_t level,
                                  bool unit_mass = true);

/// Random mixture of plain Gaussian systems with complex coefficients.
MixtureSystem random_mixture(Rng& rng, std::size_t level, std::size_t n_terms);

}  // namespace sqm

#endif  // SQM_RANDOM_SYSTEMS_HPP
