#ifndef BPRE_PROB_KERNEL_HPP
#define BPRE_PROB_KERNEL_HPP

// Exact probabilities for the simple +-1 random walk and the discrete
// samplers used throughout the library.
//
// Geometric convention: a geometric(s) variate counts failures before the
// first success, P(k) = s (1-s)^k on k = 0, 1, 2, ...  Negative binomial
// variates are sums of such counts.

#include <cstdint>

#include "bpre/rng.hpp"

namespace bpre {

/// P(S_m = y) for the simple symmetric walk started at 0.
double walk_point_mass(std::int64_t m, std::int64_t y);

/// P(S_m >= y).
double walk_tail(std::int64_t m, std::int64_t y);

/// P(x + S_j < 0 for j = 1..m), the probability that a walk started at
/// x <= 0 stays strictly negative for m steps. Level 0 is reduced to level
/// -1 by conditioning on the first step, since the reflection identity only
/// holds for barrier distance >= 1. Throws std::invalid_argument for x > 0.
double stay_negative_prob(std::int64_t m, std::int64_t x);

/// Signature shared by stay_negative_prob and test doubles of it.
using StayNegativeFn = double (*)(std::int64_t, std::int64_t);

/// Sizes at or below this are summed geometric by geometric.
inline constexpr std::uint64_t kNegBinDirectSumThreshold = 16;

/// Poisson means above this are drawn from a rounded normal; a count that
/// large is no longer exactly representable in a double anyway.
inline constexpr double kPoissonNormalThreshold = 0x1.0p52;

std::uint64_t sample_geometric(double s, RngStream& rng);

std::uint64_t sample_negative_binomial(std::uint64_t size, double s, RngStream& rng);

/// Gamma(shape, 1) by Marsaglia-Tsang, shape > 0.
double sample_gamma(double shape, RngStream& rng);

/// Poisson(mean): inversion below 10, Hormann's PTRS above.
std::uint64_t sample_poisson(double mean, RngStream& rng);

}  // namespace bpre

#endif  // BPRE_PROB_KERNEL_HPP
