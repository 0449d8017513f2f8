#include "bpre/prob_kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "bpre/numerics.hpp"

namespace bpre {

namespace {

constexpr double kMaxCount = 0x1.0p63;

// Barrier distances up to this are summed point by point.
constexpr std::int64_t kWindowSumLimit = 16;

void check_success_prob(double s, const char* who) {
  if (!(s > 0.0 && s <= 1.0)) {
    throw std::invalid_argument(std::string(who) + ": success probability must lie in (0,1], got " +
                                std::to_string(s));
  }
}

std::uint64_t to_count(double value) {
  if (!(value < kMaxCount)) throw std::overflow_error("sampled count exceeds 2^63");
  return static_cast<std::uint64_t>(value);
}

}  // namespace

double walk_point_mass(std::int64_t m, std::int64_t y) {
  if (m < 0 || y > m || y < -m || ((m - y) & 1) != 0) return 0.0;
  return numerics::binomial_half_pmf(m, (m - y) / 2);
}

double walk_tail(std::int64_t m, std::int64_t y) {
  if (m < 0) return y <= 0 ? 1.0 : 0.0;
  if (y <= -m) return 1.0;
  if (y > m) return 0.0;
  // S_m = 2U - m with U ~ Bin(m, 1/2).
  const std::int64_t sum = m + y;
  const std::int64_t k = sum / 2 + (sum % 2 != 0 ? 1 : 0);
  return numerics::binomial_half_upper_tail(m, k);
}

double stay_negative_prob(std::int64_t m, std::int64_t x) {
  if (x > 0) throw std::invalid_argument("stay_negative_prob: start must be <= 0");
  if (m <= 0) return 1.0;
  if (x == 0) return 0.5 * stay_negative_prob(m - 1, -1);
  const std::int64_t h = -x;
  if (h > m) return 1.0;
  // Reflection: P(max < h) = 1 - P(S >= h) - P(S > h) = P(-h <= S <= h-1).
  if (h <= kWindowSumLimit) {
    double sum = 0.0;
    for (std::int64_t y = -h; y <= h - 1; ++y) sum += walk_point_mass(m, y);
    return sum;
  }
  return 1.0 - walk_tail(m, h) - walk_tail(m, h + 1);
}

std::uint64_t sample_geometric(double s, RngStream& rng) {
  check_success_prob(s, "sample_geometric");
  const double u = rng.uniform_pos();
  if (s == 1.0) return 0;
  return to_count(std::floor(std::log(u) / std::log1p(-s)));
}

std::uint64_t sample_negative_binomial(std::uint64_t size, double s, RngStream& rng) {
  check_success_prob(s, "sample_negative_binomial");
  if (size == 0 || s == 1.0) return 0;
  if (size <= kNegBinDirectSumThreshold) {
    const double log_fail = std::log1p(-s);
    std::uint64_t total = 0;
    for (std::uint64_t j = 0; j < size; ++j) {
      total += to_count(std::floor(std::log(rng.uniform_pos()) / log_fail));
    }
    return total;
  }
  // Gamma-Poisson mixture: NB(r, s) = Poisson(Gamma(r, 1) (1-s)/s).
  const double rate = sample_gamma(static_cast<double>(size), rng);
  return sample_poisson(rate * ((1.0 - s) / s), rng);
}

double sample_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost to shape + 1 and rescale by U^(1/shape).
    const double boosted = sample_gamma(shape + 1.0, rng);
    return boosted * std::pow(rng.uniform_pos(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = rng.normal();
    const double cx = c * x;
    if (cx <= -1.0) continue;
    // w = (1 + cx)^3 - 1, kept separate so the log test survives huge d.
    const double w = cx * (3.0 + cx * (3.0 + cx));
    const double u = rng.uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * (1.0 + w);
    // log u < x^2/2 + d (1 - v + log v)
    if (std::log(u) < 0.5 * x2 + d * numerics::log1pmx(w)) return d * (1.0 + w);
  }
}

std::uint64_t sample_poisson(double mean, RngStream& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("sample_poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    const double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf && k < 1000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  if (mean > kPoissonNormalThreshold) {
    return to_count(std::nearbyint(mean + std::sqrt(mean) * rng.normal()));
  }
  // PTRS, Hormann (1993) "The transformed rejection method for generating
  // Poisson random variables". The exact log pmf uses the saddle-point
  // form so the acceptance test stays accurate for large means.
  const double slam = std::sqrt(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform_pos();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return to_count(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <= numerics::log_poisson_pmf(k, mean)) {
      return to_count(k);
    }
  }
}

}  // namespace bpre
