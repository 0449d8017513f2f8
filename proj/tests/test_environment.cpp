#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bpre/conditional_walk.hpp"
#include "bpre/environment.hpp"
#include "bpre/geiger.hpp"
#include "bpre/rng.hpp"

using namespace bpre;

namespace {

GeometricEnvironment env_of(std::vector<std::int64_t> positions) {
  return build_environment(WalkPath::from_positions(std::move(positions)));
}

// 1 / sum_j e^{-(S_j - S_i)}, summed directly.
double direct_survival(const std::vector<double>& levels, std::size_t i) {
  long double sum = 0.0L;
  for (std::size_t j = i; j < levels.size(); ++j) sum += std::exp(static_cast<long double>(levels[i] - levels[j]));
  return static_cast<double>(1.0L / sum);
}

}  // namespace

TEST(Environment, SuccessProbabilities) {
  const GeometricEnvironment down = env_of({0, -1});
  EXPECT_NEAR(down.success(1), 0.7310585786300049, 1e-15);
  const GeometricEnvironment up = env_of({0, 1});
  EXPECT_NEAR(up.success(1), 0.2689414213699951, 1e-15);
  EXPECT_DOUBLE_EQ(up.success(1) + up.failure(1), 1.0);
}

TEST(Environment, RejectsBadInput) {
  EXPECT_THROW(GeometricEnvironment::from_increments(std::vector<double>{}), std::invalid_argument);
  const std::vector<double> bad{1.0, NAN};
  EXPECT_THROW(GeometricEnvironment::from_increments(bad), std::invalid_argument);
}

TEST(SurvivalProb, HandValues) {
  const GeometricEnvironment env = env_of({0, -1, -2});
  const double e = std::exp(1.0);
  EXPECT_NEAR(1.0 / survival_prob(env, 1), 1.0 + e, 1e-13);
  EXPECT_NEAR(1.0 / survival_prob(env, 0), 1.0 + e + e * e, 1e-12);
  EXPECT_DOUBLE_EQ(survival_prob(env, 2), 1.0);
  EXPECT_THROW(survival_prob(env, 3), std::out_of_range);

  const GeometricEnvironment one = env_of({0, -1});
  EXPECT_NEAR(survival_prob(one, 0), 0.2689414213699951, 1e-15);
  EXPECT_NEAR(survival_prob(one, 0), 1.0 - one.success(1), 1e-15);
}

TEST(SurvivalProb, MatchesDirectSumOnRealEnvironments) {
  RngStream rng(21, 0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> x(1 + rep * 4);
    for (auto& v : x) v = 3.0 * rng.normal() - 0.2;
    const auto env = GeometricEnvironment::from_increments(x);
    for (std::size_t i = 0; i <= env.horizon(); ++i) {
      const double direct = direct_survival(env.levels(), i);
      ASSERT_NEAR(survival_prob(env, i), direct, 1e-12 * direct + 1e-300);
    }
  }
}

TEST(SurvivalProb, MonteCarloFixedEnvironment) {
  const GeometricEnvironment env = env_of({0, -1, -2, -1, -2});
  RngStream rng(22, 0);
  const int runs = 1000000;
  int alive = 0;
  for (int r = 0; r < runs; ++r) alive += simulate_unconditioned(env, rng).back() > 0;
  const double rho = survival_prob(env, 0);
  EXPECT_NEAR(static_cast<double>(alive) / runs, rho, 3.0 * std::sqrt(rho * (1 - rho) / runs));
}

TEST(Eta, ClosedForm) {
  EXPECT_DOUBLE_EQ(geometric_eta(0.5), 3.0);
  const double p = 1.0 / (1.0 + std::exp(1.0));
  EXPECT_NEAR(geometric_eta(p), (2.0 - p) / (1.0 - p), 1e-15);
  EXPECT_NEAR(geometric_eta(p), 2.368, 5e-4);
  EXPECT_THROW(geometric_eta(1.0), std::invalid_argument);
}

TEST(Eta, TruncatedSeries) {
  const double p = 0.7, q = 0.3;
  long double second = 0.0L, first = 0.0L, w = p;
  for (int y = 1; y <= 1000000 && w > 0.0L; ++y) {
    w *= q;
    second += static_cast<long double>(y) * y * w;
    first += static_cast<long double>(y) * w;
  }
  const double series = static_cast<double>(second / (first * first));
  EXPECT_NEAR(geometric_eta(p), series, 1e-8);
}

TEST(SurvivalLowerBound, HorizonOne) {
  for (int x : {-1, 1}) {
    const GeometricEnvironment env = env_of({0, x});
    const double expected = 1.0 / (std::exp(-static_cast<double>(x)) + eta(env, 1));
    EXPECT_NEAR(survival_lower_bound(env), expected, 1e-14);
    EXPECT_LE(survival_lower_bound(env), survival_prob(env, 0));
  }
}

TEST(SurvivalLowerBound, MonotonePath) {
  std::vector<std::int64_t> pos(21);
  for (int k = 0; k <= 20; ++k) pos[k] = -k;
  const GeometricEnvironment env = env_of(pos);
  EXPECT_LE(survival_lower_bound(env), survival_prob(env, 0));
  EXPECT_GT(survival_lower_bound(env), 0.0);
}

TEST(SurvivalLowerBound, RangeOnConditionedPaths) {
  RngStream rng(23, 0);
  for (int rep = 0; rep < 1000; ++rep) {
    const GeometricEnvironment env = build_environment(sample_conditioned_min_at_end(1000, rng));
    const double b = survival_lower_bound(env);
    ASSERT_GT(b, 0.0);
    ASSERT_LE(b, 1.0);
    ASSERT_LE(b, survival_prob(env, 0));
  }
}

TEST(Environment, ConditionedSuccessIsOneAtHorizon) {
  const GeometricEnvironment env = env_of({0, 1, 2, 1, 0});
  EXPECT_EQ(env.extinction_conditioned_success(4), 1.0);
  for (std::size_t i = 1; i < 4; ++i) {
    const double s = env.extinction_conditioned_success(i);
    const double p = env.success(i);
    EXPECT_NEAR(s, p + (1.0 - p) * survival_prob(env, i), 1e-14);
  }
}
