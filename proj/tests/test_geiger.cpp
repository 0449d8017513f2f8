#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "bpre/conditional_walk.hpp"
#include "bpre/geiger.hpp"
#include "bpre/rng.hpp"
#include "bpre/stats.hpp"

using namespace bpre;

namespace {

GeometricEnvironment env_of(std::vector<std::int64_t> positions) {
  return build_environment(WalkPath::from_positions(std::move(positions)));
}

}  // namespace

TEST(Mass, ExactAndLogModes) {
  const Mass m = Mass::exact(12);
  EXPECT_TRUE(m.is_exact());
  EXPECT_EQ(m.count(), 12u);
  EXPECT_TRUE(Mass{}.is_zero());
  const Mass big = Mass::from_log(60.0);
  EXPECT_FALSE(big.is_exact());
  EXPECT_THROW((void)big.count(), std::logic_error);
  EXPECT_NEAR(big.log_value(), 60.0, 1e-15);
  const Mass summed = add_count(Mass::exact(kExactMassLimit - 1), 5);
  EXPECT_FALSE(summed.is_exact());
}

TEST(Geiger, BareSpine) {
  const GeometricEnvironment env = env_of({0, -1, -2});
  GeigerState s;
  EXPECT_DOUBLE_EQ(s.total(), 1.0);
  EXPECT_EQ(s.log_total(), 0.0);
  // Zero masses stay zero and the only additions are R and L.
  RngStream rng(31, 0);
  const Mass zero;
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(evolve_mass(zero, 0.3, rng).is_zero());
}

TEST(Geiger, ConditionedMassVanishesAtHorizon) {
  RngStream rng(32, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const ReplicateRecord r = sample_conditioned_bpre(sample_conditioned_min_at_end(50, rng), rng);
    ASSERT_EQ(r.conditioned_mass_at_horizon, 0.0);
    for (double z : r.z) ASSERT_GE(z, 1.0);
  }
}

TEST(Geiger, LitterIsZeroWhenRhoIsOne) {
  const GeometricEnvironment env = env_of({0, 1, 0});
  RngStream rng(33, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_rl_pair(env, 2, rng).l, 0u);
  EXPECT_THROW(sample_rl_pair(env, 0, rng), std::out_of_range);
}

TEST(Geiger, HorizonOneLaw) {
  // Z_1 = 1 + R with R ~ Geom(p_1): compare with the exact law.
  const GeometricEnvironment env = env_of({0, 1});
  const double p = env.success(1);
  RngStream rng(34, 0);
  const int draws = 100000;
  std::vector<double> observed(30, 0.0);
  std::vector<double> probs(30, 0.0);
  for (int i = 0; i < draws; ++i) {
    const ReplicateRecord r = sample_conditioned_bpre(WalkPath::from_positions({0, 1}), rng);
    ASSERT_GE(r.z[1], 1.0);
    ++observed[std::min<std::size_t>(static_cast<std::size_t>(r.z[1]) - 1, 29)];
  }
  double rest = 1.0;
  for (int k = 0; k < 29; ++k) {
    probs[k] = p * std::pow(1.0 - p, k);
    rest -= probs[k];
  }
  probs[29] = rest;
  EXPECT_GT(chi_square_goodness_of_fit(observed, probs).p_value, 0.01);
}

TEST(Geiger, HorizonOneMatchesPositiveGeometric) {
  // Survival-conditioned Z_1 under the plain process is Geom(p) given > 0.
  const GeometricEnvironment env = env_of({0, -1});
  RngStream rng(35, 0);
  const auto oracle = rejection_oracle_bpre(env, 50000, rng);
  std::map<std::int64_t, std::uint64_t> a, b;
  for (const auto& z : oracle.trajectories) ++a[static_cast<std::int64_t>(z[1])];
  for (int i = 0; i < 50000; ++i) {
    const ReplicateRecord r = sample_conditioned_bpre(WalkPath::from_positions({0, -1}), rng);
    ++b[static_cast<std::int64_t>(r.z[1])];
  }
  EXPECT_GT(chi_square_two_sample(a, b).p_value, 0.01);
}

TEST(Geiger, MatchesRejectionOracleAtHorizonSix) {
  const GeometricEnvironment env = env_of({0, 1, 0, -1, 0, -1, -2});
  const WalkPath path = WalkPath::from_positions({0, 1, 0, -1, 0, -1, -2});
  RngStream a(36, 0), b(36, 1);
  const std::uint64_t draws = 100000;
  const auto oracle = rejection_oracle_bpre(env, draws, a);
  EXPECT_NEAR(static_cast<double>(oracle.accepted) / static_cast<double>(oracle.trials),
              survival_prob(env, 0),
              3.0 * std::sqrt(survival_prob(env, 0) / static_cast<double>(oracle.trials)));
  std::map<std::int64_t, std::uint64_t> z6_oracle, z6_spine, z3_oracle, z3_spine;
  std::vector<double> oracle_hist(51, 0.0), spine_hist(51, 0.0);
  for (const auto& z : oracle.trajectories) {
    ++z3_oracle[static_cast<std::int64_t>(z[3])];
    ++z6_oracle[static_cast<std::int64_t>(z[6])];
    if (z[6] <= 50) oracle_hist[z[6]] += 1.0 / draws;
  }
  for (std::uint64_t i = 0; i < draws; ++i) {
    const ReplicateRecord r = sample_conditioned_bpre(path, b);
    ++z3_spine[static_cast<std::int64_t>(r.z[3])];
    ++z6_spine[static_cast<std::int64_t>(r.z[6])];
    if (r.z[6] <= 50) spine_hist[static_cast<std::size_t>(r.z[6])] += 1.0 / draws;
  }
  EXPECT_GT(chi_square_two_sample(z3_oracle, z3_spine).p_value, 0.01);
  EXPECT_GT(chi_square_two_sample(z6_oracle, z6_spine).p_value, 0.01);
  double tv = 0.0;
  for (int k = 1; k <= 50; ++k) tv += std::abs(oracle_hist[k] - spine_hist[k]);
  EXPECT_LT(0.5 * tv, 0.02);
}

TEST(Geiger, UnconditionedMeanIsExpOfLevel) {
  const GeometricEnvironment env = env_of({0, 1, 0, 1, 2, 1, 0, -1, 0});
  RngStream rng(37, 0);
  const int runs = 1000000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    const double z = static_cast<double>(simulate_unconditioned(env, rng).back());
    sum += z;
    sum2 += z * z;
  }
  const double mean = sum / runs;
  const double se = std::sqrt((sum2 / runs - mean * mean) / runs);
  EXPECT_NEAR(mean, std::exp(env.level(8)), 3.0 * se);
}

TEST(Geiger, RLProductFormIsNormalized) {
  double total = 0.0;
  for (std::uint64_t r = 0; r <= 200; ++r) {
    for (std::uint64_t l = 0; l <= 200; ++l) total += rl_product_pmf(0.5, 0.3, r, l);
  }
  EXPECT_GE(total, 1.0 - 1e-9);
  EXPECT_LE(total, 1.0 + 1e-12);
}

TEST(Geiger, LargePopulationsSwitchToLogScale) {
  // A long upward environment drives the population past the exact limit.
  std::vector<std::int64_t> pos(121);
  for (int k = 0; k <= 120; ++k) pos[k] = k <= 60 ? k : 120 - k;
  RngStream rng(38, 0);
  const ReplicateRecord r = sample_conditioned_bpre(WalkPath::from_positions(pos), rng);
  EXPECT_GT(r.log_z[60], std::log(static_cast<double>(kExactMassLimit)));
  for (std::size_t k = 0; k <= 120; ++k) {
    ASSERT_TRUE(std::isfinite(r.log_z[k]));
    ASSERT_GE(r.z[k], 1.0);
  }
  // log Z tracks the level to within a few units on this path.
  EXPECT_NEAR(r.log_z[60] - 60.0, 0.0, 8.0);
}
