#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "bpre/conditional_walk.hpp"
#include "bpre/rng.hpp"

using namespace bpre;

namespace {

WalkPath path_of(std::vector<std::int64_t> positions) {
  return WalkPath::from_positions(std::move(positions));
}

WalkPath random_walk(std::size_t n, RngStream& rng) {
  std::vector<int> steps(n);
  for (auto& s : steps) s = rng.bernoulli_half() ? 1 : -1;
  return WalkPath::from_increments(steps);
}

}  // namespace

TEST(WalkPath, Validation) {
  EXPECT_THROW(path_of({1, 0}), std::invalid_argument);
  EXPECT_THROW(path_of({0, 2}), std::invalid_argument);
  const WalkPath p = path_of({0, 1, 0, -1});
  EXPECT_EQ(p.length(), 3u);
  EXPECT_EQ(p.increment(1), 1);
  EXPECT_EQ(p.running_max(), 1);
}

TEST(ConditionedWalk, HorizonTwoIsDeterministic) {
  RngStream rng(5, 0);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(sample_conditioned_below_zero(2, rng), path_of({0, -1, -2}));
  }
}

TEST(ConditionedWalk, HorizonThreeIsFair) {
  RngStream rng(6, 0);
  const int draws = 40000;
  int high = 0;
  for (int i = 0; i < draws; ++i) {
    const WalkPath p = sample_conditioned_below_zero(3, rng);
    ASSERT_TRUE(p == path_of({0, -1, -2, -1}) || p == path_of({0, -1, -2, -3}));
    high += p[3] == -1;
  }
  EXPECT_NEAR(static_cast<double>(high) / draws, 0.5, 3.0 * 0.5 / std::sqrt(draws));
  EXPECT_NEAR(conditioned_up_probability(3, 3, -2), 0.5, 1e-15);
}

TEST(ConditionedWalk, StaysNegative) {
  RngStream rng(8, 0);
  for (std::size_t n : {1u, 5u, 100u, 5000u}) {
    const WalkPath p = sample_conditioned_below_zero(n, rng);
    EXPECT_LT(p.running_max(), 0) << n;
    const WalkPath d = dualize(p);
    for (std::size_t k = 0; k < n; ++k) ASSERT_GT(d[k], d[n]);
  }
}

TEST(Dualize, Examples) {
  EXPECT_EQ(dualize(path_of({0, -1, -2})), path_of({0, -1, -2}));
  const WalkPath d = dualize(path_of({0, -1, -2, -1}));
  EXPECT_EQ(d, path_of({0, 1, 0, -1}));
  EXPECT_LT(d[3], std::min({d[0], d[1], d[2]}));
}

TEST(Dualize, Involution) {
  RngStream rng(9, 0);
  for (int i = 0; i < 1000; ++i) {
    const WalkPath p = random_walk(1 + i % 40, rng);
    ASSERT_EQ(dualize(dualize(p)), p);
  }
}

TEST(Decompose, Examples) {
  PathDecomposition a = decompose(path_of({0, -1, -2}));
  EXPECT_EQ(a.reflected, (std::vector<std::int64_t>{0, 0, 0}));
  EXPECT_EQ(a.ladder_epochs, (std::vector<std::size_t>{1, 2}));
  PathDecomposition b = decompose(path_of({0, 1, 0, -1}));
  EXPECT_EQ(b.reflected, (std::vector<std::int64_t>{0, 1, 0, 0}));
  EXPECT_EQ(b.ladder_epochs, (std::vector<std::size_t>{3}));
}

TEST(Decompose, ReflectedIsNonNegative) {
  RngStream rng(10, 0);
  for (int i = 0; i < 1000; ++i) {
    const WalkPath p = random_walk(60, rng);
    const PathDecomposition d = decompose(p);
    std::int64_t running_min = 0;
    for (std::size_t k = 0; k <= p.length(); ++k) {
      running_min = std::min(running_min, p[k]);
      ASSERT_GE(d.reflected[k], 0);
      ASSERT_EQ(d.reflected[k], p[k] - running_min);
    }
  }
}

TEST(FirstMinimumEpoch, Examples) {
  EXPECT_EQ(first_minimum_epoch(path_of({0, -1, -2})), 2u);
  EXPECT_EQ(first_minimum_epoch(path_of({0, 1, 0, -1})), 3u);
  EXPECT_EQ(first_minimum_epoch(path_of({0, -1, 0, -1})), 1u);
}

TEST(PathCodec, RoundTrip) {
  RngStream rng(12, 0);
  for (int i = 0; i < 200; ++i) {
    const WalkPath p = random_walk(1 + i % 32, rng);
    ASSERT_EQ(decode_path(encode_path(p), p.length()), p);
  }
}

TEST(RejectionOracle, HorizonTwo) {
  RngStream rng(13, 0);
  const auto r = rejection_oracle_walk(2, 1000, rng);
  ASSERT_EQ(r.counts.size(), 1u);
  EXPECT_EQ(decode_path(r.counts.begin()->first, 2), path_of({0, -1, -2}));
}

TEST(RejectionOracle, AcceptanceRateAtFour) {
  RngStream rng(14, 0);
  const auto r = rejection_oracle_walk(4, 18750, rng);
  const double trials = static_cast<double>(r.trials);
  const double rate = static_cast<double>(r.accepted) / trials;
  const double p = 3.0 / 16.0;
  EXPECT_NEAR(rate, p, 3.0 * std::sqrt(p * (1.0 - p) / trials));
}

TEST(RejectionOracle, TotalVariationAgainstSampler) {
  RngStream a(15, 0), b(15, 1);
  const std::uint64_t draws = 100000;
  const auto oracle = rejection_oracle_walk(10, draws, a);
  std::map<std::uint32_t, double> diff;
  for (const auto& [code, c] : oracle.counts) diff[code] += static_cast<double>(c) / draws;
  for (std::uint64_t i = 0; i < draws; ++i) {
    diff[encode_path(sample_conditioned_below_zero(10, b))] -= 1.0 / draws;
  }
  double tv = 0.0;
  for (const auto& [code, d] : diff) tv += std::abs(d);
  EXPECT_LT(0.5 * tv, 0.02);
}
