#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bpre/numerics.hpp"
#include "bpre/rng.hpp"
#include "bpre/stats.hpp"

using namespace bpre;

TEST(HalfBridge, Values) {
  EXPECT_EQ(half_bridge_cdf(0.3, 0.0), 0.0);
  EXPECT_NEAR(half_bridge_cdf(0.5, 0.5 * 0.6744897501960817), 0.5, 1e-12);
  EXPECT_NEAR(half_bridge_cdf(0.5, 3.0), 1.0 - 2.0 * 0.5 * std::erfc(6.0 / std::sqrt(2.0)), 1e-15);
  // x = 3 is six standard deviations of |B_{1/2}|: the gap to 1 is 2(1 - Phi(6)).
  EXPECT_NEAR(1.0 - half_bridge_cdf(0.5, 3.0), 1.973175290e-9, 1e-17);
  EXPECT_THROW(half_bridge_cdf(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(half_bridge_cdf(1.0, 1.0), std::invalid_argument);
}

TEST(HalfBridge, IsCdfOnGrid) {
  for (double t : {0.1, 0.5, 0.9}) {
    double prev = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double f = half_bridge_cdf(t, i * 0.005);
      ASSERT_GE(f, prev);
      prev = f;
    }
    EXPECT_NEAR(prev, 1.0, 1e-12);
  }
}

TEST(KsStatistic, HandComputed) {
  const auto phi = [](double x) { return numerics::normal_cdf(x); };
  const std::vector<double> two{-1.0, 1.0};
  EXPECT_NEAR(ks_statistic(two, phi), 0.5 - numerics::normal_cdf(-1.0), 1e-15);
  const std::vector<double> zeros(7, 0.0);
  EXPECT_DOUBLE_EQ(ks_statistic(zeros, [](double x) { return half_bridge_cdf(0.5, x); }), 1.0);
  const std::vector<double> three{0.2, 0.5, 0.9};
  const auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  // Candidates: 0.2, 1/3-0.2, 0.5-1/3, 2/3-0.5, 0.9-2/3, 1-0.9.
  EXPECT_NEAR(ks_statistic(three, uniform), 0.9 - 2.0 / 3.0, 1e-15);
  EXPECT_THROW(ks_statistic(std::vector<double>{}, uniform), std::invalid_argument);
}

TEST(KsStatistic, PermutationInvariant) {
  RngStream rng(41, 0);
  std::vector<double> v(200);
  for (auto& x : v) x = rng.normal();
  const auto phi = [](double x) { return numerics::normal_cdf(x); };
  const double base = ks_statistic(v, phi);
  std::mt19937_64 shuffler(3);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(v.begin(), v.end(), shuffler);
    ASSERT_EQ(ks_statistic(v, phi), base);
  }
}

TEST(KsStatistic, SelfTestRejectsRarely) {
  const int trials = 200;
  const int n = 10000;
  int rejections = 0;
  for (int trial = 0; trial < trials; ++trial) {
    RngStream rng(42, trial);
    std::vector<double> sample(n);
    // |B_t| = sqrt(t(1-t)) |N(0,1)|
    for (auto& x : sample) x = std::sqrt(0.25) * std::abs(rng.normal());
    const double d = ks_statistic(sample, [](double x) { return half_bridge_cdf(0.5, x); });
    rejections += d >= 1.63 / std::sqrt(static_cast<double>(n));
  }
  EXPECT_LE(rejections, 8);
}

TEST(ChiSquare, GoodnessOfFitPoolsSmallBins) {
  const std::vector<double> observed{50, 30, 15, 3, 1, 1};
  const std::vector<double> probs{0.5, 0.3, 0.15, 0.03, 0.01, 0.01};
  const ChiSquareResult r = chi_square_goodness_of_fit(observed, probs);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
  EXPECT_EQ(r.bins, 4u);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(ChiSquare, TwoSampleDetectsShift) {
  RngStream rng(43, 0);
  std::map<std::int64_t, std::uint64_t> a, b;
  std::poisson_distribution<int> p3(3.0), p4(4.0);
  std::mt19937_64 gen(1);
  for (int i = 0; i < 20000; ++i) {
    ++a[p3(gen)];
    ++b[p4(gen)];
  }
  EXPECT_LT(chi_square_two_sample(a, b).p_value, 1e-6);
}

TEST(TailSlope, ExactPowerLaw) {
  std::vector<double> hist(101, 0.0);
  for (int k = 1; k <= 100; ++k) hist[k] = 1e6 * std::pow(k, -1.5);
  const TailSlope s = tau_tail_slope(hist, 2, 50);
  EXPECT_NEAR(s.slope, -1.5, 1e-6);
  EXPECT_EQ(s.bins_used, 49u);
  EXPECT_NEAR(s.standard_error, 0.0, 1e-6);
}

TEST(TailSlope, GeometricNegativeControl) {
  std::vector<double> hist(60, 0.0);
  for (int k = 1; k < 60; ++k) hist[k] = 1e18 * std::pow(0.5, k);
  const TailSlope s = tau_tail_slope(hist, 2, 50);
  EXPECT_LT(s.slope, -5.0);
  // Curvature: the slope depends on the fitting window.
  const TailSlope lower = tau_tail_slope(hist, 2, 25);
  const TailSlope upper = tau_tail_slope(hist, 25, 50);
  EXPECT_GT(std::abs(upper.slope - lower.slope), 1.0);
}

TEST(TailSlope, TooFewBins) {
  std::vector<double> hist(30, 0.0);
  for (int k = 2; k < 12; ++k) hist[k] = 5.0;
  EXPECT_THROW(tau_tail_slope(hist, 2, 50), std::invalid_argument);
}

TEST(Stats, TimeIndex) {
  EXPECT_EQ(time_index(5000, 0.5), 2500u);
  EXPECT_EQ(time_index(10, 0.3), 3u);
  EXPECT_EQ(time_index(1000, 0.01), 10u);
  EXPECT_NEAR(walk_scale(400), 20.0, 1e-15);
}

TEST(Stats, Median) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(SurvivalConditionedWalk, SmallHorizonMatchesReweighting) {
  // Enumerate n = 4: weight of a path is 1 / sum_j e^{S_n - S_j}.
  const std::size_t n = 4;
  std::vector<double> weights(16);
  double total = 0.0;
  for (std::uint32_t code = 0; code < 16; ++code) {
    std::vector<double> s{0.0};
    for (std::size_t k = 0; k < n; ++k) s.push_back(s.back() + ((code >> k) & 1u ? 1.0 : -1.0));
    double sum = 0.0;
    for (double sj : s) sum += std::exp(s.back() - sj);
    weights[code] = 1.0 / sum;
    total += weights[code];
  }
  for (auto& w : weights) w /= total;
  RngStream rng(44, 0);
  std::vector<double> counts(16, 0.0);
  for (int i = 0; i < 100000; ++i) {
    const auto r = sample_survival_conditioned_walk(n, rng);
    std::uint32_t code = 0;
    for (std::size_t k = 1; k <= n; ++k) code |= (r.path.increment(k) > 0 ? 1u : 0u) << (k - 1);
    counts[code] += 1.0;
  }
  EXPECT_GT(chi_square_goodness_of_fit(counts, weights).p_value, 0.01);
}
