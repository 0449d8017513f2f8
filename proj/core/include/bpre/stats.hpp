#ifndef BPRE_STATS_HPP
#define BPRE_STATS_HPP

// Reference limit laws and the tests that confront an ensemble of
// conditioned replicates with them.
//
// The conditioned walk rescaled by sigma sqrt(n) approaches Brownian motion
// conditioned to take its minimum at time 1. Its marginals have no
// elementary closed form, so they are checked through the reflected path:
// reflecting Brownian motion at its running minimum gives |B| (Levy), and
// the end-minimum conditioning turns B into a bridge. log Z_{nt} / sqrt(n)
// and S^r_{nt} / sqrt(n) are both compared with |B_t|, B_t ~ N(0, t(1-t)).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bpre/geiger.hpp"
#include "bpre/rng.hpp"

namespace bpre {

/// sigma^2 = E[X^2] for the +-1 walk.
inline constexpr double kWalkSigma = 1.0;

/// a_n = sigma sqrt(n) (finite variance, alpha = 2).
inline double walk_scale(std::size_t n) { return kWalkSigma * std::sqrt(static_cast<double>(n)); }

/// floor(n t), robust to t*n landing a hair below an integer.
std::size_t time_index(std::size_t n, double t);

/// P(|B_t| <= x) for a standard Brownian bridge. Throws unless 0 < t < 1.
double half_bridge_cdf(double t, double x);

/// sup_x |F_N(x) - F(x)|. Throws std::invalid_argument on an empty sample.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);

struct ChiSquareResult {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
  std::size_t bins = 0;
};

/// Goodness of fit of `observed` counts against category probabilities.
/// Adjacent categories are pooled until each expected count reaches
/// `min_expected`.
ChiSquareResult chi_square_goodness_of_fit(std::span<const double> observed,
                                           std::span<const double> probabilities,
                                           double min_expected = 5.0);

/// Two-sample test of equal laws for integer-valued samples given as
/// value -> count maps, with unequal sample sizes allowed. Adjacent values
/// are pooled until each pooled bin holds at least `min_bin_count`.
ChiSquareResult chi_square_two_sample(const std::map<std::int64_t, std::uint64_t>& a,
                                      const std::map<std::int64_t, std::uint64_t>& b,
                                      double min_bin_count = 10.0);

struct TailSlope {
  double slope = 0.0;
  double standard_error = 0.0;
  double intercept = 0.0;
  std::size_t bins_used = 0;
};

inline constexpr std::size_t kMinTailBins = 20;

/// Least-squares slope of log frequency against log k over the occupied
/// bins k_min <= k <= k_max of `histogram` (index = k). Throws
/// std::invalid_argument with fewer than kMinTailBins occupied bins.
TailSlope tau_tail_slope(std::span<const double> histogram, std::size_t k_min, std::size_t k_max);

/// Projection of one replicate onto the statistics the ensemble reports.
struct ReplicateDigest {
  std::uint64_t stream_id = 0;
  std::size_t n = 0;
  std::vector<double> times;
  std::vector<std::size_t> indices;      ///< floor(n t)
  std::vector<double> log_z;             ///< log Z at indices
  std::vector<double> reflected;         ///< S^r at indices
  std::vector<double> log_ratio;         ///< log V at indices
  std::vector<std::size_t> last_ladder;  ///< tau_{nt}: last ladder epoch <= index, or 0
  std::vector<double> ladder_z;          ///< U = Z at tau_{nt}
  double max_gap = 0.0;                  ///< max_k |log Z_k - S^r_k| / sqrt(n)
  std::size_t ladder_count = 0;
  /// n minus the ladder epoch preceding n (0 if none).
  std::size_t final_excursion_length = 0;
};

ReplicateDigest digest_replicate(const ReplicateRecord& record, std::span<const double> times);

struct MarginalKsReport {
  double t = 0.0;
  std::size_t index = 0;
  std::size_t samples = 0;
  double ks_log_z = 0.0;
  double p_log_z = 0.0;
  double ks_reflected = 0.0;
  double p_reflected = 0.0;
};

inline constexpr std::size_t kMinTimeIndex = 10;

/// KS statistics of log Z_{nt}/sqrt(n) and S^r_{nt}/sqrt(n) against |B_t|.
/// Throws std::invalid_argument if t is not among the digest times or
/// floor(n t) < kMinTimeIndex.
MarginalKsReport marginal_law_test(std::span<const ReplicateDigest> digests, double t);

double median(std::vector<double> values);

struct CorrelationEstimate {
  std::size_t pairs = 0;
  double correlation = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ExcursionDiagnostics {
  std::vector<double> times;
  /// U samples per time.
  std::vector<std::vector<double>> ladder_z;
  /// Pooled over all time pairs: (log V_a, log V_b) in one excursion vs in different ones.
  CorrelationEstimate within;
  CorrelationEstimate across;
  /// Law of U at two times, restricted to replicates where they fall in different excursions.
  double u_test_t_a = 0.0;
  double u_test_t_b = 0.0;
  std::size_t u_test_samples = 0;
  ChiSquareResult u_test;
};

/// Bootstrap intervals are 95% percentile intervals over `bootstrap_rounds`
/// resamples drawn from `rng`. The U-law comparison uses times 0.3 and 0.7
/// when present, else the first and last time.
ExcursionDiagnostics excursion_diagnostics(std::span<const ReplicateDigest> digests,
                                           RngStream& rng, std::size_t bootstrap_rounds = 200);

/// Walk path drawn from the original (untilted) law of the +-1 model,
/// conditioned on survival of the branching process to n. Under that law
/// P(path) = gamma^n 2^{-n} e^{-S_n}, and with geometric offspring
/// P(Z_n > 0 | path) = 1 / sum_j e^{-S_j}, so the conditioned law is the
/// symmetric walk reweighted by 1 / sum_{j<=n} e^{S_n - S_j} <= 1, which is
/// sampled exactly by rejection.
struct SurvivalConditionedWalk {
  WalkPath path;
  std::uint64_t trials = 0;
};

SurvivalConditionedWalk sample_survival_conditioned_walk(std::size_t n, RngStream& rng);

}  // namespace bpre

#endif  // BPRE_STATS_HPP
