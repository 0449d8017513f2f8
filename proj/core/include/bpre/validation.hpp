#ifndef BPRE_VALIDATION_HPP
#define BPRE_VALIDATION_HPP

// Oracle checks at pinned sizes: exhaustive enumeration of walks, rejection
// oracles for the conditioned walk and the conditioned branching process,
// closed-form pmf identities, and Monte Carlo checks of survival
// probabilities, the mean martingale and the survival lower bound.

#include <cstdint>
#include <string>
#include <vector>

#include "bpre/prob_kernel.hpp"

namespace bpre {

struct CheckResult {
  std::string name;
  std::string description;
  double statistic = 0.0;
  double threshold = 0.0;
  /// "<=" or ">=": the check passes iff `statistic relation threshold`.
  std::string relation = "<=";
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  std::uint64_t master_seed = 20110601;
  /// Swapped out by mutation tests; everything else uses the real kernel.
  StayNegativeFn stay_negative = stay_negative_prob;
};

/// stay_negative vs exhaustive enumeration (m <= 14, -6 <= x <= 0), and
/// products of sampler step probabilities vs the enumerated conditional law
/// of every path with n <= 12.
std::vector<CheckResult> check_walk_enumeration(const ValidationOptions& options);

/// Exact sampler vs rejection oracle at n = 10, 10^5 paths each.
std::vector<CheckResult> check_walk_sampler_vs_rejection(const ValidationOptions& options);

/// Monte Carlo survival frequency vs rho_{0,n}: 50 random environments, n = 10.
std::vector<CheckResult> check_survival_monte_carlo(const ValidationOptions& options);

/// Backward log recursion vs direct extended-precision summation, n <= 200.
std::vector<CheckResult> check_survival_recursion(const ValidationOptions& options);

/// Spine sampler vs rejection oracle, marginals of Z_3 and Z_6, five fixed
/// environments of horizon 6; and z_c = 0 at the horizon.
std::vector<CheckResult> check_geiger_vs_rejection(const ValidationOptions& options);

/// Product form of the (R, L) law vs the joint formula; normalization;
/// the rho_{i-1} identity it rests on; the extinction-conditioned litter law.
std::vector<CheckResult> check_rl_factorization(const ValidationOptions& options);

/// E[Z_m e^{-S_m}] = 1 for m <= 10 over 10^6 unconditioned runs.
std::vector<CheckResult> check_martingale(const ValidationOptions& options);

/// survival_lower_bound <= rho_{0,n} on 10^4 random environments, n <= 2000.
std::vector<CheckResult> check_survival_lower_bound(const ValidationOptions& options);

std::vector<CheckResult> run_validation(const ValidationOptions& options);

}  // namespace bpre

#endif  // BPRE_VALIDATION_HPP
