#ifndef BPRE_GEIGER_HPP
#define BPRE_GEIGER_HPP

// Sampling a branching process in a geometric varying environment,
// conditioned on survival to the horizon, along its leftmost surviving line
// (the spine). Beside the spine node of generation i-1 sit R_i unconditioned
// and L_i extinction-conditioned siblings; their descendants are tracked only
// as two aggregate counts, since sums of independent geometric litters are
// negative binomial.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "bpre/conditional_walk.hpp"
#include "bpre/environment.hpp"
#include "bpre/rng.hpp"

namespace bpre {

/// Counts at or above this are carried on a log scale.
inline constexpr std::uint64_t kExactMassLimit = std::uint64_t{1} << 50;

/// A nonnegative population count. Exact below kExactMassLimit; above it,
/// only log(count) is kept and one generation of offspring is drawn from the
/// Gaussian limit of the gamma-Poisson mixture (relative error of the law
/// below 1e-7 at that size).
class Mass {
 public:
  Mass() = default;

  static Mass exact(std::uint64_t count);
  /// Rounds back to an exact count when log_count < log(kExactMassLimit).
  static Mass from_log(double log_count);

  bool is_exact() const noexcept { return exact_; }
  bool is_zero() const noexcept { return exact_ && count_ == 0; }
  /// Throws std::logic_error when the mass is on the log scale.
  std::uint64_t count() const;
  double value() const noexcept;
  double log_value() const noexcept;

 private:
  std::uint64_t count_ = 0;
  double log_count_ = -std::numeric_limits<double>::infinity();
  bool exact_ = true;
};

/// Offspring of every individual of `mass`, each litter geometric(s).
Mass evolve_mass(const Mass& mass, double s, RngStream& rng);

/// mass + extra.
Mass add_count(const Mass& mass, std::uint64_t extra);

struct GeigerState {
  std::size_t generation = 0;
  Mass z_u;  ///< descendants of unconditioned siblings
  Mass z_c;  ///< descendants of extinction-conditioned siblings

  /// 1 + z_u + z_c; the 1 is the spine.
  double total() const;
  double log_total() const;
  bool total_is_exact() const;
};

struct RLPair {
  std::uint64_t r = 0;
  std::uint64_t l = 0;
};

/// Joint law of (R_i, L_i) as written with rho_{i-1,n} in the denominator:
/// p (1-p)^{r+l+1} rho (1-rho)^l / rho_prev.
double rl_joint_pmf(double p, double rho, double rho_prev, std::uint64_t r, std::uint64_t l);

/// geometric(p)(r) * geometric(p + (1-p) rho)(l), which equals rl_joint_pmf
/// whenever rho_prev = (1-p) rho / (p + (1-p) rho).
double rl_product_pmf(double p, double rho, std::uint64_t r, std::uint64_t l);

/// (R_i, L_i) for 1 <= i <= n, drawn as two independent geometrics.
RLPair sample_rl_pair(const GeometricEnvironment& env, std::size_t i, RngStream& rng);

/// One generation: state at i-1 -> state at i.
GeigerState evolve_generation(const GeigerState& state, const GeometricEnvironment& env,
                              std::size_t i, RngStream& rng);

struct ReplicateRecord {
  WalkPath walk;
  PathDecomposition decomposition;
  /// Z_0..Z_n; exact integers while below kExactMassLimit.
  std::vector<double> z;
  std::vector<double> log_z;
  /// V_k = Z_k e^{-S^r_k}.
  std::vector<double> ratios;
  /// z_c at generation n; zero by construction.
  double conditioned_mass_at_horizon = 0.0;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

/// Z_0..Z_n given Z_n > 0 in the environment built from `path`.
ReplicateRecord sample_conditioned_bpre(const WalkPath& path, RngStream& rng);

/// Plain quenched process Z_0 = 1, Z_i ~ NB(Z_{i-1}, p_i); entries after
/// extinction are zero and consume no randomness.
std::vector<std::uint64_t> simulate_unconditioned(const GeometricEnvironment& env,
                                                  RngStream& rng);

inline constexpr std::size_t kMaxRejectionBpreHorizon = 10;

struct BpreRejectionResult {
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  /// Accepted trajectories Z_0..Z_n.
  std::vector<std::vector<std::uint64_t>> trajectories;
};

/// Conditions simulate_unconditioned on Z_n > 0 by rejection. Throws
/// std::invalid_argument for n > kMaxRejectionBpreHorizon or when more than
/// `max_expected_trials` trials would be needed on average.
BpreRejectionResult rejection_oracle_bpre(const GeometricEnvironment& env,
                                          std::uint64_t num_accepted, RngStream& rng,
                                          double max_expected_trials = 1e9);

}  // namespace bpre

#endif  // BPRE_GEIGER_HPP
