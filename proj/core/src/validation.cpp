#include "bpre/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "bpre/conditional_walk.hpp"
#include "bpre/environment.hpp"
#include "bpre/geiger.hpp"
#include "bpre/stats.hpp"

namespace bpre {

namespace {

// Stream ids per check, so checks are independent of run order.
enum StreamId : std::uint64_t {
  kStreamWalkSampler = 101,
  kStreamWalkRejection,
  kStreamSurvivalEnvs,
  kStreamSurvivalRuns,
  kStreamRecursionPaths,
  kStreamGeigerSpine,
  kStreamGeigerRejection,
  kStreamRlPairs,
  kStreamMartingale,
  kStreamBoundEnvs,
};

CheckResult make_check(std::string name, std::string description, double statistic,
                       double threshold, std::string relation, std::string detail = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.description = std::move(description);
  c.statistic = statistic;
  c.threshold = threshold;
  c.relation = std::move(relation);
  c.passed = c.relation == "<=" ? statistic <= threshold : statistic >= threshold;
  if (std::isnan(statistic)) c.passed = false;
  c.detail = std::move(detail);
  return c;
}

// Number of the 2^m step sequences from x that stay strictly below 0.
std::uint64_t count_staying_negative(int m, int x) {
  std::uint64_t count = 0;
  for (std::uint32_t code = 0; code < (1U << m); ++code) {
    int pos = x;
    bool ok = true;
    for (int k = 0; k < m && ok; ++k) {
      pos += ((code >> k) & 1U) != 0 ? 1 : -1;
      ok = pos < 0;
    }
    if (ok) ++count;
  }
  return count;
}

std::vector<int> random_steps(std::size_t n, RngStream& rng) {
  std::vector<int> steps(n);
  for (auto& s : steps) s = rng.bernoulli_half() ? 1 : -1;
  return steps;
}

}  // namespace

std::vector<CheckResult> check_walk_enumeration(const ValidationOptions& options) {
  double table_error = 0.0;
  for (int m = 0; m <= 14; ++m) {
    for (int x = -6; x <= 0; ++x) {
      const double exact =
          static_cast<double>(count_staying_negative(m, x)) / static_cast<double>(1U << m);
      table_error = std::max(table_error, std::fabs(options.stay_negative(m, x) - exact));
    }
  }

  double path_error = 0.0;
  for (std::size_t n = 1; n <= 12; ++n) {
    const double admissible = static_cast<double>(count_staying_negative(static_cast<int>(n), 0));
    for (std::uint32_t code = 0; code < (1U << n); ++code) {
      const WalkPath path = decode_path(code, n);
      const bool inside = path.running_max() < 0;
      double prob = 1.0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double up = conditioned_up_probability(n, k, path[k - 1], options.stay_negative);
        prob *= path.increment(k) > 0 ? up : 1.0 - up;
      }
      if (inside) {
        // Given M_n < 0 all admissible paths are equally likely.
        const double exact = 1.0 / admissible;
        path_error = std::max(path_error, std::fabs(prob - exact) / exact);
      } else {
        path_error = std::max(path_error, prob == 0.0 ? 0.0 : 1.0);
      }
    }
  }
  return {
      make_check("walk_stay_negative_table",
                 "stay_negative_prob vs enumeration, m <= 14, -6 <= x <= 0 (abs error)",
                 table_error, 1e-12, "<="),
      make_check("walk_step_probability_exactness",
                 "sampler path probabilities vs enumerated law given M_n < 0, n <= 12 (rel error)",
                 path_error, 1e-10, "<="),
  };
}

std::vector<CheckResult> check_walk_sampler_vs_rejection(const ValidationOptions& options) {
  constexpr std::size_t n = 10;
  constexpr std::uint64_t samples = 100'000;
  RngStream sampler_rng(options.master_seed, kStreamWalkSampler);
  RngStream oracle_rng(options.master_seed, kStreamWalkRejection);
  std::map<std::int64_t, std::uint64_t> exact_counts;
  bool support_ok = true;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const WalkPath p = sample_conditioned_below_zero(n, sampler_rng);
    support_ok = support_ok && p.running_max() < 0;
    const WalkPath d = dualize(p);
    for (std::size_t j = 0; j < n; ++j) support_ok = support_ok && d[n] < d[j];
    ++exact_counts[encode_path(p)];
  }
  const WalkRejectionResult oracle = rejection_oracle_walk(n, samples, oracle_rng);
  std::map<std::int64_t, std::uint64_t> oracle_counts(oracle.counts.begin(), oracle.counts.end());
  const ChiSquareResult chi = chi_square_two_sample(exact_counts, oracle_counts);

  double tv = 0.0;
  std::map<std::int64_t, std::pair<double, double>> joint;
  for (const auto& [k, c] : exact_counts) joint[k].first = static_cast<double>(c) / samples;
  for (const auto& [k, c] : oracle_counts) joint[k].second = static_cast<double>(c) / samples;
  for (const auto& [k, pr] : joint) tv += 0.5 * std::fabs(pr.first - pr.second);

  std::ostringstream detail;
  detail << "chi2=" << chi.statistic << " dof=" << chi.dof << " tv=" << tv
         << " oracle_acceptance=" << static_cast<double>(oracle.accepted) / oracle.trials;
  return {
      make_check("walk_sampler_vs_rejection",
                 "exact sampler vs rejection oracle, n = 10, 1e5 paths each (chi-square p)",
                 chi.p_value, 0.01, ">=", detail.str()),
      make_check("walk_conditioned_support",
                 "sampled paths stay below 0 and their duals end at a strict minimum",
                 support_ok ? 0.0 : 1.0, 0.0, "<="),
  };
}

std::vector<CheckResult> check_survival_monte_carlo(const ValidationOptions& options) {
  constexpr std::size_t n = 10;
  constexpr std::size_t environments = 50;
  constexpr std::uint64_t runs = 1'000'000;
  RngStream env_rng(options.master_seed, kStreamSurvivalEnvs);
  RngStream run_rng(options.master_seed, kStreamSurvivalRuns);
  double worst_z = 0.0;
  double worst_rho = 0.0;
  for (std::size_t e = 0; e < environments; ++e) {
    const auto steps = random_steps(n, env_rng);
    const GeometricEnvironment env = build_environment(WalkPath::from_increments(steps));
    const double rho = survival_prob(env, 0);
    std::uint64_t survived = 0;
    for (std::uint64_t r = 0; r < runs; ++r) {
      if (simulate_unconditioned(env, run_rng).back() > 0) ++survived;
    }
    const double freq = static_cast<double>(survived) / runs;
    const double se = std::sqrt(rho * (1.0 - rho) / runs);
    const double z = std::fabs(freq - rho) / se;
    if (z > worst_z) {
      worst_z = z;
      worst_rho = rho;
    }
  }
  std::ostringstream detail;
  detail << "worst environment rho=" << worst_rho;
  return {make_check("survival_monte_carlo",
                     "max |freq - rho_{0,n}| / SE over 50 environments, n = 10, 1e6 runs each",
                     worst_z, 3.0, "<=", detail.str())};
}

std::vector<CheckResult> check_survival_recursion(const ValidationOptions& options) {
  RngStream rng(options.master_seed, kStreamRecursionPaths);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 200; ++n) {
    for (int variant = 0; variant < 2; ++variant) {
      const WalkPath path = variant == 0 ? WalkPath::from_increments(random_steps(n, rng))
                                         : sample_conditioned_min_at_end(n, rng);
      const GeometricEnvironment env = build_environment(path);
      for (std::size_t i = 0; i <= n; ++i) {
        long double sum = 0.0L;
        for (std::size_t j = i; j <= n; ++j) {
          sum += std::exp(-static_cast<long double>(path[j] - path[i]));
        }
        const double direct = static_cast<double>(std::log(sum));
        worst = std::max(worst, std::fabs(direct - env.log_inv_survival(i)));
      }
    }
  }
  return {make_check("survival_recursion_vs_direct",
                     "max |log rho (recursion) - log rho (direct sum)|, n <= 200", worst, 1e-9,
                     "<=")};
}

std::vector<CheckResult> check_geiger_vs_rejection(const ValidationOptions& options) {
  constexpr std::uint64_t samples = 100'000;
  const std::vector<std::vector<std::int64_t>> fixed = {
      {0, -1, -2, -1, -2, -3, -4},
      {0, 1, 0, -1, 0, -1, -2},
      {0, 1, 2, 1, 0, 1, 0},
      {0, -1, 0, 1, 0, -1, 0},
      {0, -1, -2, -3, -2, -1, 0},
  };
  RngStream spine_rng(options.master_seed, kStreamGeigerSpine);
  RngStream oracle_rng(options.master_seed, kStreamGeigerRejection);
  double min_p = 1.0;
  std::uint64_t horizon_violations = 0;
  std::ostringstream detail;
  for (std::size_t e = 0; e < fixed.size(); ++e) {
    const WalkPath path = WalkPath::from_positions(fixed[e]);
    const GeometricEnvironment env = build_environment(path);
    std::map<std::int64_t, std::uint64_t> spine3, spine6, oracle3, oracle6;
    for (std::uint64_t s = 0; s < samples; ++s) {
      const ReplicateRecord rec = sample_conditioned_bpre(path, spine_rng);
      if (rec.conditioned_mass_at_horizon != 0.0) ++horizon_violations;
      ++spine3[static_cast<std::int64_t>(rec.z[3])];
      ++spine6[static_cast<std::int64_t>(rec.z[6])];
    }
    const BpreRejectionResult oracle = rejection_oracle_bpre(env, samples, oracle_rng);
    for (const auto& z : oracle.trajectories) {
      ++oracle3[static_cast<std::int64_t>(z[3])];
      ++oracle6[static_cast<std::int64_t>(z[6])];
    }
    const ChiSquareResult c3 = chi_square_two_sample(spine3, oracle3);
    const ChiSquareResult c6 = chi_square_two_sample(spine6, oracle6);
    min_p = std::min({min_p, c3.p_value, c6.p_value});
    detail << "env" << e << ": p(Z3)=" << c3.p_value << " p(Z6)=" << c6.p_value << "; ";
  }
  return {
      make_check("geiger_vs_rejection",
                 "min chi-square p over Z_3, Z_6 marginals, 5 environments, n = 6, 1e5 each",
                 min_p, 0.01, ">=", detail.str()),
      make_check("geiger_horizon_extinction",
                 "replicates with z_c != 0 at the horizon", static_cast<double>(horizon_violations),
                 0.0, "<="),
  };
}

std::vector<CheckResult> check_rl_factorization(const ValidationOptions& options) {
  RngStream rng(options.master_seed, kStreamRlPairs);
  double pointwise = 0.0;
  double deficit = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double p = 0.1 + 0.8 * rng.uniform();
    const double rho = rng.uniform_pos();
    const double q = 1.0 - p;
    const double rho_prev = q * rho / (p + q * rho);
    for (std::uint64_t r = 0; r <= 20; ++r) {
      for (std::uint64_t l = 0; l <= 20; ++l) {
        const double joint = rl_joint_pmf(p, rho, rho_prev, r, l);
        const double product = rl_product_pmf(p, rho, r, l);
        pointwise = std::max(pointwise, std::fabs(product - joint) / joint);
      }
    }
    // Truncate where both geometric tails are below 1e-16.
    const double s = p + q * rho;
    const auto kr = static_cast<std::uint64_t>(std::ceil(std::log(1e-16) / std::log(q)));
    const auto kl = 1.0 - s > 0.0
                        ? static_cast<std::uint64_t>(std::ceil(std::log(1e-16) / std::log(1.0 - s)))
                        : 0;
    double total = 0.0;
    for (std::uint64_t r = 0; r <= kr; ++r) {
      for (std::uint64_t l = 0; l <= kl; ++l) total += rl_joint_pmf(p, rho, rho_prev, r, l);
    }
    deficit = std::max(deficit, std::fabs(1.0 - total));
  }

  // rho_{i-1} = (1-p_i) rho_i / (p_i + (1-p_i) rho_i) and the conditioned
  // litter law q~_i(k) = q_i(k) (1-rho_i)^k / (1-rho_{i-1}) on environments.
  double identity = 0.0;
  double litter = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 300.0);
    const WalkPath path = trial % 2 == 0 ? WalkPath::from_increments(random_steps(n, rng))
                                         : sample_conditioned_min_at_end(n, rng);
    const GeometricEnvironment env = build_environment(path);
    for (std::size_t i = 1; i <= n; ++i) {
      const double p = env.success(i);
      const double q = env.failure(i);
      const double rho = survival_prob(env, i);
      const double rho_prev = survival_prob(env, i - 1);
      const double implied = q * rho / (p + q * rho);
      identity = std::max(identity, std::fabs(implied - rho_prev) / rho_prev);
      const double doomed_prev = -std::expm1(-env.log_inv_survival(i - 1));
      const double doomed = -std::expm1(-env.log_inv_survival(i));
      const double s = env.extinction_conditioned_success(i);
      for (int k = 0; k <= 50; ++k) {
        const double tilted = p * std::pow(q, k) * std::pow(doomed, k) / doomed_prev;
        const double geometric = s * std::pow(1.0 - s, k);
        if (geometric < 1e-280) break;
        litter = std::max(litter, std::fabs(tilted - geometric) / geometric);
      }
    }
  }
  return {
      make_check("rl_factorization_pointwise",
                 "max rel error, product form vs joint (R,L) law on [0,20]^2, 100 (p,rho)",
                 pointwise, 1e-12, "<="),
      make_check("rl_normalization", "max |1 - sum of joint (R,L) law|", deficit, 1e-9, "<="),
      make_check("rho_recursion_identity",
                 "max rel error of rho_{i-1} = (1-p) rho / (p + (1-p) rho) per generation",
                 identity, 1e-10, "<="),
      make_check("conditioned_litter_law",
                 "max rel error, extinction-conditioned litter law vs geometric, k <= 50", litter,
                 1e-9, "<="),
  };
}

std::vector<CheckResult> check_martingale(const ValidationOptions& options) {
  constexpr std::size_t n = 10;
  constexpr std::uint64_t runs = 1'000'000;
  RngStream rng(options.master_seed, kStreamMartingale);
  std::vector<double> sum(n + 1, 0.0);
  std::vector<double> sum_sq(n + 1, 0.0);
  for (std::uint64_t r = 0; r < runs; ++r) {
    const auto steps = random_steps(n, rng);
    const GeometricEnvironment env = build_environment(WalkPath::from_increments(steps));
    const auto z = simulate_unconditioned(env, rng);
    for (std::size_t m = 1; m <= n; ++m) {
      const double v = static_cast<double>(z[m]) * std::exp(-env.level(m));
      sum[m] += v;
      sum_sq[m] += v * v;
    }
  }
  double worst = 0.0;
  std::ostringstream detail;
  for (std::size_t m = 1; m <= n; ++m) {
    const double mean = sum[m] / runs;
    const double var = (sum_sq[m] - runs * mean * mean) / (runs - 1.0);
    const double z = std::fabs(mean - 1.0) / std::sqrt(var / runs);
    worst = std::max(worst, z);
    detail << "m=" << m << ":" << mean << " ";
  }
  return {make_check("martingale_mean",
                     "max_m |mean(Z_m e^{-S_m}) - 1| / SE, m <= 10, 1e6 runs", worst, 3.0, "<=",
                     detail.str())};
}

std::vector<CheckResult> check_survival_lower_bound(const ValidationOptions& options) {
  constexpr int environments = 10'000;
  RngStream rng(options.master_seed, kStreamBoundEnvs);
  double worst = -std::numeric_limits<double>::infinity();
  bool in_range = true;
  for (int e = 0; e < environments; ++e) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 2000.0);
    // Every tenth environment is a conditioned (minimum at the end) path.
    const WalkPath path = e % 10 == 0 ? sample_conditioned_min_at_end(n, rng)
                                      : WalkPath::from_increments(random_steps(n, rng));
    const GeometricEnvironment env = build_environment(path);
    const double bound = survival_lower_bound(env);
    in_range = in_range && bound > 0.0 && bound <= 1.0;
    worst = std::max(worst, std::log(bound) + env.log_inv_survival(0));
  }
  return {
      make_check("survival_lower_bound",
                 "max log(bound / rho_{0,n}) over 1e4 environments, n <= 2000", worst, 0.0, "<="),
      make_check("survival_lower_bound_range", "bounds outside (0,1]", in_range ? 0.0 : 1.0, 0.0,
                 "<="),
  };
}

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
  std::vector<CheckResult> all;
  auto append = [&all](std::vector<CheckResult> part) {
    all.insert(all.end(), part.begin(), part.end());
  };
  append(check_walk_enumeration(options));
  append(check_walk_sampler_vs_rejection(options));
  append(check_survival_recursion(options));
  append(check_rl_factorization(options));
  append(check_survival_lower_bound(options));
  append(check_geiger_vs_rejection(options));
  append(check_martingale(options));
  append(check_survival_monte_carlo(options));
  return all;
}

}  // namespace bpre
