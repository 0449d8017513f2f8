#include "bpre/geiger.hpp"

#include <stdexcept>

#include "bpre/numerics.hpp"
#include "bpre/prob_kernel.hpp"

namespace bpre {

namespace {

const double kLogExactMassLimit = std::log(static_cast<double>(kExactMassLimit));

}  // namespace

Mass Mass::exact(std::uint64_t count) {
  Mass m;
  if (count < kExactMassLimit) {
    m.count_ = count;
    m.log_count_ = count == 0 ? -std::numeric_limits<double>::infinity()
                              : std::log(static_cast<double>(count));
    m.exact_ = true;
  } else {
    m.count_ = 0;
    m.log_count_ = std::log(static_cast<double>(count));
    m.exact_ = false;
  }
  return m;
}

Mass Mass::from_log(double log_count) {
  if (log_count < kLogExactMassLimit) {
    return exact(static_cast<std::uint64_t>(std::nearbyint(std::exp(log_count))));
  }
  Mass m;
  m.log_count_ = log_count;
  m.exact_ = false;
  return m;
}

std::uint64_t Mass::count() const {
  if (!exact_) throw std::logic_error("Mass::count: mass is on the log scale");
  return count_;
}

double Mass::value() const noexcept {
  return exact_ ? static_cast<double>(count_) : std::exp(log_count_);
}

double Mass::log_value() const noexcept { return log_count_; }

Mass evolve_mass(const Mass& mass, double s, RngStream& rng) {
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("evolve_mass: bad success probability");
  if (mass.is_zero() || s == 1.0) return Mass{};
  const double log_mean_factor = std::log1p(-s) - std::log(s);
  if (mass.is_exact() && mass.log_value() + log_mean_factor < kLogExactMassLimit) {
    return Mass::exact(sample_negative_binomial(mass.count(), s, rng));
  }
  // Gamma-Poisson mixture with both layers on the log scale when large.
  double log_gamma = 0.0;
  if (mass.is_exact()) {
    log_gamma = std::log(sample_gamma(static_cast<double>(mass.count()), rng));
  } else {
    const double l = mass.log_value();
    log_gamma = l + std::log1p(rng.normal() * std::exp(-0.5 * l));
  }
  const double log_rate = log_gamma + log_mean_factor;
  if (log_rate < kLogExactMassLimit) return Mass::exact(sample_poisson(std::exp(log_rate), rng));
  return Mass::from_log(log_rate + std::log1p(rng.normal() * std::exp(-0.5 * log_rate)));
}

Mass add_count(const Mass& mass, std::uint64_t extra) {
  if (extra == 0) return mass;
  if (mass.is_exact() && mass.count() < kExactMassLimit - extra) {
    return Mass::exact(mass.count() + extra);
  }
  return Mass::from_log(
      numerics::log_add_exp(mass.log_value(), std::log(static_cast<double>(extra))));
}

double GeigerState::total() const {
  if (total_is_exact()) return 1.0 + z_u.value() + z_c.value();
  return std::exp(log_total());
}

double GeigerState::log_total() const {
  if (total_is_exact()) return std::log(1.0 + z_u.value() + z_c.value());
  return numerics::log_add_exp(0.0, numerics::log_add_exp(z_u.log_value(), z_c.log_value()));
}

bool GeigerState::total_is_exact() const { return z_u.is_exact() && z_c.is_exact(); }

double rl_joint_pmf(double p, double rho, double rho_prev, std::uint64_t r, std::uint64_t l) {
  const double q = 1.0 - p;
  return p * std::pow(q, static_cast<double>(r + l + 1)) * rho *
         std::pow(1.0 - rho, static_cast<double>(l)) / rho_prev;
}

double rl_product_pmf(double p, double rho, std::uint64_t r, std::uint64_t l) {
  const double q = 1.0 - p;
  const double s = p + q * rho;
  return p * std::pow(q, static_cast<double>(r)) * s *
         std::pow(q * (1.0 - rho), static_cast<double>(l));
}

RLPair sample_rl_pair(const GeometricEnvironment& env, std::size_t i, RngStream& rng) {
  if (i == 0 || i > env.horizon()) throw std::out_of_range("sample_rl_pair: generation out of range");
  RLPair pair;
  pair.r = sample_geometric(env.success(i), rng);
  pair.l = sample_geometric(env.extinction_conditioned_success(i), rng);
  return pair;
}

GeigerState evolve_generation(const GeigerState& state, const GeometricEnvironment& env,
                              std::size_t i, RngStream& rng) {
  if (i == 0 || i > env.horizon() || state.generation + 1 != i) {
    throw std::invalid_argument("evolve_generation: state is not at generation i-1");
  }
  const RLPair siblings = sample_rl_pair(env, i, rng);
  GeigerState next;
  next.generation = i;
  next.z_u = add_count(evolve_mass(state.z_u, env.success(i), rng), siblings.r);
  next.z_c = add_count(evolve_mass(state.z_c, env.extinction_conditioned_success(i), rng),
                       siblings.l);
  return next;
}

ReplicateRecord sample_conditioned_bpre(const WalkPath& path, RngStream& rng) {
  const GeometricEnvironment env = build_environment(path);
  const std::size_t n = env.horizon();
  ReplicateRecord rec;
  rec.walk = path;
  rec.decomposition = decompose(path);
  rec.master_seed = rng.master_seed();
  rec.stream_id = rng.stream_id();
  rec.z.resize(n + 1);
  rec.log_z.resize(n + 1);
  rec.ratios.resize(n + 1);

  GeigerState state;
  auto record = [&rec](std::size_t k, const GeigerState& st) {
    rec.log_z[k] = st.log_total();
    rec.z[k] = st.total();
    const auto sr = static_cast<double>(rec.decomposition.reflected[k]);
    rec.ratios[k] = std::isfinite(rec.z[k]) ? rec.z[k] * std::exp(-sr)
                                            : std::exp(rec.log_z[k] - sr);
  };
  record(0, state);
  for (std::size_t i = 1; i <= n; ++i) {
    state = evolve_generation(state, env, i, rng);
    record(i, state);
  }
  rec.conditioned_mass_at_horizon = state.z_c.value();
  return rec;
}

std::vector<std::uint64_t> simulate_unconditioned(const GeometricEnvironment& env,
                                                  RngStream& rng) {
  const std::size_t n = env.horizon();
  std::vector<std::uint64_t> z(n + 1, 0);
  z[0] = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (z[i - 1] == 0) break;
    z[i] = sample_negative_binomial(z[i - 1], env.success(i), rng);
  }
  return z;
}

BpreRejectionResult rejection_oracle_bpre(const GeometricEnvironment& env,
                                          std::uint64_t num_accepted, RngStream& rng,
                                          double max_expected_trials) {
  if (env.horizon() > kMaxRejectionBpreHorizon) {
    throw std::invalid_argument("rejection_oracle_bpre: horizon exceeds 10");
  }
  const double rho = survival_prob(env, 0);
  if (static_cast<double>(num_accepted) / rho > max_expected_trials) {
    throw std::invalid_argument("rejection_oracle_bpre: survival probability too small");
  }
  BpreRejectionResult result;
  result.trajectories.reserve(num_accepted);
  while (result.accepted < num_accepted) {
    ++result.trials;
    auto z = simulate_unconditioned(env, rng);
    if (z.back() == 0) continue;
    ++result.accepted;
    result.trajectories.push_back(std::move(z));
  }
  return result;
}

}  // namespace bpre
