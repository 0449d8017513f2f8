#include "bpre/environment.hpp"

#include <cmath>
#include <stdexcept>

#include "bpre/numerics.hpp"

namespace bpre {

namespace {

// log(1 + e^t) without overflow.
double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

}  // namespace

GeometricEnvironment GeometricEnvironment::from_increments(std::span<const double> increments) {
  if (increments.empty()) throw std::invalid_argument("environment horizon must be >= 1");
  GeometricEnvironment env;
  const std::size_t n = increments.size();
  env.increments_.assign(increments.begin(), increments.end());
  env.levels_.assign(n + 1, 0.0);
  env.success_.resize(n);
  env.failure_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = increments[i];
    if (!std::isfinite(x)) throw std::invalid_argument("environment increments must be finite");
    env.levels_[i + 1] = env.levels_[i] + x;
    env.success_[i] = 1.0 / (1.0 + std::exp(x));
    env.failure_[i] = 1.0 / (1.0 + std::exp(-x));
  }
  // 1/rho_{i} = 1 + e^{-X_{i+1}} / rho_{i+1}.
  env.log_inv_rho_.assign(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    env.log_inv_rho_[i] = softplus(env.log_inv_rho_[i + 1] - increments[i]);
  }
  return env;
}

double GeometricEnvironment::extinction_conditioned_success(std::size_t i) const {
  const double doomed = -std::expm1(-log_inv_rho_.at(i));  // 1 - rho_{i,n}
  return 1.0 - failure(i) * doomed;
}

GeometricEnvironment build_environment(const WalkPath& path) {
  if (path.length() == 0) throw std::invalid_argument("build_environment: empty path");
  std::vector<double> x(path.length());
  for (std::size_t k = 1; k <= path.length(); ++k) x[k - 1] = path.increment(k);
  return GeometricEnvironment::from_increments(x);
}

double survival_prob(const GeometricEnvironment& env, std::size_t i) {
  if (i > env.horizon()) throw std::out_of_range("survival_prob: generation out of range");
  return std::exp(-env.log_inv_survival(i));
}

// For Y ~ geometric(p) on {0,1,...}: m = (1-p)/p and Var Y = (1-p)/p^2, so
// E[Y^2] = (1-p)/p^2 + (1-p)^2/p^2 = (1-p)(2-p)/p^2 and E[Y^2]/m^2 = (2-p)/(1-p).
double geometric_eta(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("geometric_eta: p must lie in (0,1)");
  return (2.0 - p) / (1.0 - p);
}

double eta(const GeometricEnvironment& env, std::size_t i) {
  if (i == 0 || i > env.horizon()) throw std::out_of_range("eta: generation out of range");
  // (2-p)/(1-p) = 1 + 1/(1-p).
  return 1.0 + 1.0 / env.failure(i);
}

double survival_lower_bound(const GeometricEnvironment& env) {
  const std::size_t n = env.horizon();
  std::vector<double> terms;
  terms.reserve(n + 1);
  terms.push_back(-env.level(n));
  for (std::size_t k = 0; k < n; ++k) terms.push_back(std::log(eta(env, k + 1)) - env.level(k));
  return std::exp(-numerics::log_sum_exp(terms));
}

}  // namespace bpre
