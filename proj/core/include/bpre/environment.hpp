#ifndef BPRE_ENVIRONMENT_HPP
#define BPRE_ENVIRONMENT_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "bpre/conditional_walk.hpp"

namespace bpre {

/// A varying environment of geometric offspring laws q_i(k) = p_i (1-p_i)^k,
/// i = 1..n, whose log-means are the increments of a walk: e^{X_i} = 1/p_i - 1.
///
/// Survival probabilities rho_{i,n} = P(Z_n > 0 | Z_i = 1) are kept as
/// a_i = log(1/rho_{i,n}) = log sum_{j=i}^{n} e^{-(S_j - S_i)}, filled by the
/// backward recursion a_n = 0, a_i = log1p(exp(a_{i+1} - X_{i+1})).
class GeometricEnvironment {
 public:
  /// Environment with real increments X_1..X_n (n >= 1).
  static GeometricEnvironment from_increments(std::span<const double> increments);

  std::size_t horizon() const noexcept { return increments_.size(); }

  /// X_i, 1 <= i <= n.
  double increment(std::size_t i) const { return increments_.at(i - 1); }
  /// S_i, 0 <= i <= n.
  double level(std::size_t i) const { return levels_.at(i); }
  const std::vector<double>& levels() const noexcept { return levels_; }

  /// p_i, 1 <= i <= n.
  double success(std::size_t i) const { return success_.at(i - 1); }
  /// 1 - p_i, computed directly rather than by subtraction.
  double failure(std::size_t i) const { return failure_.at(i - 1); }

  /// a_i = log(1/rho_{i,n}), 0 <= i <= n.
  double log_inv_survival(std::size_t i) const { return log_inv_rho_.at(i); }
  const std::vector<double>& log_inv_survival() const noexcept { return log_inv_rho_; }

  /// Success parameter of the offspring law of an individual in generation
  /// i-1 conditioned on its line dying out by n:
  /// 1 - (1-p_i)(1-rho_{i,n}). Exactly 1 at i = n.
  double extinction_conditioned_success(std::size_t i) const;

 private:
  GeometricEnvironment() = default;
  std::vector<double> increments_;
  std::vector<double> levels_;
  std::vector<double> success_;
  std::vector<double> failure_;
  std::vector<double> log_inv_rho_;
};

GeometricEnvironment build_environment(const WalkPath& path);

/// rho_{i,n}. Throws std::out_of_range unless 0 <= i <= n.
double survival_prob(const GeometricEnvironment& env, std::size_t i);

/// Standardized second moment sum y^2 q(y) / m(q)^2 of geometric(p).
double geometric_eta(double p);

/// eta_i of the offspring law of generation i-1, 1 <= i <= n.
double eta(const GeometricEnvironment& env, std::size_t i);

/// 1 / (e^{-S_n} + sum_{k=0}^{n-1} eta_{k+1} e^{-S_k}), a lower bound on rho_{0,n}.
double survival_lower_bound(const GeometricEnvironment& env);

}  // namespace bpre

#endif  // BPRE_ENVIRONMENT_HPP
