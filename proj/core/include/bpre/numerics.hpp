#ifndef BPRE_NUMERICS_HPP
#define BPRE_NUMERICS_HPP

// Special functions shared by the samplers and the statistics code.

#include <cstdint>
#include <span>

namespace bpre::numerics {

/// log(n!) - [(n + 1/2) log n - n + log(2 pi)/2] for integer-valued n >= 0.
/// Loader's saddle-point error term; stirlerr(0) = 1 - log(2 pi)/2 is never
/// needed and returns +inf.
double stirlerr(double n);

/// x log(x/np) + np - x, computed without cancellation when x ~ np.
double bd0(double x, double np);

/// log(1 + w) - w, accurate for small |w|.
double log1pmx(double w);

/// P(Bin(m, 1/2) = k) with relative error at the 1e-14 level for any m.
double binomial_half_pmf(std::int64_t m, std::int64_t k);

/// P(Bin(m, 1/2) >= k) via a continued fraction for the regularized
/// incomplete beta function, always evaluated on the side where the tail
/// is at most 1/2.
double binomial_half_upper_tail(std::int64_t m, std::int64_t k);

/// log P(Poisson(mean) = k).
double log_poisson_pmf(double k, double mean);

/// log(sum exp(v)) over a non-empty span; -inf for an empty one.
double log_sum_exp(std::span<const double> values);

/// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

double normal_cdf(double x);

/// Upper regularized incomplete gamma Q(a, x).
double regularized_gamma_q(double a, double x);

/// Survival function of the chi-square law with `dof` degrees of freedom.
double chi_square_sf(double statistic, double dof);

/// Asymptotic Kolmogorov survival function P(K > lambda).
double kolmogorov_sf(double lambda);

}  // namespace bpre::numerics

#endif  // BPRE_NUMERICS_HPP
