#include "bpre/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bpre::numerics {

namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;
constexpr double kInf = std::numeric_limits<double>::infinity();

// stirlerr(n) for n = 0..15 from exact factorials in extended precision.
std::array<double, 16> small_stirlerr_table() {
  std::array<double, 16> table{};
  table[0] = kInf;
  long double factorial = 1.0L;
  for (int n = 1; n < 16; ++n) {
    factorial *= n;
    const long double ln = static_cast<long double>(n);
    table[n] = static_cast<double>(std::log(factorial) - (ln + 0.5L) * std::log(ln) + ln -
                                   0.5L * static_cast<long double>(kLn2Pi));
  }
  return table;
}

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  constexpr int kMaxIterations = 1'000'000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double stirlerr(double n) {
  static const std::array<double, 16> table = small_stirlerr_table();
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) return table[static_cast<std::size_t>(n)];
  const double nn = n * n;
  if (n > 500.0) return (s0 - s1 / nn) / n;
  if (n > 80.0) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35.0) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
  }
  return x * std::log(x / np) + np - x;
}

double log1pmx(double w) {
  if (std::fabs(w) > 1e-2) return std::log1p(w) - w;
  // -w^2/2 + w^3/3 - ... ; 12 terms reach double precision for |w| <= 1e-2.
  double term = w;
  double sum = 0.0;
  for (int k = 2; k < 14; ++k) {
    term *= -w;
    sum += term / k;
  }
  return sum;
}

double binomial_half_pmf(std::int64_t m, std::int64_t k) {
  if (m < 0 || k < 0 || k > m) return 0.0;
  const double md = static_cast<double>(m);
  if (k == 0 || k == m) return std::exp(-md * std::numbers::ln2);
  const double kd = static_cast<double>(k);
  const double rest = md - kd;
  const double lc = stirlerr(md) - stirlerr(kd) - stirlerr(rest) - bd0(kd, 0.5 * md) -
                    bd0(rest, 0.5 * md);
  const double lf = kLn2Pi + std::log(kd) + std::log1p(-kd / md);
  return std::exp(lc - 0.5 * lf);
}

double binomial_half_upper_tail(std::int64_t m, std::int64_t k) {
  if (k <= 0) return 1.0;
  if (k > m) return 0.0;
  // P(U >= k) with U ~ Bin(m, 1/2) equals I_{1/2}(k, m - k + 1), whose
  // prefactor x^a (1-x)^b / (a B(a,b)) is pmf(k)/2.
  const std::int64_t twice = 2 * k;
  if (twice == m + 1) return 0.5;
  auto small_tail = [m](std::int64_t kk) {
    const double a = static_cast<double>(kk);
    const double b = static_cast<double>(m - kk + 1);
    return 0.5 * binomial_half_pmf(m, kk) * beta_continued_fraction(a, b, 0.5);
  };
  if (twice > m + 1) return small_tail(k);
  return 1.0 - small_tail(m - k + 1);
}

double log_poisson_pmf(double k, double mean) {
  if (k < 0.0) return -kInf;
  if (mean == 0.0) return k == 0.0 ? 0.0 : -kInf;
  if (k == 0.0) return -mean;
  return -stirlerr(k) - bd0(k, mean) - 0.5 * (kLn2Pi + std::log(k));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return -kInf;
  const double peak = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - peak);
  return peak + std::log(sum);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == -kInf) return a;
  return a + std::log1p(std::exp(b - a));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    // Series for P(a, x).
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < 100000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return 1.0 - sum * std::exp(log_prefix);
  }
  // Continued fraction for Q(a, x).
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(log_prefix) * h;
}

double chi_square_sf(double statistic, double dof) {
  if (statistic <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

double kolmogorov_sf(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

}  // namespace bpre::numerics
