#include "bpre/stats.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "bpre/numerics.hpp"

namespace bpre {

namespace {

struct PooledBins {
  std::vector<double> a;
  std::vector<double> b;
};

// Merge adjacent categories left to right until `weight(bin) >= threshold`;
// a short final bin is folded into its predecessor.
template <typename Weight>
PooledBins pool_adjacent(std::span<const double> a, std::span<const double> b, double threshold,
                         Weight weight) {
  PooledBins out;
  double acc_a = 0.0;
  double acc_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc_a += a[i];
    acc_b += b[i];
    if (weight(acc_a, acc_b) >= threshold) {
      out.a.push_back(acc_a);
      out.b.push_back(acc_b);
      acc_a = 0.0;
      acc_b = 0.0;
    }
  }
  if (acc_a > 0.0 || acc_b > 0.0) {
    if (out.a.empty()) {
      out.a.push_back(acc_a);
      out.b.push_back(acc_b);
    } else {
      out.a.back() += acc_a;
      out.b.back() += acc_b;
    }
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y,
               std::span<const std::size_t> rows) {
  const auto n = static_cast<double>(rows.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t r : rows) {
    mx += x[r];
    my += y[r];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t r : rows) {
    const double dx = x[r] - mx;
    const double dy = y[r] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

CorrelationEstimate correlation_with_ci(const std::vector<double>& x, const std::vector<double>& y,
                                        RngStream& rng, std::size_t rounds) {
  CorrelationEstimate est;
  est.pairs = x.size();
  if (x.size() < 3) return est;
  std::vector<std::size_t> rows(x.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  est.correlation = pearson(x, y, rows);
  std::vector<double> boot;
  boot.reserve(rounds);
  for (std::size_t b = 0; b < rounds; ++b) {
    for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform() * static_cast<double>(x.size()));
    boot.push_back(pearson(x, y, rows));
  }
  std::sort(boot.begin(), boot.end());
  est.ci_low = quantile_sorted(boot, 0.025);
  est.ci_high = quantile_sorted(boot, 0.975);
  return est;
}

std::size_t find_time_slot(const std::vector<double>& times, double t) {
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (std::fabs(times[j] - t) < 1e-12) return j;
  }
  return times.size();
}

}  // namespace

std::size_t time_index(std::size_t n, double t) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * t + 1e-9));
}

double half_bridge_cdf(double t, double x) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("half_bridge_cdf: t must lie in (0,1)");
  if (x <= 0.0) return 0.0;
  // 2 Phi(x / sd) - 1 = erf(x / (sd sqrt 2)).
  return std::erf(x / std::sqrt(2.0 * t * (1.0 - t)));
}

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    // Ties: the empirical CDF jumps to its value after the last copy.
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    d = std::max(d, static_cast<double>(j + 1) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
    i = j;
  }
  return std::clamp(d, 0.0, 1.0);
}

ChiSquareResult chi_square_goodness_of_fit(std::span<const double> observed,
                                           std::span<const double> probabilities,
                                           double min_expected) {
  if (observed.size() != probabilities.size() || observed.empty()) {
    throw std::invalid_argument("chi_square_goodness_of_fit: size mismatch");
  }
  const double total = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<double> expected(probabilities.size());
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = probabilities[i] * total;
  const PooledBins bins = pool_adjacent(observed, expected, min_expected,
                                        [](double, double e) { return e; });
  ChiSquareResult res;
  res.bins = bins.a.size();
  for (std::size_t i = 0; i < bins.a.size(); ++i) {
    const double diff = bins.a[i] - bins.b[i];
    res.statistic += diff * diff / bins.b[i];
  }
  res.dof = static_cast<double>(res.bins) - 1.0;
  res.p_value = res.dof > 0.0 ? numerics::chi_square_sf(res.statistic, res.dof) : 1.0;
  return res;
}

ChiSquareResult chi_square_two_sample(const std::map<std::int64_t, std::uint64_t>& a,
                                      const std::map<std::int64_t, std::uint64_t>& b,
                                      double min_bin_count) {
  std::map<std::int64_t, std::pair<double, double>> joint;
  for (const auto& [k, c] : a) joint[k].first += static_cast<double>(c);
  for (const auto& [k, c] : b) joint[k].second += static_cast<double>(c);
  std::vector<double> ca;
  std::vector<double> cb;
  for (const auto& [k, c] : joint) {
    ca.push_back(c.first);
    cb.push_back(c.second);
  }
  const double na = std::accumulate(ca.begin(), ca.end(), 0.0);
  const double nb = std::accumulate(cb.begin(), cb.end(), 0.0);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("chi_square_two_sample: empty sample");
  const PooledBins bins =
      pool_adjacent(ca, cb, min_bin_count, [](double x, double y) { return std::min(x, y); });
  // Unequal sample sizes: sum (sqrt(nb/na) a - sqrt(na/nb) b)^2 / (a + b).
  const double ra = std::sqrt(nb / na);
  const double rb = std::sqrt(na / nb);
  ChiSquareResult res;
  res.bins = bins.a.size();
  for (std::size_t i = 0; i < bins.a.size(); ++i) {
    const double sum = bins.a[i] + bins.b[i];
    if (sum == 0.0) continue;
    const double diff = ra * bins.a[i] - rb * bins.b[i];
    res.statistic += diff * diff / sum;
  }
  res.dof = static_cast<double>(res.bins) - 1.0;
  res.p_value = res.dof > 0.0 ? numerics::chi_square_sf(res.statistic, res.dof) : 1.0;
  return res;
}

TailSlope tau_tail_slope(std::span<const double> histogram, std::size_t k_min, std::size_t k_max) {
  if (k_min == 0 || k_min > k_max) throw std::invalid_argument("tau_tail_slope: bad k range");
  const double total = std::accumulate(histogram.begin(), histogram.end(), 0.0);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t k = k_min; k <= k_max && k < histogram.size(); ++k) {
    if (histogram[k] <= 0.0) continue;
    xs.push_back(std::log(static_cast<double>(k)));
    ys.push_back(std::log(histogram[k] / total));
  }
  if (xs.size() < kMinTailBins) {
    throw std::invalid_argument("tau_tail_slope: fewer than " + std::to_string(kMinTailBins) +
                                " occupied bins in range");
  }
  const auto m = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / m;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  TailSlope out;
  out.bins_used = xs.size();
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - out.intercept - out.slope * xs[i];
    rss += r * r;
  }
  out.standard_error = std::sqrt(rss / (m - 2.0) / sxx);
  return out;
}

ReplicateDigest digest_replicate(const ReplicateRecord& record, std::span<const double> times) {
  const std::size_t n = record.walk.length();
  const auto& reflected = record.decomposition.reflected;
  const auto& ladders = record.decomposition.ladder_epochs;
  ReplicateDigest d;
  d.stream_id = record.stream_id;
  d.n = n;
  d.times.assign(times.begin(), times.end());
  const double scale = walk_scale(n);
  for (std::size_t k = 0; k <= n; ++k) {
    const double gap = std::fabs(record.log_z[k] - static_cast<double>(reflected[k])) / scale;
    d.max_gap = std::max(d.max_gap, gap);
  }
  for (double t : times) {
    const std::size_t idx = time_index(n, t);
    d.indices.push_back(idx);
    d.log_z.push_back(record.log_z[idx]);
    d.reflected.push_back(static_cast<double>(reflected[idx]));
    d.log_ratio.push_back(record.log_z[idx] - static_cast<double>(reflected[idx]));
    const std::size_t excursion = record.decomposition.excursion_index[idx];
    const std::size_t ladder = excursion == 0 ? 0 : ladders[excursion - 1];
    d.last_ladder.push_back(ladder);
    d.ladder_z.push_back(record.z[ladder]);
  }
  d.ladder_count = ladders.size();
  if (!ladders.empty() && ladders.back() == n) {
    const std::size_t previous = ladders.size() >= 2 ? ladders[ladders.size() - 2] : 0;
    d.final_excursion_length = n - previous;
  } else {
    d.final_excursion_length = 0;
  }
  return d;
}

MarginalKsReport marginal_law_test(std::span<const ReplicateDigest> digests, double t) {
  if (digests.empty()) throw std::invalid_argument("marginal_law_test: no replicates");
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("marginal_law_test: t must lie in (0,1)");
  const std::size_t slot = find_time_slot(digests.front().times, t);
  if (slot == digests.front().times.size()) {
    throw std::invalid_argument("marginal_law_test: t not among the digest times");
  }
  MarginalKsReport rep;
  rep.t = t;
  rep.index = digests.front().indices[slot];
  if (rep.index < kMinTimeIndex) {
    throw std::invalid_argument("marginal_law_test: floor(n t) < 10 is degenerate");
  }
  std::vector<double> log_z;
  std::vector<double> refl;
  for (const auto& d : digests) {
    const double scale = walk_scale(d.n);
    log_z.push_back(d.log_z[slot] / scale);
    refl.push_back(d.reflected[slot] / scale);
  }
  const auto cdf = [t](double x) { return half_bridge_cdf(t, x); };
  rep.samples = digests.size();
  rep.ks_log_z = ks_statistic(log_z, cdf);
  rep.ks_reflected = ks_statistic(refl, cdf);
  const double root_n = std::sqrt(static_cast<double>(rep.samples));
  rep.p_log_z = numerics::kolmogorov_sf(root_n * rep.ks_log_z);
  rep.p_reflected = numerics::kolmogorov_sf(root_n * rep.ks_reflected);
  return rep;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty sample");
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, 0.5);
}

ExcursionDiagnostics excursion_diagnostics(std::span<const ReplicateDigest> digests, RngStream& rng,
                                           std::size_t bootstrap_rounds) {
  ExcursionDiagnostics out;
  if (digests.empty()) return out;
  out.times = digests.front().times;
  const std::size_t r = out.times.size();
  out.ladder_z.assign(r, {});
  std::vector<double> wx, wy, ax, ay;
  for (const auto& d : digests) {
    for (std::size_t a = 0; a < r; ++a) {
      out.ladder_z[a].push_back(d.ladder_z[a]);
      for (std::size_t b = a + 1; b < r; ++b) {
        if (d.indices[a] == d.indices[b]) continue;
        const bool same = d.last_ladder[a] == d.last_ladder[b];
        (same ? wx : ax).push_back(d.log_ratio[a]);
        (same ? wy : ay).push_back(d.log_ratio[b]);
      }
    }
  }
  out.within = correlation_with_ci(wx, wy, rng, bootstrap_rounds);
  out.across = correlation_with_ci(ax, ay, rng, bootstrap_rounds);

  if (r >= 2) {
    std::size_t sa = find_time_slot(out.times, 0.3);
    std::size_t sb = find_time_slot(out.times, 0.7);
    if (sa == r || sb == r) {
      sa = 0;
      sb = r - 1;
    }
    out.u_test_t_a = out.times[sa];
    out.u_test_t_b = out.times[sb];
    std::map<std::int64_t, std::uint64_t> ua;
    std::map<std::int64_t, std::uint64_t> ub;
    for (const auto& d : digests) {
      if (d.last_ladder[sa] == d.last_ladder[sb]) continue;
      ++ua[static_cast<std::int64_t>(std::llround(std::min(d.ladder_z[sa], 1e15)))];
      ++ub[static_cast<std::int64_t>(std::llround(std::min(d.ladder_z[sb], 1e15)))];
      ++out.u_test_samples;
    }
    if (out.u_test_samples > 0) out.u_test = chi_square_two_sample(ua, ub);
  }
  return out;
}

SurvivalConditionedWalk sample_survival_conditioned_walk(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_survival_conditioned_walk: n must be >= 1");
  static const double kE = std::exp(1.0);
  static const double kInvE = std::exp(-1.0);
  std::vector<int> steps(n);
  SurvivalConditionedWalk out;
  for (;;) {
    ++out.trials;
    // W_k = sum_{j<=k} e^{S_k - S_j} = e^{X_k} W_{k-1} + 1.
    double w = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const bool up = rng.bernoulli_half();
      steps[k] = up ? 1 : -1;
      w = (up ? kE : kInvE) * w + 1.0;
    }
    if (rng.uniform() * w < 1.0) {
      out.path = WalkPath::from_increments(steps);
      return out;
    }
  }
}

}  // namespace bpre
