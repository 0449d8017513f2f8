#include "bpre/conditional_walk.hpp"

#include <algorithm>
#include <stdexcept>

namespace bpre {

WalkPath WalkPath::from_positions(std::vector<std::int64_t> positions) {
  if (positions.empty() || positions.front() != 0) {
    throw std::invalid_argument("WalkPath: positions must start at 0");
  }
  for (std::size_t k = 1; k < positions.size(); ++k) {
    const std::int64_t step = positions[k] - positions[k - 1];
    if (step != 1 && step != -1) throw std::invalid_argument("WalkPath: steps must be +-1");
  }
  return WalkPath(std::move(positions));
}

WalkPath WalkPath::from_increments(std::span<const int> increments) {
  std::vector<std::int64_t> positions(increments.size() + 1, 0);
  for (std::size_t k = 0; k < increments.size(); ++k) {
    if (increments[k] != 1 && increments[k] != -1) {
      throw std::invalid_argument("WalkPath: steps must be +-1");
    }
    positions[k + 1] = positions[k] + increments[k];
  }
  return WalkPath(std::move(positions));
}

std::vector<int> WalkPath::increments() const {
  std::vector<int> out(length());
  for (std::size_t k = 1; k <= length(); ++k) out[k - 1] = increment(k);
  return out;
}

std::int64_t WalkPath::running_max() const {
  if (length() == 0) return 0;
  return *std::max_element(positions_.begin() + 1, positions_.end());
}

double conditioned_up_probability(std::size_t n, std::size_t k, std::int64_t x,
                                  StayNegativeFn stay_negative) {
  if (x + 1 >= 0) return 0.0;
  const auto remaining = static_cast<std::int64_t>(n - k);
  const double num = stay_negative(remaining, x + 1);
  const double den = stay_negative(remaining + 1, x);
  return std::clamp(0.5 * num / den, 0.0, 1.0);
}

WalkPath sample_conditioned_below_zero(std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("sample_conditioned_below_zero: n must be >= 1");
  std::vector<int> steps(n);
  std::int64_t x = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double up = conditioned_up_probability(n, k, x);
    // Always consume one uniform per step so streams stay aligned.
    const int step = rng.uniform() < up ? 1 : -1;
    steps[k - 1] = step;
    x += step;
  }
  return WalkPath::from_increments(steps);
}

WalkPath dualize(const WalkPath& path) {
  const std::size_t n = path.length();
  std::vector<std::int64_t> dual(n + 1);
  for (std::size_t i = 0; i <= n; ++i) dual[n - i] = path[n] - path[i];
  return WalkPath::from_positions(std::move(dual));
}

PathDecomposition decompose(const WalkPath& path) {
  const std::size_t n = path.length();
  PathDecomposition out;
  out.reflected.resize(n + 1);
  out.excursion_index.resize(n + 1);
  std::int64_t running_min = path[0];
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0 && path[k] < running_min) {
      running_min = path[k];
      out.ladder_epochs.push_back(k);
    }
    out.reflected[k] = path[k] - running_min;
    out.excursion_index[k] = out.ladder_epochs.size();
  }
  return out;
}

std::size_t first_minimum_epoch(const WalkPath& path) {
  const auto& pos = path.positions();
  return static_cast<std::size_t>(std::min_element(pos.begin(), pos.end()) - pos.begin());
}

std::uint32_t encode_path(const WalkPath& path) {
  if (path.length() > 32) throw std::invalid_argument("encode_path: n > 32");
  std::uint32_t code = 0;
  for (std::size_t k = 1; k <= path.length(); ++k) {
    if (path.increment(k) > 0) code |= (1U << (k - 1));
  }
  return code;
}

WalkPath decode_path(std::uint32_t code, std::size_t n) {
  if (n > 32) throw std::invalid_argument("decode_path: n > 32");
  std::vector<int> steps(n);
  for (std::size_t k = 0; k < n; ++k) steps[k] = ((code >> k) & 1U) != 0 ? 1 : -1;
  return WalkPath::from_increments(steps);
}

WalkRejectionResult rejection_oracle_walk(std::size_t n, std::uint64_t num_accepted,
                                          RngStream& rng) {
  if (n == 0 || n > kMaxRejectionWalkLength) {
    throw std::invalid_argument("rejection_oracle_walk: n must lie in [1, 16]");
  }
  WalkRejectionResult result;
  result.n = n;
  while (result.accepted < num_accepted) {
    ++result.trials;
    std::uint32_t code = 0;
    std::int64_t x = 0;
    bool ok = true;
    for (std::size_t k = 0; k < n; ++k) {
      const bool up = rng.bernoulli_half();
      if (up) code |= (1U << k);
      x += up ? 1 : -1;
      if (x >= 0) ok = false;
    }
    if (!ok) continue;
    ++result.accepted;
    ++result.counts[code];
  }
  return result;
}

}  // namespace bpre
