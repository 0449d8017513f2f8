#ifndef BPRE_CONDITIONAL_WALK_HPP
#define BPRE_CONDITIONAL_WALK_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "bpre/prob_kernel.hpp"
#include "bpre/rng.hpp"

namespace bpre {

/// A simple +-1 lattice path S_0 = 0, S_1, ..., S_n.
class WalkPath {
 public:
  WalkPath() : positions_{0} {}

  /// Throws std::invalid_argument unless positions[0] == 0 and every step is +-1.
  static WalkPath from_positions(std::vector<std::int64_t> positions);
  static WalkPath from_increments(std::span<const int> increments);

  std::size_t length() const noexcept { return positions_.size() - 1; }
  const std::vector<std::int64_t>& positions() const noexcept { return positions_; }
  std::int64_t operator[](std::size_t k) const { return positions_[k]; }

  /// X_k = S_k - S_{k-1}, for 1 <= k <= n.
  int increment(std::size_t k) const {
    return static_cast<int>(positions_[k] - positions_[k - 1]);
  }
  std::vector<int> increments() const;

  /// max(S_1, ..., S_n); 0 for the empty path by convention.
  std::int64_t running_max() const;

  bool operator==(const WalkPath&) const = default;

 private:
  explicit WalkPath(std::vector<std::int64_t> positions) : positions_(std::move(positions)) {}
  std::vector<std::int64_t> positions_;
};

/// Reflection at the running minimum and the strict descending ladder structure.
struct PathDecomposition {
  /// S_k - min_{j <= k} S_j.
  std::vector<std::int64_t> reflected;
  /// k >= 1 with S_k < min_{j < k} S_j, increasing.
  std::vector<std::size_t> ladder_epochs;
  /// Number of ladder epochs <= k; constant along each excursion.
  std::vector<std::size_t> excursion_index;
};

/// Probability that the walk conditioned on {M_n < 0} steps up at step k
/// from position x = S_{k-1}. Zero when x + 1 >= 0.
double conditioned_up_probability(std::size_t n, std::size_t k, std::int64_t x,
                                  StayNegativeFn stay_negative = stay_negative_prob);

/// Exact draw of (S_0..S_n) given max(S_1..S_n) < 0, n >= 1.
WalkPath sample_conditioned_below_zero(std::size_t n, RngStream& rng);

/// S^_{n-i} = S_n - S_i. Maps {M_n < 0} onto {S_n < min(S_0..S_{n-1})}; an involution.
WalkPath dualize(const WalkPath& path);

/// Draw of a path conditioned to attain its minimum strictly at the end.
inline WalkPath sample_conditioned_min_at_end(std::size_t n, RngStream& rng) {
  return dualize(sample_conditioned_below_zero(n, rng));
}

PathDecomposition decompose(const WalkPath& path);

/// tau_n = min{k : S_k = min(S_0..S_n)}.
std::size_t first_minimum_epoch(const WalkPath& path);

/// Bit k-1 set iff step k is up. Requires n <= 32.
std::uint32_t encode_path(const WalkPath& path);
WalkPath decode_path(std::uint32_t code, std::size_t n);

inline constexpr std::size_t kMaxRejectionWalkLength = 16;

struct WalkRejectionResult {
  std::size_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  /// encode_path(path) -> count of accepted paths.
  std::map<std::uint32_t, std::uint64_t> counts;
};

/// Draws unconditioned walks until `num_accepted` satisfy M_n < 0.
/// Throws std::invalid_argument for n == 0 or n > kMaxRejectionWalkLength.
WalkRejectionResult rejection_oracle_walk(std::size_t n, std::uint64_t num_accepted,
                                          RngStream& rng);

}  // namespace bpre

#endif  // BPRE_CONDITIONAL_WALK_HPP
