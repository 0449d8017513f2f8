#ifndef BPRE_ENSEMBLE_HPP
#define BPRE_ENSEMBLE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bpre/stats.hpp"

namespace bpre {

enum class EnsembleMode {
  /// Conditioned walk (minimum at n) plus spine sampling of the population.
  kSpine,
  /// Walk conditioned on survival under the original law, by rejection.
  kRejection,
};

const char* to_string(EnsembleMode mode);
std::optional<EnsembleMode> parse_ensemble_mode(const std::string& text);

struct EnsembleConfig {
  std::size_t n = 1000;
  std::size_t replicates = 100;
  std::uint64_t master_seed = 1;
  std::vector<double> times{0.1, 0.3, 0.5, 0.7, 0.9};
  std::size_t threads = 1;
  EnsembleMode mode = EnsembleMode::kSpine;
  std::size_t tail_k_min = 2;
  std::size_t tail_k_max = 50;
  std::size_t bootstrap_rounds = 200;
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate_config(const EnsembleConfig& config);

struct TauTailReport {
  /// "annealed_rejection" (exact n - tau_n) or "final_excursion_proxy".
  std::string source;
  /// Sparse (k, count) pairs, k increasing.
  std::vector<std::pair<std::size_t, std::uint64_t>> histogram;
  std::optional<TailSlope> slope;
  std::string slope_error;
  std::uint64_t trials = 0;
};

struct GapSummary {
  double median = 0.0;
  double q90 = 0.0;
  double max = 0.0;
};

struct EnsembleReport {
  EnsembleConfig config;
  std::vector<MarginalKsReport> per_time;
  std::optional<GapSummary> max_gap;
  TauTailReport tau_tail;
  std::optional<ExcursionDiagnostics> excursions;
  double mean_ladder_count = 0.0;
};

/// Runs body(i) for i in [0, count) on `threads` workers. Exceptions from a
/// worker are rethrown (first one by index) after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

/// Replicate i draws from RngStream(master_seed, i); results are merged in
/// replicate order, so the report does not depend on `threads`.
EnsembleReport run_ensemble(const EnsembleConfig& config);

/// Stream id offset used for the bootstrap resampling stream.
inline constexpr std::uint64_t kBootstrapStreamId = 0xB0075742A9ULL;

}  // namespace bpre

#endif  // BPRE_ENSEMBLE_HPP
