#include "bpre/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace bpre {

const char* to_string(EnsembleMode mode) {
  switch (mode) {
    case EnsembleMode::kSpine:
      return "spine";
    case EnsembleMode::kRejection:
      return "rejection";
  }
  return "unknown";
}

std::optional<EnsembleMode> parse_ensemble_mode(const std::string& text) {
  if (text == "spine") return EnsembleMode::kSpine;
  if (text == "rejection") return EnsembleMode::kRejection;
  return std::nullopt;
}

void validate_config(const EnsembleConfig& config) {
  if (config.n < 2) throw std::invalid_argument("n must be >= 2");
  if (config.replicates < 1) throw std::invalid_argument("replicates must be >= 1");
  if (config.threads < 1) throw std::invalid_argument("threads must be >= 1");
  for (std::size_t j = 0; j < config.times.size(); ++j) {
    const double t = config.times[j];
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("times must lie in (0,1)");
    if (j > 0 && !(t > config.times[j - 1])) {
      throw std::invalid_argument("times must be strictly increasing");
    }
    if (time_index(config.n, t) < kMinTimeIndex) {
      throw std::invalid_argument("time " + std::to_string(t) + " gives floor(n t) < " +
                                  std::to_string(kMinTimeIndex));
    }
  }
  if (config.tail_k_min < 1 || config.tail_k_min > config.tail_k_max) {
    throw std::invalid_argument("tail k range must satisfy 1 <= k_min <= k_max");
  }
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

namespace {

TauTailReport summarize_tail(const std::vector<std::size_t>& lengths, std::size_t n,
                             const EnsembleConfig& config) {
  TauTailReport tail;
  std::vector<double> dense(n + 1, 0.0);
  for (std::size_t k : lengths) dense[k] += 1.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (dense[k] > 0.0) tail.histogram.emplace_back(k, static_cast<std::uint64_t>(dense[k]));
  }
  try {
    tail.slope = tau_tail_slope(dense, config.tail_k_min, config.tail_k_max);
  } catch (const std::invalid_argument& e) {
    tail.slope_error = e.what();
  }
  return tail;
}

EnsembleReport run_spine(const EnsembleConfig& config) {
  std::vector<ReplicateDigest> digests(config.replicates);
  parallel_for(config.replicates, config.threads, [&](std::size_t i) {
    RngStream rng(config.master_seed, i);
    const WalkPath path = sample_conditioned_min_at_end(config.n, rng);
    const ReplicateRecord record = sample_conditioned_bpre(path, rng);
    digests[i] = digest_replicate(record, config.times);
  });

  EnsembleReport report;
  report.config = config;
  for (double t : config.times) {
    report.per_time.push_back(marginal_law_test(digests, t));
  }
  std::vector<double> gaps;
  std::vector<std::size_t> lengths;
  double ladder_sum = 0.0;
  for (const auto& d : digests) {
    gaps.push_back(d.max_gap);
    lengths.push_back(d.final_excursion_length);
    ladder_sum += static_cast<double>(d.ladder_count);
  }
  std::sort(gaps.begin(), gaps.end());
  GapSummary gap;
  gap.median = median(gaps);
  gap.q90 = gaps[static_cast<std::size_t>(0.9 * static_cast<double>(gaps.size() - 1))];
  gap.max = gaps.back();
  report.max_gap = gap;
  report.mean_ladder_count = ladder_sum / static_cast<double>(digests.size());
  report.tau_tail = summarize_tail(lengths, config.n, config);
  report.tau_tail.source = "final_excursion_proxy";
  RngStream boot(config.master_seed, kBootstrapStreamId);
  report.excursions = excursion_diagnostics(digests, boot, config.bootstrap_rounds);
  return report;
}

EnsembleReport run_rejection(const EnsembleConfig& config) {
  std::vector<std::size_t> lengths(config.replicates);
  std::vector<std::uint64_t> trials(config.replicates);
  parallel_for(config.replicates, config.threads, [&](std::size_t i) {
    RngStream rng(config.master_seed, i);
    const SurvivalConditionedWalk draw = sample_survival_conditioned_walk(config.n, rng);
    lengths[i] = config.n - first_minimum_epoch(draw.path);
    trials[i] = draw.trials;
  });
  EnsembleReport report;
  report.config = config;
  report.tau_tail = summarize_tail(lengths, config.n, config);
  report.tau_tail.source = "annealed_rejection";
  for (std::uint64_t t : trials) report.tau_tail.trials += t;
  return report;
}

}  // namespace

EnsembleReport run_ensemble(const EnsembleConfig& config) {
  validate_config(config);
  return config.mode == EnsembleMode::kSpine ? run_spine(config) : run_rejection(config);
}

}  // namespace bpre
