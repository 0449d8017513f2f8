#ifndef BPRE_CLI_COMMANDS_HPP
#define BPRE_CLI_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bpre/ensemble.hpp"
#include "bpre/geiger.hpp"
#include "bpre/validation.hpp"

namespace bpre::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitRuntimeError = 3;

inline constexpr const char* kEnsembleSchemaId = "bpre-ensemble-report";
inline constexpr const char* kValidateSchemaId = "bpre-validate-report";
inline constexpr int kReportVersion = 1;

enum class OutputFormat { kCsv, kJson };

struct RunConfig {
  std::string command;
  std::size_t n = 1000;
  std::size_t replicates = 100;
  std::uint64_t master_seed = 20110601;
  std::vector<double> times{0.1, 0.3, 0.5, 0.7, 0.9};
  std::size_t threads = 1;
  std::string out = "-";
  std::optional<OutputFormat> format;
  EnsembleMode mode = EnsembleMode::kSpine;
  std::size_t tail_k_min = 2;
  std::size_t tail_k_max = 50;
  std::size_t bootstrap_rounds = 200;
  bool timing = false;
};

/// Throws std::invalid_argument naming the first violated constraint.
void validate(const RunConfig& config);

/// Applies keys of a JSON config object ("n", "replicates", "seed",
/// "times", "threads", "out", "format", "mode", "tail_k_min", "tail_k_max",
/// "bootstrap", "timing") that are not listed in `explicit_keys`.
void apply_json_config(RunConfig& config, const nlohmann::json& doc,
                       const std::vector<std::string>& explicit_keys);

EnsembleConfig to_ensemble_config(const RunConfig& config);

/// Shortest decimal that round-trips to the same double.
std::string format_real(double value);

void write_walk_csv(std::ostream& os, const WalkPath& path);
void write_bpre_csv(std::ostream& os, const ReplicateRecord& record);

nlohmann::json walk_to_json(const WalkPath& path);
nlohmann::json bpre_to_json(const ReplicateRecord& record);
nlohmann::json ensemble_report_to_json(const EnsembleReport& report,
                                       std::optional<double> wall_seconds = std::nullopt);
nlohmann::json validation_to_json(const std::vector<CheckResult>& checks, std::uint64_t seed);

/// The commands write to `os` and return a process exit code.
int cmd_walk(const RunConfig& config, std::ostream& os);
int cmd_bpre(const RunConfig& config, std::ostream& os);
int cmd_ensemble(const RunConfig& config, std::ostream& os);
int cmd_validate(const RunConfig& config, std::ostream& os,
                 const ValidationOptions& base = ValidationOptions{});

/// Full command-line entry point; returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bpre::cli

#endif  // BPRE_CLI_COMMANDS_HPP
