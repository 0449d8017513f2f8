#include "bpre_cli/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "bpre/conditional_walk.hpp"

namespace bpre::cli {

namespace {

using nlohmann::json;

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

bool is_listed(const std::vector<std::string>& keys, const std::string& key) {
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

std::optional<OutputFormat> parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::kCsv;
  if (text == "json") return OutputFormat::kJson;
  return std::nullopt;
}

// Writes to `fallback` for "-", else to a file opened in binary mode so
// line endings stay LF on every platform.
template <typename Body>
int with_output(const RunConfig& config, std::ostream& fallback, Body body) {
  if (config.out == "-" || config.out.empty()) return body(fallback);
  std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open output file " + config.out);
  const int code = body(file);
  file.flush();
  if (!file) throw std::runtime_error("failed writing " + config.out);
  return code;
}

std::string format_count(double value) {
  if (value >= 0.0 && value < 0x1.0p53 && std::floor(value) == value) {
    return std::to_string(static_cast<std::uint64_t>(value));
  }
  return format_real(value);
}

json correlation_json(const CorrelationEstimate& c) {
  return {{"pairs", c.pairs},
          {"correlation", real_or_null(c.correlation)},
          {"ci_low", real_or_null(c.ci_low)},
          {"ci_high", real_or_null(c.ci_high)}};
}

}  // namespace

void validate(const RunConfig& config) {
  static const std::vector<std::string> kCommands = {"walk", "bpre", "ensemble", "validate"};
  if (!is_listed(kCommands, config.command)) {
    throw std::invalid_argument("unknown command '" + config.command + "'");
  }
  if (config.command == "validate") return;
  EnsembleConfig e = to_ensemble_config(config);
  // Only the ensemble reads the time grid.
  if (config.command != "ensemble") e.times.clear();
  validate_config(e);
}

void apply_json_config(RunConfig& config, const json& doc,
                       const std::vector<std::string>& explicit_keys) {
  if (!doc.is_object()) throw std::invalid_argument("config file must hold a JSON object");
  static const std::vector<std::string> kKnown = {
      "n",    "replicates", "seed", "times",      "threads",    "out",
      "format", "mode",     "tail_k_min", "tail_k_max", "bootstrap", "timing"};
  for (const auto& [key, value] : doc.items()) {
    if (!is_listed(kKnown, key)) throw std::invalid_argument("unknown config key '" + key + "'");
    if (is_listed(explicit_keys, key)) continue;
    try {
      if (key == "n") config.n = value.get<std::size_t>();
      if (key == "replicates") config.replicates = value.get<std::size_t>();
      if (key == "seed") config.master_seed = value.get<std::uint64_t>();
      if (key == "times") config.times = value.get<std::vector<double>>();
      if (key == "threads") config.threads = value.get<std::size_t>();
      if (key == "out") config.out = value.get<std::string>();
      if (key == "tail_k_min") config.tail_k_min = value.get<std::size_t>();
      if (key == "tail_k_max") config.tail_k_max = value.get<std::size_t>();
      if (key == "bootstrap") config.bootstrap_rounds = value.get<std::size_t>();
      if (key == "timing") config.timing = value.get<bool>();
      if (key == "format") {
        config.format = parse_format(value.get<std::string>());
        if (!config.format) throw std::invalid_argument("format must be csv or json");
      }
      if (key == "mode") {
        const auto mode = parse_ensemble_mode(value.get<std::string>());
        if (!mode) throw std::invalid_argument("mode must be spine or rejection");
        config.mode = *mode;
      }
    } catch (const json::exception& e) {
      throw std::invalid_argument("config key '" + key + "': " + e.what());
    }
  }
}

EnsembleConfig to_ensemble_config(const RunConfig& config) {
  EnsembleConfig e;
  e.n = config.n;
  e.replicates = config.replicates;
  e.master_seed = config.master_seed;
  e.times = config.times;
  e.threads = config.threads;
  e.mode = config.mode;
  e.tail_k_min = config.tail_k_min;
  e.tail_k_max = config.tail_k_max;
  e.bootstrap_rounds = config.bootstrap_rounds;
  return e;
}

std::string format_real(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

void write_walk_csv(std::ostream& os, const WalkPath& path) {
  os << "k,S\n";
  for (std::size_t k = 0; k <= path.length(); ++k) os << k << ',' << path[k] << '\n';
}

void write_bpre_csv(std::ostream& os, const ReplicateRecord& record) {
  const auto& ladders = record.decomposition.ladder_epochs;
  os << "k,S,Sr,Z,logZ,ratio,is_ladder\n";
  std::size_t next_ladder = 0;
  for (std::size_t k = 0; k <= record.walk.length(); ++k) {
    const bool ladder = next_ladder < ladders.size() && ladders[next_ladder] == k;
    if (ladder) ++next_ladder;
    os << k << ',' << record.walk[k] << ',' << record.decomposition.reflected[k] << ','
       << format_count(record.z[k]) << ',' << format_real(record.log_z[k]) << ','
       << format_real(record.ratios[k]) << ',' << (ladder ? 1 : 0) << '\n';
  }
}

json walk_to_json(const WalkPath& path) {
  return {{"schema", "bpre-walk"}, {"version", kReportVersion}, {"n", path.length()},
          {"S", path.positions()}};
}

json bpre_to_json(const ReplicateRecord& record) {
  json z = json::array();
  json log_z = json::array();
  json ratio = json::array();
  for (std::size_t k = 0; k < record.z.size(); ++k) {
    z.push_back(real_or_null(record.z[k]));
    log_z.push_back(real_or_null(record.log_z[k]));
    ratio.push_back(real_or_null(record.ratios[k]));
  }
  return {{"schema", "bpre-trajectory"},
          {"version", kReportVersion},
          {"n", record.walk.length()},
          {"seed", record.master_seed},
          {"stream_id", record.stream_id},
          {"S", record.walk.positions()},
          {"Sr", record.decomposition.reflected},
          {"Z", z},
          {"logZ", log_z},
          {"ratio", ratio},
          {"ladder_epochs", record.decomposition.ladder_epochs}};
}

json ensemble_report_to_json(const EnsembleReport& report, std::optional<double> wall_seconds) {
  const EnsembleConfig& c = report.config;
  // Thread count is deliberately absent: it must not change the bytes.
  json doc;
  doc["schema"] = kEnsembleSchemaId;
  doc["version"] = kReportVersion;
  doc["config"] = {{"n", c.n},
                   {"replicates", c.replicates},
                   {"seed", c.master_seed},
                   {"times", c.times},
                   {"mode", to_string(c.mode)},
                   {"tail_k_min", c.tail_k_min},
                   {"tail_k_max", c.tail_k_max},
                   {"bootstrap", c.bootstrap_rounds}};
  json per_time = json::array();
  for (const auto& k : report.per_time) {
    per_time.push_back({{"t", k.t},
                        {"index", k.index},
                        {"samples", k.samples},
                        {"ks_log_z", k.ks_log_z},
                        {"p_log_z", k.p_log_z},
                        {"ks_reflected", k.ks_reflected},
                        {"p_reflected", k.p_reflected}});
  }
  doc["per_time"] = per_time;
  if (report.max_gap) {
    doc["max_gap"] = {{"median", report.max_gap->median},
                      {"q90", report.max_gap->q90},
                      {"max", report.max_gap->max}};
  } else {
    doc["max_gap"] = nullptr;
  }
  json tail;
  tail["source"] = report.tau_tail.source;
  tail["k_min"] = c.tail_k_min;
  tail["k_max"] = c.tail_k_max;
  json hist = json::array();
  for (const auto& [k, count] : report.tau_tail.histogram) hist.push_back({k, count});
  tail["histogram"] = hist;
  tail["trials"] = report.tau_tail.trials;
  if (report.tau_tail.slope) {
    tail["slope"] = report.tau_tail.slope->slope;
    tail["standard_error"] = report.tau_tail.slope->standard_error;
    tail["intercept"] = report.tau_tail.slope->intercept;
    tail["bins_used"] = report.tau_tail.slope->bins_used;
    tail["error"] = nullptr;
  } else {
    tail["slope"] = nullptr;
    tail["standard_error"] = nullptr;
    tail["intercept"] = nullptr;
    tail["bins_used"] = 0;
    tail["error"] = report.tau_tail.slope_error;
  }
  doc["tau_tail"] = tail;
  if (report.excursions) {
    const ExcursionDiagnostics& e = *report.excursions;
    json ladder = json::array();
    for (std::size_t j = 0; j < e.times.size(); ++j) {
      const auto& u = e.ladder_z[j];
      const double ones = static_cast<double>(std::count(u.begin(), u.end(), 1.0));
      double mean = 0.0;
      for (double v : u) mean += v;
      mean /= static_cast<double>(u.size());
      ladder.push_back({{"t", e.times[j]},
                        {"samples", u.size()},
                        {"mean", real_or_null(mean)},
                        {"median", real_or_null(median(u))},
                        {"fraction_one", ones / static_cast<double>(u.size())}});
    }
    doc["excursions"] = {{"ladder_population", ladder},
                         {"within_excursion", correlation_json(e.within)},
                         {"across_excursion", correlation_json(e.across)},
                         {"u_law_test",
                          {{"t_a", e.u_test_t_a},
                           {"t_b", e.u_test_t_b},
                           {"samples", e.u_test_samples},
                           {"statistic", e.u_test.statistic},
                           {"dof", e.u_test.dof},
                           {"p_value", e.u_test.p_value},
                           {"bins", e.u_test.bins}}}};
  } else {
    doc["excursions"] = nullptr;
  }
  doc["mean_ladder_count"] = report.mean_ladder_count;
  if (wall_seconds) doc["wall_time_seconds"] = *wall_seconds;
  return doc;
}

json validation_to_json(const std::vector<CheckResult>& checks, std::uint64_t seed) {
  json list = json::array();
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.passed;
    list.push_back({{"name", c.name},
                    {"description", c.description},
                    {"statistic", real_or_null(c.statistic)},
                    {"threshold", c.threshold},
                    {"relation", c.relation},
                    {"passed", c.passed},
                    {"detail", c.detail}});
  }
  return {{"schema", kValidateSchemaId},
          {"version", kReportVersion},
          {"seed", seed},
          {"passed", all},
          {"checks", list}};
}

int cmd_walk(const RunConfig& config, std::ostream& os) {
  validate(config);
  RngStream rng(config.master_seed, 0);
  const WalkPath path = sample_conditioned_min_at_end(config.n, rng);
  return with_output(config, os, [&](std::ostream& out) {
    if (config.format.value_or(OutputFormat::kCsv) == OutputFormat::kCsv) {
      write_walk_csv(out, path);
    } else {
      out << walk_to_json(path).dump(2) << '\n';
    }
    return kExitOk;
  });
}

int cmd_bpre(const RunConfig& config, std::ostream& os) {
  validate(config);
  RngStream rng(config.master_seed, 0);
  const WalkPath path = sample_conditioned_min_at_end(config.n, rng);
  const ReplicateRecord record = sample_conditioned_bpre(path, rng);
  std::clog << "bpre: n=" << config.n
            << " ladder_epochs=" << record.decomposition.ladder_epochs.size() << '\n';
  return with_output(config, os, [&](std::ostream& out) {
    if (config.format.value_or(OutputFormat::kCsv) == OutputFormat::kCsv) {
      write_bpre_csv(out, record);
    } else {
      out << bpre_to_json(record).dump(2) << '\n';
    }
    return kExitOk;
  });
}

int cmd_ensemble(const RunConfig& config, std::ostream& os) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const EnsembleReport report = run_ensemble(to_ensemble_config(config));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return with_output(config, os, [&](std::ostream& out) {
    if (config.format.value_or(OutputFormat::kJson) == OutputFormat::kJson) {
      const auto wall = config.timing ? std::optional<double>(seconds) : std::nullopt;
      out << ensemble_report_to_json(report, wall).dump(2) << '\n';
    } else {
      out << "t,index,samples,ks_log_z,p_log_z,ks_reflected,p_reflected\n";
      for (const auto& k : report.per_time) {
        out << format_real(k.t) << ',' << k.index << ',' << k.samples << ','
            << format_real(k.ks_log_z) << ',' << format_real(k.p_log_z) << ','
            << format_real(k.ks_reflected) << ',' << format_real(k.p_reflected) << '\n';
      }
    }
    return kExitOk;
  });
}

int cmd_validate(const RunConfig& config, std::ostream& os, const ValidationOptions& base) {
  validate(config);
  ValidationOptions options = base;
  options.master_seed = config.master_seed;
  const std::vector<CheckResult> checks = run_validation(options);
  const bool all = std::all_of(checks.begin(), checks.end(),
                               [](const CheckResult& c) { return c.passed; });
  with_output(config, os, [&](std::ostream& out) {
    if (config.format.value_or(OutputFormat::kJson) == OutputFormat::kJson) {
      out << validation_to_json(checks, options.master_seed).dump(2) << '\n';
    } else {
      out << "name,statistic,threshold,relation,passed\n";
      for (const auto& c : checks) {
        out << c.name << ',' << format_real(c.statistic) << ',' << format_real(c.threshold) << ','
            << c.relation << ',' << (c.passed ? 1 : 0) << '\n';
      }
    }
    return kExitOk;
  });
  return all ? kExitOk : kExitCheckFailed;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditioned branching processes in random environment: sampling and checks",
               "bpre"};
  app.fallthrough();
  RunConfig config;
  std::string format_text;
  std::string mode_text;
  std::string config_path;
  const std::vector<std::pair<std::string, CLI::Option*>> options = {
      {"n", app.add_option("--n", config.n, "Horizon (number of generations)")},
      {"replicates", app.add_option("--replicates", config.replicates, "Ensemble size")},
      {"seed", app.add_option("--seed", config.master_seed, "64-bit master seed")},
      {"times", app.add_option("--times", config.times, "Comma-separated times in (0,1)")
                    ->delimiter(',')},
      {"threads", app.add_option("--threads", config.threads, "Worker threads")},
      {"out", app.add_option("--out", config.out, "Output path, '-' for stdout")},
      {"format", app.add_option("--format", format_text, "csv or json")},
      {"mode", app.add_option("--mode", mode_text, "Ensemble mode: spine or rejection")},
      {"tail_k_min", app.add_option("--tail-k-min", config.tail_k_min, "Tail fit lower k")},
      {"tail_k_max", app.add_option("--tail-k-max", config.tail_k_max, "Tail fit upper k")},
      {"bootstrap", app.add_option("--bootstrap", config.bootstrap_rounds, "Bootstrap rounds")},
      {"timing", app.add_flag("--timing", config.timing, "Add wall time to the report")},
  };
  app.add_option("--config", config_path, "JSON file with the same keys as the flags");

  app.add_subcommand("walk", "Sample one walk with its minimum at the end (CSV k,S)");
  app.add_subcommand("bpre", "Sample one conditioned population trajectory");
  app.add_subcommand("ensemble", "Run replicates and report limit-law statistics");
  app.add_subcommand("validate", "Run the oracle and invariant checks");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalidConfig;
  }

  try {
    config.command = app.get_subcommands().front()->get_name();
    std::vector<std::string> explicit_keys;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) explicit_keys.push_back(key);
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot read config file " + config_path);
      json doc;
      try {
        doc = json::parse(in);
      } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config file: ") + e.what());
      }
      apply_json_config(config, doc, explicit_keys);
    }
    if (!format_text.empty()) {
      config.format = parse_format(format_text);
      if (!config.format) throw std::invalid_argument("--format must be csv or json");
    }
    if (!mode_text.empty()) {
      const auto mode = parse_ensemble_mode(mode_text);
      if (!mode) throw std::invalid_argument("--mode must be spine or rejection");
      config.mode = *mode;
    }
    validate(config);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\nRun 'bpre --help' for usage.\n";
    return kExitInvalidConfig;
  }

  try {
    if (config.command == "walk") return cmd_walk(config, out);
    if (config.command == "bpre") return cmd_bpre(config, out);
    if (config.command == "ensemble") return cmd_ensemble(config, out);
    return cmd_validate(config, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace bpre::cli
