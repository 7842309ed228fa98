#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "slowent/models.hpp"

namespace slowent {

/// One verdict row. Unasserted rows are reported but never fail a run.
struct Check {
  std::string name;
  double value = 0.0;
  std::optional<double> bound;
  std::string relation;  ///< "<", "<=", ">", "==", "~=" (within tolerance), or "info"
  bool pass = true;
  bool asserted = true;
};

/// Flat table emitted next to the report (CSV contract of the producing module).
struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentReport {
  std::string experiment;
  nlohmann::json config;  ///< echo, with the effective seed filled in
  std::uint64_t seed = 0;
  std::vector<Check> checks;
  nlohmann::json details = nlohmann::json::object();
  std::vector<Table> tables;
  double wall_clock_seconds = 0.0;

  bool pass() const;
};

/// Report document; the "wall_clock_seconds" key is the only field that
/// varies between identical runs and is omitted when include_wall_clock is
/// false.
nlohmann::json to_json(const ExperimentReport& r, bool include_wall_clock = true);

/// "check,value,bound,relation,asserted,verdict" rows, one per check.
std::string checks_csv(const ExperimentReport& r);
std::string table_csv(const Table& t);

/// Parses a generator description, e.g.
///   {"kind": "sturmian", "alpha": "golden", "phase": 0}
///   {"kind": "bernoulli", "p": 0.5}
///   {"kind": "periodic", "pattern": "01"}
///   {"kind": "substitution", "rules": {"0": "01", "1": "0"}}
///   {"kind": "product", "left": {...}, "right": {...}, "combiner": "0110"}
/// Throws ConfigError on malformed input.
ProcessGenerator generator_from_json(const nlohmann::json& j);

const std::vector<std::string>& experiment_names();

/// Runs `experiment` on `config` (a JSON object; its "experiment" key, if
/// present, must match). seed_override replaces the config's "seed".
/// Throws slowent::Error subclasses on precondition and config errors.
ExperimentReport run_experiment(const std::string& experiment, const nlohmann::json& config,
                                std::optional<std::uint64_t> seed_override = std::nullopt);

ExperimentReport run_complexity(const nlohmann::json& config, std::uint64_t seed);
ExperimentReport run_cover(const nlohmann::json& config, std::uint64_t seed);
ExperimentReport run_dbar(const nlohmann::json& config, std::uint64_t seed);
ExperimentReport run_vwb(const nlohmann::json& config, std::uint64_t seed);
ExperimentReport run_dominance_gap(const nlohmann::json& config, std::uint64_t seed);
ExperimentReport run_lemma_suite(const nlohmann::json& config, std::uint64_t seed);

std::string version();

}  // namespace slowent
