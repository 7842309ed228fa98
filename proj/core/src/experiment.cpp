#include "slowent/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "slowent/error.hpp"

#ifndef SLOWENT_VERSION
#define SLOWENT_VERSION "0.0.0"
#endif

namespace slowent {
namespace {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(cells[i]);
  }
  return out + "\n";
}

std::string string_field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw ConfigError(std::string("generator: \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

std::uint64_t parse_seed(const nlohmann::json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    try {
      std::size_t used = 0;
      const auto v = std::stoull(s, &used, 0);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError("\"seed\" must be an unsigned 64-bit integer");
}

}  // namespace

bool ExperimentReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return !c.asserted || c.pass; });
}

nlohmann::json to_json(const ExperimentReport& r, bool include_wall_clock) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) {
    nlohmann::json row = {{"name", c.name},
                          {"value", c.value},
                          {"relation", c.relation},
                          {"asserted", c.asserted},
                          {"verdict", c.pass ? "pass" : "fail"}};
    row["bound"] = c.bound ? nlohmann::json(*c.bound) : nlohmann::json(nullptr);
    checks.push_back(std::move(row));
  }
  nlohmann::json out = {{"experiment", r.experiment},
                        {"tool_version", version()},
                        {"seed", r.seed},
                        {"config", r.config},
                        {"checks", checks},
                        {"details", r.details},
                        {"verdict", r.pass() ? "pass" : "fail"}};
  if (include_wall_clock) out["wall_clock_seconds"] = r.wall_clock_seconds;
  return out;
}

std::string checks_csv(const ExperimentReport& r) {
  std::string out = "check,value,bound,relation,asserted,verdict\n";
  for (const auto& c : r.checks) {
    out += join_row({c.name, csv_number(c.value), c.bound ? csv_number(*c.bound) : "",
                     c.relation, c.asserted ? "true" : "false", c.pass ? "pass" : "fail"});
  }
  return out;
}

std::string table_csv(const Table& t) {
  std::string out = join_row(t.header);
  for (const auto& row : t.rows) out += join_row(row);
  return out;
}

ProcessGenerator generator_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("generator must be a JSON object");
  const std::string kind = string_field(j, "kind");
  try {
    if (kind == "bernoulli") {
      return ProcessGenerator::bernoulli(j.value("p", 0.5));
    }
    if (kind == "sturmian") {
      const auto alpha_it = j.find("alpha");
      RotationNumber alpha = RotationNumber::golden();
      if (alpha_it != j.end()) {
        if (alpha_it->is_string()) {
          alpha = RotationNumber::parse(alpha_it->get<std::string>());
        } else if (alpha_it->is_number()) {
          std::ostringstream os;
          os.precision(17);
          os << alpha_it->get<double>();
          alpha = RotationNumber::from_decimal(os.str());
        } else {
          throw ConfigError("sturmian: \"alpha\" must be a string or a number");
        }
      }
      std::optional<double> phase = 0.0;
      if (auto it = j.find("phase"); it != j.end()) {
        if (it->is_null()) {
          phase.reset();
        } else {
          phase = it->get<double>();
        }
      }
      return ProcessGenerator::sturmian(alpha, phase);
    }
    if (kind == "periodic") {
      return ProcessGenerator::periodic(string_field(j, "pattern"));
    }
    if (kind == "substitution") {
      const auto rules = j.find("rules");
      if (rules == j.end() || !rules->is_object()) {
        throw ConfigError("substitution: \"rules\" must map \"0\" and \"1\" to words");
      }
      return ProcessGenerator::substitution(string_field(*rules, "0"), string_field(*rules, "1"));
    }
    if (kind == "product") {
      if (!j.contains("left") || !j.contains("right")) {
        throw ConfigError("product: needs \"left\" and \"right\" generators");
      }
      std::array<std::uint8_t, 4> table{0, 1, 1, 0};
      if (j.contains("combiner")) {
        const auto text = string_field(j, "combiner");
        if (text.size() != 4 || text.find_first_not_of("01") != std::string::npos) {
          throw ConfigError("product: \"combiner\" must be a 4-character 0/1 string");
        }
        for (int i = 0; i < 4; ++i) table[i] = static_cast<std::uint8_t>(text[i] - '0');
      }
      return ProcessGenerator::product(generator_from_json(j["left"]), generator_from_json(j["right"]),
                                       table);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator: ") + e.what());
  }
  throw ConfigError("unknown generator kind \"" + kind + "\"");
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"complexity", "cover",         "dbar",
                                                 "vwb",        "dominance_gap", "lemma_suite"};
  return names;
}

ExperimentReport run_experiment(const std::string& experiment, const nlohmann::json& config,
                                std::optional<std::uint64_t> seed_override) {
  if (!config.is_object()) throw ConfigError("config must be a JSON object");
  if (auto it = config.find("experiment"); it != config.end()) {
    if (!it->is_string() || it->get<std::string>() != experiment) {
      throw ConfigError("config names experiment " + it->dump() + " but \"" + experiment + "\" was requested");
    }
  }
  std::uint64_t seed = 1;
  if (auto it = config.find("seed"); it != config.end()) seed = parse_seed(*it);
  if (seed_override) seed = *seed_override;

  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  try {
    if (experiment == "complexity") {
      report = run_complexity(config, seed);
    } else if (experiment == "cover") {
      report = run_cover(config, seed);
    } else if (experiment == "dbar") {
      report = run_dbar(config, seed);
    } else if (experiment == "vwb") {
      report = run_vwb(config, seed);
    } else if (experiment == "dominance_gap") {
      report = run_dominance_gap(config, seed);
    } else if (experiment == "lemma_suite") {
      report = run_lemma_suite(config, seed);
    } else {
      throw ConfigError("unknown experiment \"" + experiment + "\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  report.experiment = experiment;
  report.seed = seed;
  report.config = config;
  report.config["experiment"] = experiment;
  report.config["seed"] = seed;
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string version() { return SLOWENT_VERSION; }

}  // namespace slowent
