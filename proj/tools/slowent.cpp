// slowent: batch runner for the desk-scale experiments.
//
//   slowent <experiment> --config <path> [--seed <u64>] [--out <dir>]
//   slowent sample --config <generator.json> --length <L> [--seed <u64>] --out <dir>
//
// Exit status: 0 when every asserted check passes, 2 on precondition or
// configuration errors, 3 when an asserted check fails.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "slowent/error.hpp"
#include "slowent/experiment.hpp"
#include "slowent/io.hpp"
#include "slowent/models.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitPrecondition = 2;
constexpr int kExitVerdict = 3;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw slowent::ConfigError("cannot open config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw slowent::ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw slowent::ConfigError("cannot write " + path.string());
  out << text;
}

void print_summary(const slowent::ExperimentReport& r) {
  for (const auto& c : r.checks) {
    std::printf("%-4s %-48s value=%.6g", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value);
    if (c.bound) std::printf(" %s %.6g", c.relation.c_str(), *c.bound);
    std::printf("%s\n", c.asserted ? "" : "  (not asserted)");
  }
  std::printf("%s: %s (%.2f s)\n", r.experiment.c_str(), r.pass() ? "pass" : "fail", r.wall_clock_seconds);
}

int run_sample(const std::string& config_path, std::size_t length, std::uint64_t seed, const std::string& out) {
  const auto g = slowent::generator_from_json(load_json(config_path));
  if (length == 0) throw slowent::ConfigError("--length must be positive");
  if (out.empty()) throw slowent::ConfigError("sample needs --out");
  const auto orbit = slowent::sample_orbit(g, length, seed);
  fs::create_directories(out);
  slowent::io::write_packed_file(fs::path(out) / "orbit.slw1", std::span(&orbit.symbols, 1));
  slowent::io::write_text_file(fs::path(out) / "orbit.txt", std::span(&orbit.symbols, 1));
  std::printf("%s: %zu symbols, seed %llu\n", orbit.generator_id.c_str(), length,
              static_cast<unsigned long long>(seed));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slowent: slow-entropy separation and relative VWB experiments"};
  app.set_version_flag("--version", slowent::version());

  std::string experiment;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t length = 0;

  std::string names = "sample";
  for (const auto& n : slowent::experiment_names()) names += ", " + n;
  app.add_option("experiment", experiment, "One of: " + names)->required();
  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--seed", seed, "Overrides the config seed");
  app.add_option("--out", out_dir, "Directory for report.json and CSV tables");
  app.add_option("--length", length, "Orbit length (sample only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitPrecondition;
  }

  try {
    if (experiment == "sample") return run_sample(config_path, length, seed.value_or(1), out_dir);

    const auto config = load_json(config_path);
    const auto report = slowent::run_experiment(experiment, config, seed);
    if (out_dir.empty()) {
      std::cout << slowent::to_json(report).dump(2) << "\n";
    } else {
      fs::create_directories(out_dir);
      write_file(fs::path(out_dir) / "report.json", slowent::to_json(report).dump(2) + "\n");
      write_file(fs::path(out_dir) / "checks.csv", slowent::checks_csv(report));
      for (const auto& t : report.tables) {
        write_file(fs::path(out_dir) / (t.name + ".csv"), slowent::table_csv(t));
      }
      print_summary(report);
    }
    return report.pass() ? kExitOk : kExitVerdict;
  } catch (const slowent::Error& e) {
    std::fprintf(stderr, "slowent: %s\n", e.what());
    return kExitPrecondition;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "slowent: %s\n", e.what());
    return kExitPrecondition;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "slowent: internal error: %s\n", e.what());
    return kExitInternal;
  }
}
