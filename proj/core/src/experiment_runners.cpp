#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "slowent/covering.hpp"
#include "slowent/error.hpp"
#include "slowent/experiment.hpp"
#include "slowent/models.hpp"
#include "slowent/parallel.hpp"
#include "slowent/random.hpp"
#include "slowent/stacking.hpp"
#include "slowent/transport.hpp"
#include "slowent/window_index.hpp"

namespace slowent {
namespace {

using nlohmann::json;

// Typed access to one experiment's config object; unknown keys are rejected
// so that typos fail loudly instead of silently running defaults.
class ConfigReader {
 public:
  ConfigReader(const json& j, const std::string& experiment, std::vector<std::string> allowed)
      : j_(j), experiment_(experiment) {
    allowed.push_back("experiment");
    allowed.push_back("seed");
    allowed.push_back("output");
    for (const auto& [key, value] : j.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        throw ConfigError(experiment + ": unknown config key \"" + key + "\"");
      }
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(key, "a number");
    return v.get<double>();
  }

  std::size_t count(const char* key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::size_t>(v.get<long long>());
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (d >= 0 && d == std::floor(d) && d < 1e18) return static_cast<std::size_t>(d);
    }
    fail(key, "a nonnegative integer");
  }

  std::vector<std::size_t> counts(const char* key, std::vector<std::size_t> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (v.is_array()) {
      std::vector<std::size_t> out;
      for (const auto& x : v) {
        if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0)) {
          fail(key, "a list of nonnegative integers");
        }
        out.push_back(x.get<std::size_t>());
      }
      return out;
    }
    return {count(key, 0)};
  }

  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(key, "a boolean");
    return v.get<bool>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(key, "a string");
    return v.get<std::string>();
  }

  const json& object(const char* key) const { return j_.at(key); }

  [[noreturn]] void fail(const char* key, const char* what) const {
    throw ConfigError(experiment_ + ": \"" + key + "\" must be " + what);
  }

 private:
  const json& j_;
  std::string experiment_;
};

ProcessGenerator generator_or(const ConfigReader& cfg, const char* key, ProcessGenerator fallback) {
  return cfg.has(key) ? generator_from_json(cfg.object(key)) : fallback;
}

ProcessGenerator golden_sturmian() { return ProcessGenerator::sturmian(RotationNumber::golden(), 0.0); }

WindowCode code_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("code must be an object");
  const std::string kind = j.value("kind", std::string("identity"));
  const auto k0 = j.value("half_width", std::size_t{0});
  if (kind == "identity") return WindowCode::identity();
  if (kind == "majority") return WindowCode::majority(k0);
  if (kind == "center") return WindowCode::center(k0);
  throw ConfigError("code: unknown kind \"" + kind + "\" (identity, majority, center)");
}

// Orbit length at which block_complexity can certify a_n for this kind.
std::size_t certifying_length(const ProcessGenerator& g, std::size_t n, std::size_t floor) {
  std::size_t len = std::max(floor, 4 * n);
  if (std::holds_alternative<SturmianRotation>(g.kind())) len = std::max(len, n * sturmian_sync_factor);
  if (const auto* p = std::get_if<Periodic>(&g.kind())) len = std::max(len, n + p->pattern.size());
  if (std::holds_alternative<Substitution>(g.kind())) len = std::max(len, 64 * n);
  return len;
}

CoverMode pick_mode(const std::string& mode, double epsilon, double delta) {
  if (mode == "lemma") return CoverMode::lemma;
  if (mode == "exploratory") return CoverMode::exploratory;
  if (mode == "auto") {
    return epsilon <= 0.01 && delta <= 0.01 && delta > 0.0 ? CoverMode::lemma : CoverMode::exploratory;
  }
  throw ConfigError("mode must be \"lemma\", \"exploratory\" or \"auto\"");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Check make_check(std::string name, double value, std::optional<double> bound, std::string relation,
                 bool pass, bool asserted = true) {
  return Check{std::move(name), value, bound, std::move(relation), pass, asserted};
}

WeightedSample sample_names(const Orbit& orbit, std::size_t n, std::size_t count, std::uint64_t seed) {
  if (orbit.symbols.size() < n) throw PreconditionError("orbit shorter than the name length");
  const std::size_t positions = orbit.symbols.size() - n + 1;
  std::vector<BinaryWord> words;
  words.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    words.push_back(orbit.symbols.slice(derive_seed(seed, i) % positions, n));
  }
  return WeightedSample::uniform(std::move(words));
}

// --- random instances shared by the dbar and lemma suites -------------------

BinaryWord random_word(Rng& rng, std::size_t n) {
  std::vector<std::uint64_t> blocks((n + 63) / 64);
  for (auto& b : blocks) b = rng();
  return BinaryWord::from_blocks(std::move(blocks), n);
}

std::vector<BinaryWord> distinct_words(Rng& rng, std::size_t n, std::size_t count) {
  std::vector<BinaryWord> out;
  std::set<std::string> seen;
  while (out.size() < count) {
    BinaryWord w = random_word(rng, n);
    if (seen.insert(w.to_string()).second) out.push_back(std::move(w));
  }
  return out;
}

// Minimum over bijections of the mean distance: the exact value for two
// equal-weight supports of the same size.
double assignment_oracle(const std::vector<BinaryWord>& a, const std::vector<BinaryWord>& b) {
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = 2.0;
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) total += dbar_words(a[i], b[perm[i]]);
    best = std::min(best, total / static_cast<double>(a.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------
// complexity

ExperimentReport run_complexity(const json& config, std::uint64_t seed) {
  const ConfigReader cfg(config, "complexity", {"generator", "n", "n_max", "sample_len"});
  const ProcessGenerator g = generator_or(cfg, "generator", golden_sturmian());
  std::vector<std::size_t> ns;
  if (cfg.has("n")) {
    ns = cfg.counts("n", {});
  } else {
    ns.resize(cfg.count("n_max", 64));
    std::iota(ns.begin(), ns.end(), std::size_t{1});
  }
  if (ns.empty()) throw ConfigError("complexity: no window lengths requested");
  for (auto n : ns) {
    if (n == 0) throw ConfigError("complexity: window lengths must be positive");
  }
  const std::size_t max_n = *std::max_element(ns.begin(), ns.end());
  const std::size_t sample_len = cfg.count("sample_len", 10'000'000);
  if (sample_len < 4 * max_n) throw ConfigError("complexity: sample_len must be at least 4 n_max");

  const Orbit orbit = sample_orbit(g, sample_len, seed);
  std::vector<BlockCount> counts(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) { counts[i] = block_complexity(g, orbit, ns[i]); });

  ExperimentReport rep;
  Table table{"complexity", {"n", "a_n", "exactness"}, {}};
  std::size_t exact = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const bool is_exact = counts[i].exactness == Exactness::exact;
    exact += is_exact;
    table.rows.push_back({std::to_string(ns[i]), std::to_string(counts[i].count), is_exact ? "exact" : "lower_bound"});
  }
  rep.tables.push_back(table);
  rep.checks.push_back(make_check("exact_counts", static_cast<double>(exact),
                                  static_cast<double>(ns.size()), "info", true, false));

  const bool sturmian = std::holds_alternative<SturmianRotation>(g.kind());
  if (sturmian) {
    std::size_t violations = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) violations += counts[i].count != ns[i] + 1;
    rep.checks.push_back(make_check("sturmian_a_n_equals_n_plus_1_violations", static_cast<double>(violations),
                                    0.0, "==", violations == 0, exact == ns.size()));
  }
  if (g.zero_entropy()) {
    // Sub-exponential witness a_{2n} / a_n <= 4 wherever both are counted.
    double worst = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      for (std::size_t j = 0; j < ns.size(); ++j) {
        if (ns[j] == 2 * ns[i] && ns[i] >= 8) {
          worst = std::max(worst, static_cast<double>(counts[j].count) / static_cast<double>(counts[i].count));
          any = true;
        }
      }
    }
    if (any) rep.checks.push_back(make_check("max_ratio_a_2n_over_a_n", worst, 4.0, "<=", worst <= 4.0));
  } else {
    std::size_t over = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      over += ns[i] < 63 && counts[i].count > (std::size_t{1} << ns[i]);
    }
    rep.checks.push_back(make_check("a_n_above_2_pow_n", static_cast<double>(over), 0.0, "==", over == 0));
  }
  rep.details = {{"generator", g.describe()}, {"sample_len", sample_len}};
  return rep;
}

// ---------------------------------------------------------------------------
// cover

ExperimentReport run_cover(const json& config, std::uint64_t seed) {
  const ConfigReader cfg(config, "cover",
                         {"generator", "n", "epsilon", "delta", "mode", "samples", "orbit_length",
                          "method", "code"});
  const ProcessGenerator g = generator_or(cfg, "generator", golden_sturmian());
  CoverParams p;
  p.n = cfg.count("n", 64);
  p.epsilon = cfg.number("epsilon", 0.01);
  p.delta = cfg.number("delta", 0.01);
  p.mode = pick_mode(cfg.text("mode", "auto"), p.epsilon, p.delta);
  p.validate();
  const std::size_t samples = cfg.count("samples", 2000);
  const std::size_t orbit_length = cfg.count("orbit_length", 1'000'000);
  const std::string method = cfg.text("method", "all");
  if (method != "all" && method != "greedy" && method != "exact" && method != "block_coding") {
    throw ConfigError("cover: method must be all, greedy, exact or block_coding");
  }
  const WindowCode code = cfg.has("code") ? code_from_json(cfg.object("code")) : WindowCode::identity();
  if (samples == 0) throw ConfigError("cover: samples must be positive");
  if (orbit_length < p.n + code.window_length() + 1) throw ConfigError("cover: orbit_length too short for n");

  const Orbit orbit = sample_orbit(g, orbit_length, derive_seed(seed, 0));
  const WeightedSample s = sample_names(orbit, p.n, samples, derive_seed(seed, 1));

  ExperimentReport rep;
  Table table{"cover", {"method", "n", "epsilon", "delta", "k", "covered_mass", "seed"}, {}};
  auto add_row = [&](const CoverResult& r) {
    table.rows.push_back({to_string(r.method), std::to_string(p.n), num(p.epsilon), num(p.delta),
                          std::to_string(r.k), num(r.covered_mass), std::to_string(seed)});
  };
  const bool do_sample = method == "all" || method == "greedy" || method == "exact";
  if (do_sample) {
    const std::size_t packing = packing_lower_bound(s, p.epsilon, p.delta);
    rep.details["packing_lower_bound"] = packing;
    std::optional<CoverResult> greedy;
    if (method != "exact") {
      greedy = greedy_cover(s, p);
      add_row(*greedy);
      rep.checks.push_back(make_check("greedy_uncovered_mass", 1.0 - greedy->covered_mass, p.delta, "<",
                                      1.0 - greedy->covered_mass < p.delta || greedy->covered_mass == 1.0));
      rep.checks.push_back(make_check("packing_le_greedy", static_cast<double>(packing),
                                      static_cast<double>(greedy->k), "<=", packing <= greedy->k));
    }
    if (method == "exact" || (method == "all" && samples <= exact_cover_limit)) {
      const CoverResult exact = exact_cover_oracle(s, p);
      add_row(exact);
      rep.checks.push_back(make_check("packing_le_exact", static_cast<double>(packing),
                                      static_cast<double>(exact.k), "<=", packing <= exact.k));
      if (greedy) {
        rep.checks.push_back(make_check("exact_le_greedy", static_cast<double>(exact.k),
                                        static_cast<double>(greedy->k), "<=", exact.k <= greedy->k));
      }
    }
  }
  if (method == "all" || method == "block_coding") {
    const BlockCount a2n = block_complexity(g, 2 * p.n, certifying_length(g, 2 * p.n, 0), derive_seed(seed, 2));
    const BlockCodingCover bc = block_coding_cover(orbit, code, p);
    add_row(bc.cover);
    const bool exact = a2n.exactness == Exactness::exact;
    rep.checks.push_back(make_check("block_coding_centers_le_a_2n", static_cast<double>(bc.cover.k),
                                    static_cast<double>(a2n.count), "<=", bc.cover.k <= a2n.count,
                                    exact && g.zero_entropy()));
    rep.checks.push_back(make_check("block_coding_covered_mass", bc.cover.covered_mass, 1.0 - p.delta, ">",
                                    bc.lemma_precondition_met));
    rep.checks.push_back(make_check("block_coding_covered_mass_2eps", bc.covered_mass_double_radius,
                                    1.0 - p.delta, "info", bc.covered_mass_double_radius > 1.0 - p.delta,
                                    false));
    rep.details["a_2n"] = {{"value", a2n.count}, {"exactness", exact ? "exact" : "lower_bound"}};
    rep.details["block_coding"] = {{"code", code.describe()},
                                   {"atoms", bc.atom_count},
                                   {"positions", bc.sample_positions},
                                   {"good_mass", bc.good_mass}};
  }
  rep.tables.push_back(table);
  rep.details["generator"] = g.describe();
  rep.details["mode"] = p.mode == CoverMode::lemma ? "lemma" : "exploratory";
  return rep;
}

// ---------------------------------------------------------------------------
// dbar

ExperimentReport run_dbar(const json& config, std::uint64_t seed) {
  const ConfigReader cfg(config, "dbar", {"P", "Q", "N", "instances", "support"});
  ExperimentReport rep;
  auto parse_dist = [](const json& j) {
    if (!j.is_object() || j.empty()) throw ConfigError("dbar: P and Q must map words to probabilities");
    std::vector<BinaryWord> words;
    std::vector<double> probs;
    for (const auto& [w, p] : j.items()) {
      words.push_back(BinaryWord::from_string(w));
      probs.push_back(p.get<double>());
    }
    return NameDistribution(std::move(words), std::move(probs));
  };
  if (cfg.has("P") || cfg.has("Q")) {
    if (!cfg.has("P") || !cfg.has("Q")) throw ConfigError("dbar: give both P and Q");
    const auto P = parse_dist(cfg.object("P"));
    const auto Q = parse_dist(cfg.object("Q"));
    const double exact = dbar_dist(P, Q);
    const double greedy = dbar_dist_greedy(P, Q);
    rep.checks.push_back(make_check("dbar_exact", exact, std::nullopt, "info", true, false));
    rep.checks.push_back(make_check("greedy_ge_exact", greedy, exact, ">=", greedy >= exact - 1e-9));
    rep.tables.push_back({"dbar", {"instance", "N", "exact", "greedy"}, {{"0", std::to_string(P.word_length()), num(exact), num(greedy)}}});
    return rep;
  }

  const std::size_t instances = cfg.count("instances", 100);
  const std::size_t max_support = cfg.count("support", 6);
  const std::size_t N = cfg.count("N", 8);
  if (max_support < 1 || max_support > 7) throw ConfigError("dbar: support must lie in [1, 7]");
  if (N < 3 || N > 20) throw ConfigError("dbar: N must lie in [3, 20]");
  Table table{"dbar", {"instance", "N", "support", "exact", "oracle", "greedy"}, {}};
  double worst_oracle = 0.0;
  std::size_t greedy_below = 0;
  Rng rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t size = 1 + uniform_below(rng, max_support);
    auto a = distinct_words(rng, N, size);
    auto b = distinct_words(rng, N, size);
    const auto P = NameDistribution::uniform(a);
    const auto Q = NameDistribution::uniform(b);
    const double exact = dbar_dist(P, Q);
    const double oracle = assignment_oracle(a, b);
    const double greedy = dbar_dist_greedy(P, Q);
    worst_oracle = std::max(worst_oracle, std::abs(exact - oracle));
    greedy_below += greedy < exact - 1e-9;
    table.rows.push_back({std::to_string(i), std::to_string(N), std::to_string(size), num(exact), num(oracle), num(greedy)});
  }
  rep.tables.push_back(table);
  rep.checks.push_back(make_check("max_abs_exact_minus_assignment_oracle", worst_oracle, 1e-9, "<=", worst_oracle <= 1e-9));
  rep.checks.push_back(make_check("greedy_below_exact_count", static_cast<double>(greedy_below), 0.0, "==", greedy_below == 0));
  return rep;
}

// ---------------------------------------------------------------------------
// vwb

ExperimentReport run_vwb(const json& config, std::uint64_t seed) {
  const ConfigReader cfg(config, "vwb", {"r", "r0", "steps", "epsilon", "N", "k", "min_atom_mass", "expect"});
  const ProcessGenerator r_gen = generator_or(cfg, "r", ProcessGenerator::bernoulli(0.5));
  const bool same = cfg.has("r0") && cfg.object("r0").is_string() && cfg.object("r0").get<std::string>() == "same";
  const std::size_t steps = cfg.count("steps", 10'000'000);
  VwbParams base;
  base.epsilon = cfg.number("epsilon", 0.05);
  base.N = cfg.count("N", 6);
  if (cfg.has("min_atom_mass")) base.min_atom_mass = cfg.number("min_atom_mass", 0.0);
  const auto ks = cfg.counts("k", {4, 8});

  // Expected verdicts, either one string for star_star or one per variant.
  std::optional<std::string> expect_ss, expect_sss;
  if (cfg.has("expect")) {
    const auto& e = cfg.object("expect");
    auto read = [](const json& v) -> std::optional<std::string> {
      if (v.is_null()) return std::nullopt;
      if (!v.is_string() || (v != "pass" && v != "fail")) throw ConfigError("vwb: expect values must be \"pass\" or \"fail\"");
      return v.get<std::string>();
    };
    if (e.is_object()) {
      if (e.contains("star_star")) expect_ss = read(e["star_star"]);
      if (e.contains("star_star_star")) expect_sss = read(e["star_star_star"]);
    } else {
      expect_ss = read(e);
    }
  }

  const Orbit r = sample_orbit(r_gen, steps, derive_seed(seed, 0));
  BinaryWord r0 = r.symbols;
  std::string r0_desc = "same as r";
  if (!same) {
    const ProcessGenerator r0_gen = generator_or(cfg, "r0", golden_sturmian());
    r0 = sample_orbit(r0_gen, steps, derive_seed(seed, 1)).symbols;
    r0_desc = r0_gen.describe();
  }

  ExperimentReport rep;
  Table table{"vwb", {"variant", "k", "N", "epsilon", "min_atom_mass", "good_mass", "max_dbar", "mean_dbar",
                      "retained_atoms", "excluded_mass", "verdict"}, {}};
  json reports = json::array();
  for (auto k : ks) {
    VwbParams p = base;
    p.k = k;
    const auto [ss, sss] = vwb_test_both(r.symbols, r0, p);
    for (const auto* v : {&ss, &sss}) {
      table.rows.push_back({to_string(v->variant), std::to_string(k), std::to_string(v->N), num(v->epsilon),
                            num(v->min_atom_mass), num(v->good_mass), num(v->max_dbar), num(v->mean_dbar),
                            std::to_string(v->retained_atoms), num(v->excluded_mass), v->pass ? "pass" : "fail"});
      reports.push_back(to_json(*v));
      const auto& expect = v->variant == VwbVariant::star_star ? expect_ss : expect_sss;
      const std::string name = "k" + std::to_string(k) + "_" + to_string(v->variant) + "_max_dbar";
      const bool matches = expect ? (v->pass == (*expect == "pass")) : v->pass;
      rep.checks.push_back(make_check(name, v->max_dbar, v->epsilon, "<", matches, expect.has_value()));
    }
    const std::string prefix = "k" + std::to_string(k) + "_bracket_";
    rep.checks.push_back(make_check(prefix + "ss_le_sss", ss.max_dbar, sss.max_dbar + 1e-9, "<=",
                                    ss.max_dbar <= sss.max_dbar + 1e-9));
    rep.checks.push_back(make_check(prefix + "sss_le_2ss", sss.max_dbar, 2.0 * ss.max_dbar + 1e-9, "<=",
                                    sss.max_dbar <= 2.0 * ss.max_dbar + 1e-9));
  }
  rep.tables.push_back(table);
  rep.details = {{"r", r_gen.describe()}, {"r0", r0_desc}, {"steps", steps}, {"reports", reports}};
  return rep;
}

// ---------------------------------------------------------------------------
// dominance gap

ExperimentReport run_dominance_gap(const json& config, std::uint64_t seed) {
  const ConfigReader cfg(config, "dominance_gap",
                         {"base", "m", "M", "epsilon", "delta", "mode", "samples", "tower_length",
                          "cover_orbit_length", "code", "shuffle_columns", "expect"});
  const ProcessGenerator g = generator_or(cfg, "base", golden_sturmian());
  const std::size_t m = cfg.count("m", 40);
  const std::size_t M = cfg.count("M", 10);
  const std::size_t n = m * M;
  CoverParams p;
  p.n = n;
  p.epsilon = cfg.number("epsilon", 0.01);
  p.delta = cfg.number("delta", 0.01);
  p.mode = pick_mode(cfg.text("mode", "auto"), p.epsilon, p.delta);
  p.validate();
  const std::size_t samples = cfg.count("samples", 5000);
  const std::size_t tower_length = cfg.count("tower_length", 1'000'000);
  const std::size_t cover_len = cfg.count("cover_orbit_length", 1'000'000);
  const WindowCode code = cfg.has("code") ? code_from_json(cfg.object("code")) : WindowCode::identity();
  const bool shuffle = cfg.flag("shuffle_columns", false);
  const std::string expect = cfg.text("expect", "");
  if (!expect.empty() && expect != "inside_U" && expect != "not_certified") {
    throw ConfigError("dominance_gap: expect must be inside_U or not_certified");
  }
  if (m == 0 || M == 0 || M > 64) throw ConfigError("dominance_gap: need m >= 1 and 1 <= M <= 64");
  if (samples < 2) throw ConfigError("dominance_gap: samples must be at least 2");

  ExperimentReport rep;
  // (1) base complexity a_{2n}.
  const BlockCount a2n = block_complexity(g, 2 * n, certifying_length(g, 2 * n, 0), derive_seed(seed, 1));
  const bool a2n_exact = a2n.exactness == Exactness::exact;
  rep.checks.push_back(make_check("a_2n", static_cast<double>(a2n.count), std::nullopt, "info", a2n_exact, false));

  // (2) constructive base cover.
  const Orbit base = sample_orbit(g, cover_len, derive_seed(seed, 2));
  const BlockCodingCover bc = block_coding_cover(base, code, p);
  rep.checks.push_back(make_check("base_cover_centers_le_a_2n", static_cast<double>(bc.cover.k),
                                  static_cast<double>(a2n.count), "<=", bc.cover.k <= a2n.count,
                                  a2n_exact && g.zero_entropy()));
  rep.checks.push_back(make_check("base_cover_covered_mass", bc.cover.covered_mass, 1.0 - p.delta, ">",
                                  bc.lemma_precondition_met, g.zero_entropy()));

  // (3) tower, identity and independently stacked names.
  const RokhlinTower tower = shuffle ? build_tower(tower_length, n, derive_seed(seed, 3))
                                     : build_tower(tower_length, n);
  const StackedNames stacked(tower, M, derive_seed(seed, 4), BlockSource::uniform_words);
  const StackedNames identity(tower, M, derive_seed(seed, 5), BlockSource::identity);

  std::vector<BinaryWord> stacked_words(samples, BinaryWord::zeros(1));
  std::vector<BinaryWord> identity_words(samples, BinaryWord::zeros(1));
  parallel_for(samples, [&](std::size_t i) {
    const std::size_t t = derive_seed(seed, {6, i}) % tower_length;
    const std::uint64_t replica = derive_seed(seed, {7, i});
    stacked_words[i] = stacked.name_at(t, replica, n);
    identity_words[i] = identity.name_at(t, replica, n);
  });
  const WeightedSample stacked_sample = WeightedSample::uniform(std::move(stacked_words));
  const WeightedSample identity_sample = WeightedSample::uniform(std::move(identity_words));

  // (4) separation.
  const std::size_t packing = packing_lower_bound(stacked_sample, p.epsilon, p.delta);
  const CoverResult stacked_greedy = greedy_cover(stacked_sample, p);
  const CoverResult identity_greedy = greedy_cover(identity_sample, p);
  Separation verdict = separation_check(a2n.count, packing);
  // A sampled a_{2n} is only a lower bound, so nothing is certified from it.
  if (!a2n_exact) verdict = Separation::not_certified;
  const Separation identity_verdict = separation_check(a2n.count, identity_greedy.k);

  rep.checks.push_back(make_check("stacked_packing_le_greedy", static_cast<double>(packing),
                                  static_cast<double>(stacked_greedy.k), "<=", packing <= stacked_greedy.k));
  const bool inside = verdict == Separation::inside_U;
  rep.checks.push_back(make_check("stacked_packing_gt_2_a_2n", static_cast<double>(packing),
                                  2.0 * static_cast<double>(a2n.count), ">",
                                  expect.empty() ? inside : inside == (expect == "inside_U"), !expect.empty()));
  rep.checks.push_back(make_check("identity_cover_number", static_cast<double>(identity_greedy.k), 2.0, "<=",
                                  identity_greedy.k <= 2));
  rep.checks.push_back(make_check("identity_not_certified", static_cast<double>(identity_greedy.k),
                                  2.0 * static_cast<double>(a2n.count), "<=",
                                  identity_verdict == Separation::not_certified));

  rep.tables.push_back({"cover",
                        {"method", "n", "epsilon", "delta", "k", "covered_mass", "seed"},
                        {{"block_coding", std::to_string(n), num(p.epsilon), num(p.delta), std::to_string(bc.cover.k),
                          num(bc.cover.covered_mass), std::to_string(seed)},
                         {"greedy", std::to_string(n), num(p.epsilon), num(p.delta), std::to_string(stacked_greedy.k),
                          num(stacked_greedy.covered_mass), std::to_string(seed)},
                         {"greedy", std::to_string(n), num(p.epsilon), num(p.delta), std::to_string(identity_greedy.k),
                          num(identity_greedy.covered_mass), std::to_string(seed)}}});
  rep.details = {
      {"base", g.describe()},
      {"n", n},
      {"mode", p.mode == CoverMode::lemma ? "lemma" : "exploratory"},
      {"a_2n", {{"value", a2n.count}, {"exactness", a2n_exact ? "exact" : "lower_bound"}}},
      {"base_cover",
       {{"code", code.describe()},
        {"centers", bc.cover.k},
        {"atoms", bc.atom_count},
        {"covered_mass", bc.cover.covered_mass},
        {"covered_mass_2eps", bc.covered_mass_double_radius},
        {"good_mass", bc.good_mass}}},
      {"tower", to_json(tower)},
      {"stacked", {{"packing_lower_bound", packing}, {"greedy_cover", stacked_greedy.k},
                   {"separation", to_string(verdict)}}},
      {"identity", {{"greedy_cover", identity_greedy.k}, {"separation", to_string(identity_verdict)}}},
      {"inverse_ball_bound", std::exp2(static_cast<double>(m) * (0.5 - binary_entropy(2.0 * p.epsilon)))},
      {"verdict", to_string(verdict)},
  };
  return rep;
}

// ---------------------------------------------------------------------------
// lemma suite

namespace {

struct SparseSweep {
  std::size_t random_instances = 0;
  std::size_t random_violations = 0;
  std::size_t exhaustive_instances = 0;
  std::size_t exhaustive_violations = 0;
  std::size_t tight_equality_cases = 0;  // strict bound fails at eps = |A| / (mM)
};

SparseSweep sparse_sweep(std::size_t instances, std::uint64_t seed) {
  SparseSweep out;
  Rng rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t m = 1 + uniform_below(rng, 40);
    const std::size_t M = 1 + uniform_below(rng, 40);
    const double eps = 0.25 * (uniform01(rng) * 0.999 + 0.0005);
    const std::size_t n = m * M;
    const auto budget = static_cast<std::size_t>(std::floor(eps * static_cast<double>(n)));
    std::vector<std::size_t> A;
    if (uniform_below(rng, 2) == 0) {
      // Adversarial: fill blocks to just the threshold, front to back.
      const auto per_block = static_cast<std::size_t>(std::ceil(std::sqrt(eps) * static_cast<double>(M)));
      for (std::size_t j = 0; j < m && A.size() < budget; ++j) {
        for (std::size_t x = 0; x < per_block && A.size() < budget; ++x) A.push_back(j * M + x);
      }
    } else {
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), 0);
      const std::size_t size = budget == 0 ? 0 : uniform_below(rng, budget + 1);
      for (std::size_t x = 0; x < size; ++x) std::swap(all[x], all[x + uniform_below(rng, n - x)]);
      A.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
    }
    ++out.random_instances;
    out.random_violations += !sparse_interval_lemma(A, m, M, eps).strict_bound_holds;
  }

  const double grid[] = {0.005, 0.01, 0.02, 0.05, 0.1};
  for (std::size_t m = 1; m <= 16; ++m) {
    for (std::size_t M = 1; m * M <= 16; ++M) {
      const std::size_t n = m * M;
      for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
        std::vector<std::size_t> A;
        for (std::size_t x = 0; x < n; ++x) {
          if (mask >> x & 1U) A.push_back(x);
        }
        for (double eps : grid) {
          if (static_cast<double>(A.size()) > eps * static_cast<double>(n)) continue;
          ++out.exhaustive_instances;
          out.exhaustive_violations += !sparse_interval_lemma(A, m, M, eps).strict_bound_holds;
        }
        if (!A.empty() && A.size() < n) {
          const double tight = static_cast<double>(A.size()) / static_cast<double>(n);
          out.tight_equality_cases += !sparse_interval_lemma(A, m, M, tight).strict_bound_holds;
        }
      }
    }
  }
  return out;
}

struct SandwichSweep {
  std::size_t instances = 0;
  std::size_t order_violations = 0;  // packing <= exact <= greedy
  std::size_t delta_monotone_violations = 0;
  std::size_t epsilon_monotone_violations = 0;
};

// Random small covering instances: clustered words with random weights.
SandwichSweep sandwich_sweep(std::size_t instances, std::uint64_t seed) {
  SandwichSweep out;
  std::vector<SandwichSweep> per(instances);
  parallel_for(instances, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    const std::size_t size = 4 + uniform_below(rng, 11);
    const std::size_t n = 6 + uniform_below(rng, 11);
    const std::size_t clusters = 1 + uniform_below(rng, 4);
    std::vector<BinaryWord> centers;
    for (std::size_t c = 0; c < clusters; ++c) centers.push_back(random_word(rng, n));
    std::vector<BinaryWord> words;
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t w = 0; w < size; ++w) {
      BinaryWord x = centers[uniform_below(rng, clusters)];
      for (std::size_t b = 0; b < n; ++b) {
        if (uniform01(rng) < 0.15) x.set(b, !x[b]);
      }
      words.push_back(std::move(x));
      weights.push_back(0.2 + uniform01(rng));
      total += weights.back();
    }
    for (auto& w : weights) w /= total;
    const WeightedSample s(std::move(words), std::move(weights));
    const double eps_grid[] = {0.1, 0.15, 0.2, 0.25, 0.3, 0.35};
    const double delta_grid[] = {0.0, 0.05, 0.1, 0.2};
    SandwichSweep local;
    for (double eps : eps_grid) {
      for (double delta : delta_grid) {
        CoverParams p;
        p.n = n;
        p.epsilon = eps;
        p.delta = delta;
        p.mode = CoverMode::exploratory;
        const std::size_t pack = packing_lower_bound(s, eps, delta);
        const std::size_t exact = exact_cover_oracle(s, p).k;
        const std::size_t greedy = greedy_cover(s, p).k;
        local.order_violations += !(pack <= exact && exact <= greedy);
        if (delta > 0.0) {
          p.delta = delta / 2.0;
          local.delta_monotone_violations += greedy > greedy_cover(s, p).k;
          p.delta = delta;
        }
        p.epsilon = eps / 1.5;
        local.epsilon_monotone_violations += greedy > greedy_cover(s, p).k;
      }
    }
    local.instances = 1;
    per[i] = local;
  });
  for (const auto& x : per) {
    out.instances += x.instances;
    out.order_violations += x.order_violations;
    out.delta_monotone_violations += x.delta_monotone_violations;
    out.epsilon_monotone_violations += x.epsilon_monotone_violations;
  }
  return out;
}

}  // namespace

ExperimentReport run_lemma_suite(const json& config, std::uint64_t seed) {
  const ConfigReader cfg(config, "lemma_suite",
                         {"M", "m", "epsilon", "samples", "tower_length", "source", "cocycle_resolution",
                          "independence_M", "independence_m", "independence_columns", "sparse_instances",
                          "sandwich_instances", "mode"});
  const std::size_t M = cfg.count("M", 10);
  const std::size_t m = cfg.count("m", 40);
  const double eps = cfg.number("epsilon", 0.01);
  const std::size_t samples = cfg.count("samples", 100'000);
  const std::size_t h = m * M;
  const std::size_t tower_length = cfg.count("tower_length", std::max<std::size_t>(1'000'000, h * (h + 1)));
  const std::string source_name = cfg.text("source", "uniform_words");
  const auto d = static_cast<unsigned>(cfg.count("cocycle_resolution", 16));
  const std::size_t ind_M = cfg.count("independence_M", 6);
  const std::size_t ind_m = cfg.count("independence_m", 10);
  const std::size_t ind_columns = cfg.count("independence_columns", 100'000);
  const std::size_t sparse_instances = cfg.count("sparse_instances", 10'000);
  const std::size_t sandwich_instances = cfg.count("sandwich_instances", 200);
  const std::string mode = cfg.text("mode", "auto");
  if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("lemma_suite: epsilon must lie in (0, 1)");
  if (mode != "auto" && mode != "lemma" && mode != "exploratory") {
    throw ConfigError("lemma_suite: mode must be auto, lemma or exploratory");
  }
  const bool lemma_mode = mode == "lemma" || (mode == "auto" && eps < 0.25);

  BlockSource source;
  if (source_name == "uniform_words") {
    source = BlockSource::uniform_words;
  } else if (source_name == "identity") {
    source = BlockSource::identity;
  } else if (source_name == "repeated_blocks") {
    source = BlockSource::repeated_blocks;
  } else if (source_name == "cocycle") {
    source = BlockSource::cocycle;
  } else {
    throw ConfigError("lemma_suite: source must be uniform_words, identity, repeated_blocks or cocycle");
  }
  auto make_names = [&](std::size_t length, std::size_t height, std::size_t block, std::uint64_t s) {
    std::shared_ptr<const DyadicCocycle> cocycle;
    if (source == BlockSource::cocycle) {
      cocycle = std::make_shared<const DyadicCocycle>(DyadicCocycle::random(d, length, derive_seed(s, 1)));
    }
    return StackedNames(build_tower(length, height), block, derive_seed(s, 0), source, cocycle);
  };

  ExperimentReport rep;
  // Ball lemmas.
  const StackedNames names = make_names(tower_length, h, M, derive_seed(seed, 1));
  const BallBoundReport balls = ball_bound_report(names, eps, samples, derive_seed(seed, 2), lemma_mode);
  for (const auto& c : balls.checks) {
    rep.checks.push_back(make_check("ball/" + c.name, c.estimate, c.bound,
                                    c.relation == "info" ? "info" : c.relation + " (3 sigma = " + num(3 * c.sigma) + ")",
                                    c.pass, c.asserted));
  }

  // Block independence.
  const std::size_t ind_h = ind_M * ind_m;
  const StackedNames ind_names = make_names(ind_columns * ind_h, ind_h, ind_M, derive_seed(seed, 3));
  const IndependenceReport ind = check_rj_independence(ind_names);
  const bool adversarial = source == BlockSource::identity || source == BlockSource::repeated_blocks;
  if (adversarial) {
    rep.checks.push_back(make_check("rj_dependence_detected", ind.max_corrected, ind.threshold, ">=", ind.dependent));
  } else {
    rep.checks.push_back(make_check("rj_max_mi_corrected", ind.max_corrected, ind.threshold, "<", !ind.dependent));
  }
  rep.checks.push_back(make_check("rj_max_mi_plug_in", ind.max_plug_in, std::nullopt, "info", true, false));

  // Sparse intervals.
  const SparseSweep sparse = sparse_sweep(sparse_instances, derive_seed(seed, 4));
  rep.checks.push_back(make_check("sparse_random_violations", static_cast<double>(sparse.random_violations), 0.0,
                                  "==", sparse.random_violations == 0));
  rep.checks.push_back(make_check("sparse_exhaustive_violations", static_cast<double>(sparse.exhaustive_violations),
                                  0.0, "==", sparse.exhaustive_violations == 0));
  rep.checks.push_back(make_check("sparse_tight_eps_equality_cases", static_cast<double>(sparse.tight_equality_cases),
                                  std::nullopt, "info", true, false));

  // Covering sandwich.
  const SandwichSweep sandwich = sandwich_sweep(sandwich_instances, derive_seed(seed, 5));
  rep.checks.push_back(make_check("sandwich_order_violations", static_cast<double>(sandwich.order_violations), 0.0,
                                  "==", sandwich.order_violations == 0));
  rep.checks.push_back(make_check("greedy_delta_monotone_violations",
                                  static_cast<double>(sandwich.delta_monotone_violations), 0.0, "==",
                                  sandwich.delta_monotone_violations == 0));
  rep.checks.push_back(make_check("greedy_epsilon_monotone_violations",
                                  static_cast<double>(sandwich.epsilon_monotone_violations), 0.0, "==",
                                  sandwich.epsilon_monotone_violations == 0));

  rep.details = {{"mode", lemma_mode ? "lemma" : "exploratory"},
                 {"source", to_string(source)},
                 {"ball_bounds", to_json(balls)},
                 {"independence", to_json(ind)},
                 {"sparse",
                  {{"random_instances", sparse.random_instances},
                   {"exhaustive_instances", sparse.exhaustive_instances},
                   {"tight_equality_cases", sparse.tight_equality_cases}}},
                 {"sandwich", {{"instances", sandwich.instances}}}};
  return rep;
}

}  // namespace slowent
