#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "asd/rng.hpp"

namespace asdkit {

namespace {

const char* const kRequired = "<required>";

const json& section_defaults() {
  static const json d = {
      {"simulate", {{"horizon", 10.0}, {"dt", 0.01}, {"runs", 1}, {"record", "per_class"}, {"gamma", 1.0},
                    {"fresh_graph", false}}},
      {"ode", {{"h", 0.01}, {"horizon", 10.0}, {"record_dt", 0.0}, {"phi_mode", "automatic"},
               {"mc_samples", 100000}, {"truncation", 1e-8}}},
      {"stationary", {{"grid", 11}, {"tol", 1e-10}, {"damping", 0.5}, {"max_iterations", 2000},
                      {"newton_iterations", 60}, {"dedup", 1e-6}, {"eig_tol", 1e-8}}},
      {"basins", {{"resolution", 101}, {"axis_x", 0}, {"axis_y", 1}, {"horizon", 100.0}, {"h", 0.01},
                  {"radius", 1e-4}}},
      {"bounds", {{"t", 1.0}, {"n", {1000, 10000}}, {"trials", 100000}, {"z", 3.0}, {"form", "general"},
                  {"eta", 0.1}, {"eps", 1.0}, {"moment_trials", 10000}}},
      {"couple", {{"t", 1.0}, {"n", {1000, 10000}}, {"trials", 10000}, {"z", 3.0}, {"bound_trials", 100000}}},
      {"compare", {{"simulation", nullptr}, {"ode", nullptr}, {"tolerance", nullptr}}},
  };
  return d;
}

const json& generator_defaults(const std::string& g) {
  static const json d = {
      {"regular", {{"k", 3}, {"n", 1000}, {"labels", json::array()}, {"label_fractions", {1.0}}}},
      {"cbm", {{"n", kRequired}, {"community_sizes", kRequired}, {"edge_means", kRequired}, {"names", json::array()}}},
      {"configuration", {{"statistics", kRequired}, {"n", 1000}}},
      {"powerlaw", {{"n", 1000}, {"beta", 2.5}, {"k_max", 100}, {"delta", nullptr}, {"zeta", nullptr}}},
      {"edge_list", {{"path", kRequired}, {"label_map", nullptr}}},
  };
  if (!d.contains(g)) throw ConfigError("unknown graph generator '" + g + "'");
  return d.at(g);
}

const json& kernel_defaults(const std::string& k) {
  static const json d = {
      {"tltm", {{"a_plus", 1}, {"a_minus", 1}, {"thresholds", nullptr}}},
      {"brca", {{"coordinating", true}}},
      {"erg", {{"b", 1.0}, {"c", 2.0}}},
      {"table", {{"path", kRequired}}},
  };
  if (!d.contains(k)) throw ConfigError("unknown kernel '" + k + "'");
  return d.at(k);
}

json merge(const json& user, json out, const std::string& where, const std::vector<std::string>& extra = {}) {
  if (!user.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [k, v] : user.items()) {
    if (!out.contains(k) && std::find(extra.begin(), extra.end(), k) == extra.end())
      throw ConfigError("unknown key '" + where + "." + k + "'");
    out[k] = v;
  }
  for (const auto& [k, v] : out.items())
    if (v == kRequired) throw ConfigError("missing required key '" + where + "." + k + "'");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t state_index(const asd::StateSet& states, const json& v) {
  auto name = v.get<std::string>();
  if (!states.contains(name)) throw ConfigError("unknown state '" + name + "'");
  return states.index(name);
}

void check_law(const std::vector<double>& p, std::size_t X, const std::string& where) {
  if (p.size() != X) throw ConfigError(where + ": expected " + std::to_string(X) + " entries");
  double s = 0.0;
  for (double x : p) {
    if (x < 0.0) throw ConfigError(where + ": negative probability");
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-9) throw ConfigError(where + ": probabilities must sum to 1");
}

// Per-class law, or counts, or nothing (uniform).
std::vector<std::vector<double>> class_laws(const json& init, std::size_t A, std::size_t X) {
  if (init.contains("distribution")) {
    auto p = init["distribution"].get<std::vector<double>>();
    check_law(p, X, "initial.distribution");
    return std::vector<std::vector<double>>(A, p);
  }
  if (init.contains("fraction_per_class")) {
    auto p = init["fraction_per_class"].get<std::vector<std::vector<double>>>();
    if (p.size() != A) throw ConfigError("initial.fraction_per_class: one row per label required");
    for (const auto& row : p) check_law(row, X, "initial.fraction_per_class");
    return p;
  }
  return std::vector<std::vector<double>>(A, std::vector<double>(X, 1.0 / static_cast<double>(X)));
}

}  // namespace

json parse_config_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON (" +
                      e.what() + ")");
  }
}

json load_config(const std::string& path) { return parse_config_text(read_file(path), path); }

json resolve(const json& user) {
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> top = {"seed",    "threads", "out",        "graph",  "dynamics",
                                               "initial", "simulate", "ode",       "stationary", "basins",
                                               "bounds",  "couple",  "compare"};
  for (const auto& [k, v] : user.items())
    if (std::find(top.begin(), top.end(), k) == top.end()) throw ConfigError("unknown key '" + k + "'");

  json cfg;
  cfg["seed"] = user.value("seed", std::uint64_t{0});
  cfg["threads"] = user.value("threads", 0);
  cfg["out"] = user.value("out", std::string("."));

  json graph = user.value("graph", json{{"generator", "regular"}});
  if (!graph.is_object()) throw ConfigError("'graph' must be an object");
  auto gen = graph.value("generator", std::string("regular"));
  cfg["graph"] = merge(graph, generator_defaults(gen), "graph", {"generator"});
  cfg["graph"]["generator"] = gen;

  json dyn = user.value("dynamics", json{{"kernel", "tltm"}});
  if (!dyn.is_object()) throw ConfigError("'dynamics' must be an object");
  auto kern = dyn.value("kernel", std::string("tltm"));
  cfg["dynamics"] = merge(dyn, kernel_defaults(kern), "dynamics", {"kernel"});
  cfg["dynamics"]["kernel"] = kern;

  json init = user.value("initial", json::object());
  cfg["initial"] = merge(init, json::object(), "initial", {"distribution", "fraction_per_class", "counts", "fill_state"});
  int forms = static_cast<int>(init.contains("distribution")) + static_cast<int>(init.contains("fraction_per_class")) +
              static_cast<int>(init.contains("counts"));
  if (forms > 1) throw ConfigError("initial: give one of distribution, fraction_per_class, counts");
  if (init.contains("counts") != init.contains("fill_state"))
    throw ConfigError("initial: counts and fill_state go together");

  for (const auto& [name, d] : section_defaults().items())
    cfg[name] = merge(user.value(name, json::object()), d, name);
  return cfg;
}

void apply_overrides(json& cfg, const Overrides& o, const char* env_threads) {
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.out) cfg["out"] = *o.out;
  if (o.threads) {
    cfg["threads"] = *o.threads;
  } else if (env_threads && *env_threads) {
    try {
      cfg["threads"] = std::stoi(env_threads);
    } catch (const std::exception&) {
      throw ConfigError(std::string("ASDKIT_THREADS is not an integer: ") + env_threads);
    }
  }
  if (cfg["threads"].get<int>() < 0) throw ConfigError("threads must be nonnegative");
}

std::uint64_t graph_seed(const json& cfg, std::uint64_t salt) {
  return asd::hash_combine(cfg["seed"].get<std::uint64_t>(), 0x67726170ULL + salt);
}

asd::KernelPtr build_kernel(const json& cfg) {
  const auto& d = cfg["dynamics"];
  const auto kind = d["kernel"].get<std::string>();
  if (kind == "tltm") {
    if (!d["thresholds"].is_null()) {
      std::vector<asd::TltmThresholds> t;
      for (const auto& row : d["thresholds"]) {
        auto v = row.get<std::vector<int>>();
        if (v.size() != 2) throw ConfigError("dynamics.thresholds: rows are [a_plus, a_minus]");
        t.push_back({v[0], v[1]});
      }
      return asd::tltm_kernel(std::move(t));
    }
    return asd::tltm_kernel(d["a_plus"].get<int>(), d["a_minus"].get<int>());
  }
  if (kind == "brca") {
    if (d["coordinating"].is_array()) return asd::brca_kernel(d["coordinating"].get<std::vector<bool>>());
    return asd::brca_kernel(d["coordinating"].get<bool>());
  }
  if (kind == "erg") return asd::erg_kernel(d["b"].get<double>(), d["c"].get<double>());
  return asd::table_kernel_from_json(read_file(d["path"].get<std::string>()));
}

namespace {

asd::NodeStatistics regular_stats(const json& g) {
  auto names = g["labels"].get<std::vector<std::string>>();
  auto fr = g["label_fractions"].get<std::vector<double>>();
  if (names.empty()) {
    if (fr.size() == 1) return asd::regular_statistics(g["k"].get<int>(), fr);
    for (std::size_t i = 0; i < fr.size(); ++i) names.push_back("c" + std::to_string(i));
  }
  if (names.size() != fr.size()) throw ConfigError("graph.labels and graph.label_fractions differ in length");
  return asd::regular_statistics(g["k"].get<int>(), fr, asd::LabelSet(names));
}

asd::PowerLawSpec powerlaw_spec(const json& g) {
  asd::PowerLawSpec s;
  s.beta = g["beta"].get<double>();
  s.k_max = g["k_max"].get<int>();
  if (!g["delta"].is_null()) s.delta = g["delta"].get<double>();
  if (!g["zeta"].is_null()) s.zeta = g["zeta"].get<double>();
  return s;
}

}  // namespace

asd::LabeledGraph build_graph(const json& cfg, std::optional<asd::NodeId> n_override, std::uint64_t salt) {
  const auto& g = cfg["graph"];
  const auto gen = g["generator"].get<std::string>();
  const auto seed = graph_seed(cfg, salt);
  if (gen == "edge_list") {
    if (n_override) throw ConfigError("an edge-list graph has a fixed size");
    std::optional<std::string> lm;
    if (!g["label_map"].is_null()) lm = g["label_map"].get<std::string>();
    return asd::load_edge_list(g["path"].get<std::string>(), lm).graph;
  }
  const asd::NodeId n = n_override ? *n_override : g["n"].get<asd::NodeId>();
  if (gen == "regular") {
    if (g["label_fractions"].size() == 1 && g["labels"].empty()) return asd::sample_regular(g["k"].get<int>(), n, seed);
    return asd::sample_configuration_model(regular_stats(g), n, seed);
  }
  if (gen == "cbm") {
    auto sizes = g["community_sizes"].get<std::vector<double>>();
    double total = 0.0;
    for (double s : sizes) total += s;
    // Sizes are rescaled when n differs from their sum.
    std::vector<asd::NodeId> scaled;
    asd::NodeId used = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      auto s = i + 1 == sizes.size() ? n - used : static_cast<asd::NodeId>(std::llround(sizes[i] / total * n));
      scaled.push_back(s);
      used += s;
    }
    return asd::sample_cbm(scaled, g["edge_means"].get<std::vector<std::vector<double>>>(), n, seed,
                           g["names"].get<std::vector<std::string>>());
  }
  if (gen == "configuration")
    return asd::sample_configuration_model(asd::NodeStatistics::from_json(read_file(g["statistics"].get<std::string>())),
                                           n, seed);
  auto seq = asd::sample_powerlaw_sequence(powerlaw_spec(g), n, seed);
  return asd::graph_from_sequence(seq, asd::hash_combine(seed, 1));
}

asd::NodeStatistics build_statistics(const json& cfg) {
  const auto& g = cfg["graph"];
  const auto gen = g["generator"].get<std::string>();
  if (gen == "regular") return regular_stats(g);
  if (gen == "configuration") return asd::NodeStatistics::from_json(read_file(g["statistics"].get<std::string>()));
  return asd::extract_statistics(build_graph(cfg));
}

std::vector<std::vector<double>> initial_fractions(const json& cfg, const asd::NodeStatistics& stats,
                                                   const asd::StateSet& states) {
  const auto& init = cfg["initial"];
  const std::size_t A = stats.num_labels(), X = states.size();
  if (!init.contains("counts")) return class_laws(init, A, X);
  if (!cfg["graph"].contains("n")) throw ConfigError("initial.counts needs graph.n");
  auto counts = init["counts"].get<std::vector<std::vector<double>>>();
  if (counts.size() != A) throw ConfigError("initial.counts: one row per label required");
  const double n = cfg["graph"]["n"].get<double>();
  const auto fill = state_index(states, init["fill_state"]);
  std::vector<std::vector<double>> out(A, std::vector<double>(X, 0.0));
  for (std::size_t a = 0; a < A; ++a) {
    if (counts[a].size() != X) throw ConfigError("initial.counts: one entry per state required");
    const double size = stats.p_label(a) * n;
    double placed = 0.0;
    for (std::size_t s = 0; s < X; ++s) {
      out[a][s] = size > 0.0 ? counts[a][s] / size : 0.0;
      placed += out[a][s];
    }
    if (placed > 1.0 + 1e-12) throw ConfigError("initial.counts exceed the class size");
    out[a][fill] += 1.0 - placed;
  }
  return out;
}

asd::InitialFactory build_initial(const json& cfg, const asd::StateSet& states) {
  const auto& init = cfg["initial"];
  const std::size_t X = states.size();
  if (init.contains("counts")) {
    auto counts = init["counts"].get<std::vector<std::vector<std::int64_t>>>();
    for (const auto& row : counts)
      if (row.size() != X) throw ConfigError("initial.counts: one entry per state required");
    const int fill = static_cast<int>(state_index(states, init["fill_state"]));
    return [counts, fill](const asd::LabeledGraph& g, asd::Rng& rng) {
      if (counts.size() != g.num_labels()) throw ConfigError("initial.counts: one row per label required");
      return asd::place_initial_states(g, counts, fill, rng);
    };
  }
  return [init, X](const asd::LabeledGraph& g, asd::Rng& rng) {
    return asd::draw_initial_states(g, class_laws(init, g.num_labels(), X), rng);
  };
}

asd::SimConfig sim_config(const json& cfg) {
  const auto& s = cfg["simulate"];
  asd::SimConfig c;
  c.horizon = s["horizon"].get<double>();
  c.dt = s["dt"].get<double>();
  c.runs = s["runs"].get<int>();
  c.gamma = s["gamma"].get<double>();
  c.seed = cfg["seed"].get<std::uint64_t>();
  c.threads = cfg["threads"].get<int>();
  const auto rec = s["record"].get<std::string>();
  if (rec == "global") {
    c.record = asd::Granularity::global;
  } else if (rec == "per_class") {
    c.record = asd::Granularity::per_class;
  } else if (rec == "per_class_and_state") {
    c.record = asd::Granularity::per_class_and_state;
  } else {
    throw ConfigError("simulate.record must be global, per_class or per_class_and_state");
  }
  if (c.runs < 1) throw ConfigError("simulate.runs must be positive");
  if (c.dt <= 0.0 || c.horizon < 0.0) throw ConfigError("simulate.dt must be positive and horizon nonnegative");
  return c;
}

asd::OdeConfig ode_config(const json& cfg) {
  const auto& o = cfg["ode"];
  asd::OdeConfig c;
  c.h = o["h"].get<double>();
  c.horizon = o["horizon"].get<double>();
  c.record_dt = o["record_dt"].get<double>();
  if (c.h <= 0.0 || c.horizon < 0.0) throw ConfigError("ode.h must be positive and horizon nonnegative");
  return c;
}

asd::PhiOptions phi_options(const json& cfg) {
  const auto& o = cfg["ode"];
  asd::PhiOptions p;
  const auto mode = o["phi_mode"].get<std::string>();
  if (mode == "exact") {
    p.mode = asd::PhiMode::exact;
  } else if (mode == "monte_carlo") {
    p.mode = asd::PhiMode::monte_carlo;
  } else if (mode == "automatic") {
    p.mode = asd::PhiMode::automatic;
  } else {
    throw ConfigError("ode.phi_mode must be exact, monte_carlo or automatic");
  }
  p.mc_samples = o["mc_samples"].get<std::size_t>();
  p.seed = cfg["seed"].get<std::uint64_t>();
  return p;
}

asd::StationaryConfig stationary_config(const json& cfg) {
  const auto& s = cfg["stationary"];
  asd::StationaryConfig c;
  c.grid = s["grid"].get<int>();
  c.tol = s["tol"].get<double>();
  c.damping = s["damping"].get<double>();
  c.max_iterations = s["max_iterations"].get<int>();
  c.newton_iterations = s["newton_iterations"].get<int>();
  c.dedup = s["dedup"].get<double>();
  c.eig_tol = s["eig_tol"].get<double>();
  c.seed = cfg["seed"].get<std::uint64_t>();
  return c;
}

asd::BasinConfig basin_config(const json& cfg) {
  const auto& b = cfg["basins"];
  asd::BasinConfig c;
  c.resolution = b["resolution"].get<int>();
  c.axis_x = b["axis_x"].get<std::size_t>();
  c.axis_y = b["axis_y"].get<std::size_t>();
  c.horizon = b["horizon"].get<double>();
  c.h = b["h"].get<double>();
  c.radius = b["radius"].get<double>();
  return c;
}

}  // namespace asdkit
