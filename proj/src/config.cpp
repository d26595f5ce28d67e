#include "dwnls/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "dwnls/errors.hpp"

namespace dwnls {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + raw + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double(key, item));
  }
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& raw)>;

// Table of every accepted key. Unknown keys are an error.
const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto d = [&](const char* k, auto get) {
      t[k] = [get](RunConfig& c, const std::string& key, const std::string& raw) { get(c) = to_double(key, raw); };
    };
    auto i = [&](const char* k, auto get) {
      t[k] = [get](RunConfig& c, const std::string& key, const std::string& raw) {
        get(c) = static_cast<std::remove_reference_t<decltype(get(c))>>(to_integer(key, raw));
      };
    };
    auto b = [&](const char* k, auto get) {
      t[k] = [get](RunConfig& c, const std::string& key, const std::string& raw) { get(c) = to_bool(key, raw); };
    };
    auto s = [&](const char* k, auto get) {
      t[k] = [get](RunConfig& c, const std::string&, const std::string& raw) { get(c) = trim(raw); };
    };
    auto l = [&](const char* k, auto get) {
      t[k] = [get](RunConfig& c, const std::string& key, const std::string& raw) { get(c) = to_list(key, raw); };
    };

    s("potential.family", [](RunConfig& c) -> auto& { return c.potential.family; });
    d("potential.a", [](RunConfig& c) -> auto& { return c.potential.a; });
    d("potential.beta", [](RunConfig& c) -> auto& { return c.potential.beta; });
    d("potential.transverse_freq", [](RunConfig& c) -> auto& { return c.potential.transverse_freq; });
    d("potential.omega0", [](RunConfig& c) -> auto& { return c.potential.omega0; });
    d("potential.barrier", [](RunConfig& c) -> auto& { return c.potential.barrier; });
    d("potential.width", [](RunConfig& c) -> auto& { return c.potential.width; });

    i("grid.dim", [](RunConfig& c) -> auto& { return c.grid.dim; });
    d("grid.L", [](RunConfig& c) -> auto& { return c.grid.L; });
    i("grid.n", [](RunConfig& c) -> auto& { return c.grid.n; });

    d("physics.hbar", [](RunConfig& c) -> auto& { return c.physics.hbar; });
    d("physics.epsilon", [](RunConfig& c) -> auto& { return c.physics.epsilon; });
    d("physics.eta", [](RunConfig& c) -> auto& { return c.physics.eta; });
    i("physics.sigma", [](RunConfig& c) -> auto& { return c.physics.sigma; });
    b("physics.time_rescaled", [](RunConfig& c) -> auto& { return c.physics.time_rescaled; });

    d("time.dt", [](RunConfig& c) -> auto& { return c.time.dt; });
    i("time.steps_per_period", [](RunConfig& c) -> auto& { return c.time.steps_per_period; });
    d("time.t_final", [](RunConfig& c) -> auto& { return c.time.t_final; });
    d("time.periods", [](RunConfig& c) -> auto& { return c.time.periods; });
    i("time.output_stride", [](RunConfig& c) -> auto& { return c.time.output_stride; });
    i("time.snapshot_stride", [](RunConfig& c) -> auto& { return c.time.snapshot_stride; });

    i("solver.k", [](RunConfig& c) -> auto& { return c.solver.k; });
    d("solver.tol", [](RunConfig& c) -> auto& { return c.solver.tol; });
    i("solver.max_iterations", [](RunConfig& c) -> auto& { return c.solver.max_iterations; });
    i("solver.seed", [](RunConfig& c) -> auto& { return c.solver.seed; });
    s("solver.c_sigma", [](RunConfig& c) -> auto& { return c.solver.c_sigma; });
    i("solver.agmon_resolution", [](RunConfig& c) -> auto& { return c.solver.agmon_resolution; });

    b("output.eigenvectors", [](RunConfig& c) -> auto& { return c.output.eigenvectors; });
    b("output.projections", [](RunConfig& c) -> auto& { return c.output.projections; });
    d("output.blowup_factor", [](RunConfig& c) -> auto& { return c.output.blowup_factor; });

    l("sweep.hbars", [](RunConfig& c) -> auto& { return c.sweep.hbars; });
    l("sweep.epsilons", [](RunConfig& c) -> auto& { return c.sweep.epsilons; });

    s("initial.state", [](RunConfig& c) -> auto& { return c.initial.state; });
    d("initial.zeta_R", [](RunConfig& c) -> auto& { return c.initial.zeta_R; });
    d("initial.zeta_L", [](RunConfig& c) -> auto& { return c.initial.zeta_L; });

    d("twomode.dt", [](RunConfig& c) -> auto& { return c.twomode.dt; });
    i("twomode.stride", [](RunConfig& c) -> auto& { return c.twomode.stride; });
    l("twomode.scan_etas", [](RunConfig& c) -> auto& { return c.twomode.scan_etas; });
    d("twomode.scan_periods", [](RunConfig& c) -> auto& { return c.twomode.scan_periods; });
    i("twomode.scan_steps_per_period", [](RunConfig& c) -> auto& { return c.twomode.scan_steps_per_period; });
    d("twomode.bisection_tol", [](RunConfig& c) -> auto& { return c.twomode.bisection_tol; });

    d("compare.pair_ratio", [](RunConfig& c) -> auto& { return c.compare.pair_ratio; });
    return t;
  }();
  return table;
}

void validate(const RunConfig& c) {
  static const std::set<std::string> families{"quartic", "harmonic_barrier", "harmonic"};
  if (!families.count(c.potential.family)) throw ConfigError("potential.family: unknown family '" + c.potential.family + "'");
  if (c.grid.dim != 1 && c.grid.dim != 2) throw ConfigError("grid.dim must be 1 or 2");
  if (!(c.physics.hbar > 0.0)) throw ConfigError("physics.hbar must be positive");
  if (c.physics.sigma < 1) throw ConfigError("physics.sigma must be a positive integer");
  if (c.time.dt && !(*c.time.dt > 0.0)) throw ConfigError("time.dt must be positive");
  if (c.time.steps_per_period < 1) throw ConfigError("time.steps_per_period must be >= 1");
  if (c.time.output_stride < 1) throw ConfigError("time.output_stride must be >= 1");
  if (c.solver.k < 2) throw ConfigError("solver.k must be >= 2");
  if (c.solver.c_sigma != "projected" && c.solver.c_sigma != "paper_literal")
    throw ConfigError("solver.c_sigma must be projected or paper_literal");
  static const std::set<std::string> states{"phi_R", "phi_L", "phi1", "phi2", "phi3", "mix"};
  if (!states.count(c.initial.state)) throw ConfigError("initial.state: unknown state '" + c.initial.state + "'");
  if (c.initial.state == "phi3" && c.solver.k < 3) throw ConfigError("initial.state = phi3 needs solver.k >= 3");
  if (c.compare.pair_ratio != 0.0 && !(c.compare.pair_ratio > 1.0)) throw ConfigError("compare.pair_ratio must exceed 1");
  try {
    (void)c.make_grid();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

}  // namespace

Potential RunConfig::make_potential() const {
  const auto& p = potential;
  if (p.family == "quartic") {
    std::vector<double> tf;
    if (grid.dim == 2) tf.push_back(p.transverse_freq);
    return builtin_quartic(p.a, p.beta, tf);
  }
  if (p.family == "harmonic_barrier") return builtin_harmonic_barrier(p.omega0, p.barrier, p.width, grid.dim);
  if (p.family == "harmonic") return builtin_harmonic(p.omega0, grid.dim);
  throw ConfigError("potential.family: unknown family '" + p.family + "'");
}

Grid RunConfig::make_grid() const { return Grid(grid.dim, grid.L, grid.n); }

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  const auto& table = setters();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("key '" + section + "' outside of any section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = table.find(full);
      if (it == table.end()) throw ConfigError("unknown key '" + full + "'");
      it->second(cfg, full, value.data());
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

template <class T>
nlohmann::json opt(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  json j;
  j["potential"] = {{"family", c.potential.family},   {"a", c.potential.a},
                    {"beta", c.potential.beta},       {"transverse_freq", c.potential.transverse_freq},
                    {"omega0", c.potential.omega0},   {"barrier", c.potential.barrier},
                    {"width", c.potential.width}};
  j["grid"] = {{"dim", c.grid.dim}, {"L", c.grid.L}, {"n", c.grid.n}};
  j["physics"] = {{"hbar", c.physics.hbar},   {"epsilon", c.physics.epsilon},
                  {"eta", opt(c.physics.eta)}, {"sigma", c.physics.sigma},
                  {"time_rescaled", c.physics.time_rescaled}};
  j["time"] = {{"dt", opt(c.time.dt)},           {"steps_per_period", c.time.steps_per_period},
               {"t_final", opt(c.time.t_final)}, {"periods", c.time.periods},
               {"output_stride", c.time.output_stride}, {"snapshot_stride", c.time.snapshot_stride}};
  j["solver"] = {{"k", c.solver.k},       {"tol", c.solver.tol},           {"max_iterations", c.solver.max_iterations},
                 {"seed", c.solver.seed}, {"c_sigma", c.solver.c_sigma}, {"agmon_resolution", c.solver.agmon_resolution}};
  j["output"] = {{"eigenvectors", c.output.eigenvectors},
                 {"projections", c.output.projections},
                 {"blowup_factor", c.output.blowup_factor}};
  j["sweep"] = {{"hbars", c.sweep.hbars}, {"epsilons", c.sweep.epsilons}};
  j["initial"] = {{"state", c.initial.state}, {"zeta_R", c.initial.zeta_R}, {"zeta_L", c.initial.zeta_L}};
  j["twomode"] = {{"dt", opt(c.twomode.dt)},
                  {"stride", c.twomode.stride},
                  {"scan_etas", c.twomode.scan_etas},
                  {"scan_periods", c.twomode.scan_periods},
                  {"scan_steps_per_period", c.twomode.scan_steps_per_period},
                  {"bisection_tol", c.twomode.bisection_tol}};
  j["compare"] = {{"pair_ratio", c.compare.pair_ratio}};
  return j;
}

std::string canonical_text(const RunConfig& cfg) {
  // nlohmann::json objects iterate in sorted key order, which makes this stable.
  const nlohmann::json j = to_json(cfg);
  std::ostringstream os;
  for (const auto& [section, body] : j.items()) {
    os << "[" << section << "]\n";
    for (const auto& [key, value] : body.items()) {
      if (value.is_null()) continue;
      if (value.is_array()) {
        os << key << " = ";
        for (std::size_t i = 0; i < value.size(); ++i) os << (i ? ", " : "") << value[i].dump();
        os << "\n";
      } else if (value.is_string()) {
        os << key << " = " << value.get<std::string>() << "\n";
      } else {
        os << key << " = " << value.dump() << "\n";
      }
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace dwnls
