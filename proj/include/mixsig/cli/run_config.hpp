#pragma once

// Flat "key = value" run configuration. Keys are the lower-snake-cased
// parameter names of the reference table plus a few run controls. Absent keys
// take the reference defaults; range-valued parameters default to the middle
// of their reference interval, except the penetration rate, which has no
// default and must be given wherever it is needed.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixsig/capacity.hpp"
#include "mixsig/cli/format.hpp"
#include "mixsig/delay.hpp"
#include "mixsig/signal.hpp"

namespace mixsig::cli {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  VehicleParams vehicle;
  int n = 5;
  HdvStartupParams startup;
  std::optional<double> p;
  double cycle_length = 90.0;
  std::vector<double> green_ratio{0.5, 0.5};
  std::vector<double> q{0.25, 0.25};
  double x_c = 0.95;
  double l_c = 4.0;
  std::vector<double> critical_flow_ratios;
  std::optional<int> phases;
  LostTimeMode ls_mode = LostTimeMode::derived;
  Objective objective = Objective::total_per_cycle;
  std::uint64_t seed = 1;
  double cycle_max = 300.0;
  std::size_t mc_samples = 1000000;

  std::vector<std::string> warnings;

  double require_p() const {
    if (!p) {
      throw ConfigError("penetration rate p is required: add 'p = <value>' to the config or "
                        "pass --set p=<value>");
    }
    return *p;
  }

  std::size_t approach_count() const {
    return std::max(q.size(), green_ratio.size());
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) {
      throw std::invalid_argument(text);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  }
}

inline long long parse_integer(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) {
      throw std::invalid_argument(text);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(parse_double(key, trim(item)));
  }
  if (out.empty()) {
    throw ConfigError("key '" + key + "' needs at least one value");
  }
  return out;
}

} // namespace detail

/// Keys accepted by set_key, in the order they are echoed.
inline const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "omega_e", "omega_v",      "n",       "v_free",      "t_r",
      "t_a",     "tau_safe",     "tau_hdv", "vehicle_length", "p",
      "cycle_length", "green_ratio", "q",    "x_c",         "l_c",
      "critical_flow_ratios", "phases", "ls_mode", "objective", "seed",
      "cycle_max", "mc_samples"};
  return keys;
}

inline void set_key(RunConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = detail::trim(raw);
  using detail::parse_double;
  if (key == "omega_e") {
    cfg.vehicle.omega_e = parse_double(key, value);
  } else if (key == "omega_v") {
    cfg.vehicle.omega_v = parse_double(key, value);
  } else if (key == "n") {
    cfg.n = static_cast<int>(detail::parse_integer(key, value));
  } else if (key == "v_free") {
    cfg.vehicle.v_free = parse_double(key, value);
  } else if (key == "t_r") {
    cfg.startup.reaction_time = parse_double(key, value);
  } else if (key == "t_a") {
    cfg.startup.accel_time = parse_double(key, value);
  } else if (key == "tau_safe") {
    cfg.vehicle.tau_safe = parse_double(key, value);
  } else if (key == "tau_hdv") {
    cfg.vehicle.tau_hdv = parse_double(key, value);
  } else if (key == "vehicle_length") {
    cfg.vehicle.vehicle_length = parse_double(key, value);
  } else if (key == "p") {
    cfg.p = parse_double(key, value);
  } else if (key == "cycle_length") {
    cfg.cycle_length = parse_double(key, value);
  } else if (key == "green_ratio") {
    cfg.green_ratio = detail::parse_list(key, value);
  } else if (key == "q") {
    cfg.q = detail::parse_list(key, value);
  } else if (key == "x_c") {
    cfg.x_c = parse_double(key, value);
  } else if (key == "l_c") {
    cfg.l_c = parse_double(key, value);
  } else if (key == "critical_flow_ratios") {
    cfg.critical_flow_ratios =
        value == "derived" ? std::vector<double>{} : detail::parse_list(key, value);
  } else if (key == "phases") {
    if (value == "auto") {
      cfg.phases.reset();
    } else {
      cfg.phases = static_cast<int>(detail::parse_integer(key, value));
    }
  } else if (key == "ls_mode") {
    if (value == "derived") {
      cfg.ls_mode = LostTimeMode::derived;
    } else if (value == "paper") {
      cfg.ls_mode = LostTimeMode::paper;
    } else {
      throw ConfigError("key 'ls_mode' must be 'derived' or 'paper', got '" + value + "'");
    }
  } else if (key == "objective") {
    if (value == "total") {
      cfg.objective = Objective::total_per_cycle;
    } else if (value == "average") {
      cfg.objective = Objective::average_per_vehicle;
    } else {
      throw ConfigError("key 'objective' must be 'total' or 'average', got '" + value + "'");
    }
  } else if (key == "seed") {
    const long long v = detail::parse_integer(key, value);
    if (v < 0) {
      throw ConfigError("key 'seed' must be non-negative");
    }
    cfg.seed = static_cast<std::uint64_t>(v);
  } else if (key == "cycle_max") {
    cfg.cycle_max = parse_double(key, value);
  } else if (key == "mc_samples") {
    const long long v = detail::parse_integer(key, value);
    if (v < 1) {
      throw ConfigError("key 'mc_samples' must be >= 1");
    }
    cfg.mc_samples = static_cast<std::size_t>(v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

inline void validate(RunConfig& cfg) {
  cfg.warnings.clear();
  if (cfg.n < 1) {
    throw ConfigError("n must be >= 1");
  }
  if (cfg.p && !(*cfg.p >= 0.0 && *cfg.p <= 1.0)) {
    throw ConfigError("p must lie in [0, 1]");
  }
  try {
    cfg.vehicle.validate();
    cfg.startup.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.cycle_length > 0.0) || !(cfg.cycle_max > 0.0)) {
    throw ConfigError("cycle_length and cycle_max must be positive");
  }
  if (cfg.q.size() != cfg.green_ratio.size() && cfg.q.size() != 1 &&
      cfg.green_ratio.size() != 1) {
    throw ConfigError("q and green_ratio lists must have equal length (or one of them a "
                      "single value)");
  }
  for (double g : cfg.green_ratio) {
    if (!(g > 0.0 && g <= 1.0)) {
      throw ConfigError("green_ratio values must lie in (0, 1]");
    }
    if (g < 0.25 || g > 0.75) {
      cfg.warnings.push_back("green_ratio " + fmt(g) + " outside reference range [0.25, 0.75]");
    }
  }
  for (double v : cfg.q) {
    if (!(v >= 0.0)) {
      throw ConfigError("q values must be non-negative");
    }
    if (v < 0.15 || v > 0.35) {
      cfg.warnings.push_back("q " + fmt(v) + " outside reference range [0.15, 0.35] veh/s");
    }
  }
  if (cfg.cycle_length < 60.0 || cfg.cycle_length > 120.0) {
    cfg.warnings.push_back("cycle_length " + fmt(cfg.cycle_length) +
                           " outside reference range [60, 120] s");
  }
  if (!(cfg.x_c > 0.0 && cfg.x_c <= 1.0)) {
    throw ConfigError("x_c must lie in (0, 1]");
  }
  if (!(cfg.l_c >= 0.0)) {
    throw ConfigError("l_c must be non-negative");
  }
  if (cfg.phases && *cfg.phases < 1) {
    throw ConfigError("phases must be >= 1");
  }
  if (cfg.mc_samples < 1) {
    throw ConfigError("mc_samples must be >= 1");
  }
}

/// Parses a config stream. Blank lines and '#' comments are ignored; a key
/// may appear once.
inline RunConfig parse_config(std::istream& in, const std::string& source = "<config>") {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    line = detail::trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) {
      throw ConfigError(where + "expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    if (auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(where + "duplicate key '" + key + "' (first set on line " +
                        std::to_string(it->second) + ")");
    }
    seen[key] = lineno;
    try {
      set_key(cfg, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse_config(in, path);
}

/// Applies a "key=value" override.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  set_key(cfg, detail::trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

inline std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += (i ? "," : "") + fmt(values[i]);
  }
  return out;
}

/// Fully resolved configuration as "key = value" lines in known_keys() order.
inline std::vector<std::string> resolved_lines(const RunConfig& cfg) {
  std::vector<std::string> lines;
  const auto add = [&](const std::string& k, const std::string& v) {
    lines.push_back(k + " = " + v);
  };
  add("omega_e", fmt(cfg.vehicle.omega_e));
  add("omega_v", fmt(cfg.vehicle.omega_v));
  add("n", std::to_string(cfg.n));
  add("v_free", fmt(cfg.vehicle.v_free));
  add("t_r", fmt(cfg.startup.reaction_time));
  add("t_a", fmt(cfg.startup.accel_time));
  add("tau_safe", fmt(cfg.vehicle.tau_safe));
  add("tau_hdv", fmt(cfg.vehicle.tau_hdv));
  add("vehicle_length", fmt(cfg.vehicle.vehicle_length));
  add("p", cfg.p ? fmt(*cfg.p) : std::string("unset"));
  add("cycle_length", fmt(cfg.cycle_length));
  add("green_ratio", join(cfg.green_ratio));
  add("q", join(cfg.q));
  add("x_c", fmt(cfg.x_c));
  add("l_c", fmt(cfg.l_c));
  add("critical_flow_ratios",
      cfg.critical_flow_ratios.empty() ? std::string("derived") : join(cfg.critical_flow_ratios));
  add("phases", cfg.phases ? std::to_string(*cfg.phases) : std::string("auto"));
  add("ls_mode", to_string(cfg.ls_mode));
  add("objective", to_string(cfg.objective));
  add("seed", std::to_string(cfg.seed));
  add("cycle_max", fmt(cfg.cycle_max));
  add("mc_samples", std::to_string(cfg.mc_samples));
  return lines;
}

inline MarkovSpec markov_spec(const RunConfig& cfg, double p) {
  return MarkovSpec(cfg.n, p);
}

/// Intersection built from the run config at penetration rate p. A single
/// q or green_ratio value is shared by every approach.
inline IntersectionConfig intersection(const RunConfig& cfg, double p) {
  IntersectionConfig ic;
  const std::size_t count = cfg.approach_count();
  for (std::size_t i = 0; i < count; ++i) {
    Approach a;
    a.demand.arrival_rate = cfg.q.size() == 1 ? cfg.q[0] : cfg.q[i];
    a.green_ratio = cfg.green_ratio.size() == 1 ? cfg.green_ratio[0] : cfg.green_ratio[i];
    a.startup = cfg.startup;
    ic.approaches.push_back(a);
  }
  ic.markov = MarkovSpec(cfg.n, p);
  ic.vehicle = cfg.vehicle;
  ic.saturation_degree = cfg.x_c;
  ic.clearance_lost = cfg.l_c;
  ic.critical_flow_ratios = cfg.critical_flow_ratios;
  ic.phases = cfg.phases;
  ic.ls_mode = cfg.ls_mode;
  return ic;
}

} // namespace mixsig::cli
