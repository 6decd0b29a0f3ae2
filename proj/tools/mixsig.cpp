#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixsig/mixsig.hpp"

namespace {

using namespace mixsig;
using namespace mixsig::cli;

struct Options {
  std::string config_path;
  std::string out_path;
  bool svg = false;
  std::optional<std::uint64_t> seed;
  std::string objective;
  std::string ls_mode;
  std::vector<std::string> overrides;
  std::vector<std::string> sweeps;
};

RunConfig resolve(const Options& opt) {
  RunConfig cfg = opt.config_path.empty() ? RunConfig{} : load_config(opt.config_path);
  for (const auto& o : opt.overrides) {
    apply_override(cfg, o);
  }
  if (opt.seed) {
    set_key(cfg, "seed", std::to_string(*opt.seed));
  }
  if (!opt.objective.empty()) {
    set_key(cfg, "objective", opt.objective);
  }
  if (!opt.ls_mode.empty()) {
    set_key(cfg, "ls_mode", opt.ls_mode);
  }
  return cfg;
}

std::string svg_path_for(const std::string& out) {
  const auto dot = out.find_last_of('.');
  const auto slash = out.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return out + ".svg";
  }
  return out.substr(0, dot) + ".svg";
}

int run(const std::string& command, const Options& opt) {
  RunConfig cfg = resolve(opt);
  const SweepSpec sweep = parse_sweep(opt.sweeps);
  if (!sweep.empty() && command != "sweep" && command != "capacity" && command != "optimize") {
    throw ConfigError("--sweep is not accepted by " + command);
  }
  if (opt.svg && opt.out_path.empty()) {
    throw ConfigError("--svg needs --out; the chart is written next to the CSV");
  }

  // Buffer the output so a failed run leaves no partial file behind.
  std::ostringstream buffer;
  std::ostringstream chart;
  Streams io{buffer, std::cerr};
  std::ostream* svg_out = opt.svg ? &chart : nullptr;

  int code = exit_ok;
  if (command == "steady-state") {
    code = cmd_steady_state(cfg, io);
  } else if (command == "capacity") {
    code = cmd_capacity(cfg, sweep, io);
  } else if (command == "delay") {
    code = cmd_delay(cfg, io);
  } else if (command == "sweep") {
    code = cmd_sweep(cfg, sweep, io, svg_out);
  } else if (command == "optimize") {
    code = cmd_optimize(cfg, sweep, io, svg_out);
  } else {
    code = cmd_validate(cfg, io);
  }

  if (opt.out_path.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream f(opt.out_path, std::ios::binary);
    if (!f) {
      throw ConfigError("cannot write " + opt.out_path);
    }
    f << buffer.str();
    if (opt.svg && !chart.str().empty()) {
      const auto path = svg_path_for(opt.out_path);
      std::ofstream s(path, std::ios::binary);
      if (!s) {
        throw ConfigError("cannot write " + path);
      }
      s << chart.str();
    } else if (opt.svg) {
      std::cerr << "note: " << command << " produces no chart\n";
    }
  }
  return code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signal timing for mixed CAV/HDV traffic"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"steady-state", "platoon-state distribution: closed form vs power iteration"},
      {"capacity", "expected capacity, optionally over a p sweep"},
      {"delay", "per-approach expected delay at the configured cycle"},
      {"sweep", "expected delay over a one- or two-parameter grid"},
      {"optimize", "minimum and optimal cycle length"},
      {"validate", "closed forms vs numeric oracles, plus printed-formula checks"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config_path, "key = value configuration file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_path, "write output here instead of stdout");
    sub->add_flag("--svg", opt.svg, "also write an SVG chart next to --out");
    sub->add_option("--seed", opt.seed, "RNG seed");
    sub->add_option("--objective", opt.objective, "total | average")
        ->check(CLI::IsMember({"total", "average"}));
    sub->add_option("--ls-mode", opt.ls_mode, "derived | paper")
        ->check(CLI::IsMember({"derived", "paper"}));
    sub->add_option("--set", opt.overrides, "override one key: --set key=value")
        ->allow_extra_args(false);
    sub->add_option("--sweep", opt.sweeps, "variable:lo:hi:step (up to two)")
        ->allow_extra_args(false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_infeasible;
  }
}
