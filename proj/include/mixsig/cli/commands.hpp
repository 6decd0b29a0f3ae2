#pragma once

// Subcommand implementations. Each writes CSV (or the validation report) to
// `out` and human-readable notes to `log`, and returns the process exit code.
// Configuration problems surface as ConfigError, regime problems as
// ModelError; the executable maps those to exit codes 1 and 2.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mixsig/capacity.hpp"
#include "mixsig/cli/format.hpp"
#include "mixsig/cli/run_config.hpp"
#include "mixsig/cli/svg.hpp"
#include "mixsig/delay.hpp"
#include "mixsig/markov.hpp"
#include "mixsig/oracle.hpp"
#include "mixsig/signal.hpp"

namespace mixsig::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_infeasible = 2, exit_oracle = 3 };

struct Streams {
  std::ostream& out;
  std::ostream& log;
};

struct SweepAxis {
  std::string variable;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  /// lo, lo + step, ... up to hi (inclusive within rounding), each value
  /// rounded to 12 significant digits.
  std::vector<double> values() const {
    std::vector<double> out;
    for (std::size_t k = 0;; ++k) {
      const double v = lo + step * static_cast<double>(k);
      if (v > hi + 1e-9 * step) {
        break;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", v);
      out.push_back(std::stod(buf));
    }
    return out;
  }
};

struct SweepSpec {
  std::vector<SweepAxis> axes;

  bool empty() const { return axes.empty(); }
  bool sweeps(const std::string& var) const {
    return std::any_of(axes.begin(), axes.end(),
                       [&](const SweepAxis& a) { return a.variable == var; });
  }
};

inline const std::vector<std::string>& sweepable_keys() {
  static const std::vector<std::string> keys{
      "p",       "q",        "green_ratio", "cycle_length",   "t_r",    "t_a",  "omega_e",
      "omega_v", "tau_safe", "tau_hdv",     "vehicle_length", "v_free", "x_c",  "l_c"};
  return keys;
}

/// Parses "variable:lo:hi:step".
inline SweepAxis parse_sweep_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    parts.push_back(detail::trim(item));
  }
  if (parts.size() != 4) {
    throw ConfigError("sweep '" + text + "' must have the form variable:lo:hi:step");
  }
  SweepAxis axis{parts[0], detail::parse_double("sweep lo", parts[1]),
                 detail::parse_double("sweep hi", parts[2]),
                 detail::parse_double("sweep step", parts[3])};
  const auto& keys = sweepable_keys();
  if (std::find(keys.begin(), keys.end(), axis.variable) == keys.end()) {
    throw ConfigError("cannot sweep '" + axis.variable + "'");
  }
  if (!(axis.lo < axis.hi)) {
    throw ConfigError("sweep '" + text + "': lo must be below hi");
  }
  if (!(axis.step > 0.0)) {
    throw ConfigError("sweep '" + text + "': step must be positive");
  }
  return axis;
}

inline SweepSpec parse_sweep(const std::vector<std::string>& texts) {
  if (texts.size() > 2) {
    throw ConfigError("at most two sweep dimensions are supported");
  }
  SweepSpec spec;
  for (const auto& t : texts) {
    spec.axes.push_back(parse_sweep_axis(t));
  }
  if (spec.axes.size() == 2 && spec.axes[0].variable == spec.axes[1].variable) {
    throw ConfigError("the two sweep dimensions must differ");
  }
  return spec;
}

inline void set_numeric(RunConfig& cfg, const std::string& key, double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  set_key(cfg, key, buf);
}

inline void write_preamble(CsvWriter& csv, const std::string& command, const RunConfig& cfg) {
  csv.comment("mixsig " + command);
  for (const auto& line : resolved_lines(cfg)) {
    csv.comment(line);
  }
  for (const auto& w : cfg.warnings) {
    csv.comment("warning: " + w);
  }
}

inline void log_warnings(const RunConfig& cfg, std::ostream& log) {
  for (const auto& w : cfg.warnings) {
    log << "warning: " << w << '\n';
  }
}

// ---------------------------------------------------------------------------

inline int cmd_steady_state(RunConfig cfg, Streams io) {
  validate(cfg);
  const double p = cfg.require_p();
  const MarkovSpec spec = markov_spec(cfg, p);
  const auto closed = steady_state_closed_form(spec);
  const auto iterated = steady_state_power_iteration(build_transition_matrix(spec), 1e-12);

  CsvWriter csv(io.out);
  write_preamble(csv, "steady-state", cfg);
  csv.header({"state", "closed_form", "power_iteration", "abs_diff"});
  double worst = 0.0;
  for (std::size_t i = 0; i < closed.size(); ++i) {
    const double diff = std::abs(closed[i] - iterated[i]);
    worst = std::max(worst, diff);
    csv.row({std::to_string(i), fmt(closed[i]), fmt(iterated[i]), fmt(diff)});
  }
  csv.comment("sum_closed_form = " + fmt(closed.sum()));
  csv.comment("max_discrepancy = " + fmt(worst));
  log_warnings(cfg, io.log);
  return exit_ok;
}

inline int cmd_capacity(RunConfig cfg, const SweepSpec& sweep, Streams io) {
  validate(cfg);
  if (sweep.axes.size() > 1 || (!sweep.empty() && sweep.axes[0].variable != "p")) {
    throw ConfigError("capacity accepts a single sweep over p");
  }
  const std::vector<double> ps = sweep.empty() ? std::vector<double>{cfg.require_p()}
                                               : sweep.axes[0].values();
  for (double p : ps) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("penetration rate " + fmt(p) + " outside [0, 1]");
    }
  }

  CsvWriter csv(io.out);
  write_preamble(csv, "capacity", cfg);
  csv.header({"p", "expected_gap", "capacity", "capacity_vph"});
  bool non_decreasing = true;
  double previous = -1.0;
  for (double p : ps) {
    const auto c = mixed_capacity(markov_spec(cfg, p), cfg.vehicle);
    non_decreasing = non_decreasing && c.value >= previous;
    previous = c.value;
    csv.row({fmt(p), fmt(c.expected_gap), fmt(c.value), fmt(3600.0 * c.value)});
  }
  if (ps.size() > 1) {
    csv.comment("non_decreasing_in_p = " + flag(non_decreasing));
  }
  if (!cav_gaps_dominate(cfg.n, cfg.vehicle)) {
    const std::string note = "a CAV gap exceeds the HDV gap; capacity need not rise with p";
    csv.comment("warning: " + note);
    io.log << "warning: " << note << '\n';
  }
  log_warnings(cfg, io.log);
  return exit_ok;
}

inline int cmd_delay(RunConfig cfg, Streams io) {
  validate(cfg);
  const double p = cfg.require_p();
  const auto ic = intersection(cfg, p);
  const auto caps = approach_capacities(ic);

  CsvWriter csv(io.out);
  write_preamble(csv, "delay", cfg);
  csv.header({"approach", "q", "green_ratio", "red", "green", "capacity", "D_cav", "D_hdv",
              "E_D", "E_Dbar", "t_d", "t_d_prime", "n_total", "n1", "n2", "saturated",
              "beyond_closed_form"});
  bool any_saturated = false;
  for (std::size_t i = 0; i < ic.approaches.size(); ++i) {
    const auto& a = ic.approaches[i];
    const auto timing = SignalTiming::from_cycle(cfg.cycle_length, a.green_ratio);
    std::vector<std::string> row{std::to_string(i), fmt(a.demand.arrival_rate),
                                 fmt(a.green_ratio), fmt(timing.red), fmt(timing.green),
                                 fmt(caps[i])};
    try {
      const auto d = approach_expected_delay(a, p, caps[i], cfg.cycle_length,
                                             EvaluationPolicy::numeric_fallback);
      const bool has_cav = p > 0.0;
      const bool has_hdv = p < 1.0;
      const double nan = std::nan("");
      row.insert(row.end(),
                 {fmt(has_cav ? d.cav.total_delay : nan), fmt(has_hdv ? d.hdv.total_delay : nan),
                  fmt(d.expected.total), fmt(d.expected.avg),
                  fmt(has_cav ? d.cav.queue_clear_time : nan),
                  fmt(has_hdv ? d.hdv.queue_clear_time : nan),
                  fmt(a.demand.arrival_rate * cfg.cycle_length), fmt(has_hdv ? d.hdv.n1 : nan),
                  fmt(has_hdv ? d.hdv.n2 : nan), "0", flag(d.beyond_closed_form)});
    } catch (const ModelError& e) {
      any_saturated = true;
      io.log << "approach " << i << ": " << e.what() << '\n';
      for (int k = 0; k < 9; ++k) {
        row.push_back("nan");
      }
      row.insert(row.end(), {"1", "0"});
    }
    csv.row(row);
  }
  log_warnings(cfg, io.log);
  return any_saturated ? exit_infeasible : exit_ok;
}

struct SweepCell {
  std::vector<double> coords;
  double capacity = std::nan("");
  double total = std::nan("");
  double avg = std::nan("");
  bool saturated = false;
  bool beyond_closed_form = false;
};

inline std::vector<SweepCell> evaluate_sweep(const RunConfig& base, const SweepSpec& sweep) {
  std::vector<std::vector<double>> grids;
  for (const auto& axis : sweep.axes) {
    grids.push_back(axis.values());
  }
  std::vector<SweepCell> cells;
  const std::size_t outer = grids[0].size();
  const std::size_t inner = grids.size() > 1 ? grids[1].size() : 1;
  for (std::size_t i = 0; i < outer; ++i) {
    for (std::size_t j = 0; j < inner; ++j) {
      RunConfig cfg = base;
      SweepCell cell;
      cell.coords.push_back(grids[0][i]);
      set_numeric(cfg, sweep.axes[0].variable, grids[0][i]);
      if (grids.size() > 1) {
        cell.coords.push_back(grids[1][j]);
        set_numeric(cfg, sweep.axes[1].variable, grids[1][j]);
      }
      validate(cfg);
      const double p = cfg.require_p();
      const auto ic = intersection(cfg, p);
      cell.capacity = shared_capacity(ic);
      try {
        const auto d =
            evaluate_intersection(ic, cfg.cycle_length, EvaluationPolicy::numeric_fallback);
        cell.total = d.total;
        cell.avg = d.avg_per_vehicle;
        cell.beyond_closed_form = d.beyond_closed_form;
      } catch (const ModelError&) {
        cell.saturated = true;
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

/// svg may be null.
inline int cmd_sweep(RunConfig cfg, const SweepSpec& sweep, Streams io, std::ostream* svg_out) {
  validate(cfg);
  if (sweep.empty()) {
    throw ConfigError("sweep needs at least one --sweep variable:lo:hi:step");
  }
  const auto cells = evaluate_sweep(cfg, sweep);
  if (std::all_of(cells.begin(), cells.end(), [](const SweepCell& c) { return c.saturated; })) {
    throw InfeasibleError("no feasible cells: every grid point is saturated or over capacity");
  }

  CsvWriter csv(io.out);
  write_preamble(csv, "sweep", cfg);
  std::vector<std::string> header;
  for (const auto& axis : sweep.axes) {
    header.push_back(axis.variable);
  }
  header.insert(header.end(),
                {"capacity", "E_D", "E_Dbar", "saturated", "beyond_closed_form"});
  csv.header(header);
  std::size_t saturated = 0;
  for (const auto& c : cells) {
    std::vector<std::string> row;
    for (double v : c.coords) {
      row.push_back(fmt(v));
    }
    row.insert(row.end(), {fmt(c.capacity), fmt(c.total), fmt(c.avg), flag(c.saturated),
                           flag(c.beyond_closed_form)});
    csv.row(row);
    saturated += c.saturated ? 1 : 0;
  }
  csv.comment("saturated_cells = " + std::to_string(saturated) + " of " +
              std::to_string(cells.size()));

  if (svg_out) {
    if (sweep.axes.size() == 1) {
      svg::Series s{"E[Dbar]", {}, {}};
      for (const auto& c : cells) {
        s.x.push_back(c.coords[0]);
        s.y.push_back(c.avg);
      }
      svg::line_chart(*svg_out, "Expected average delay", sweep.axes[0].variable,
                      "E[Dbar] (s/veh)", {s});
    } else {
      const auto xs = sweep.axes[0].values();
      const auto ys = sweep.axes[1].values();
      std::vector<double> values;
      for (const auto& c : cells) {
        values.push_back(c.avg);
      }
      svg::heatmap(*svg_out, "Expected average delay (s/veh)", sweep.axes[0].variable,
                   sweep.axes[1].variable, xs, ys, values);
    }
  }
  log_warnings(cfg, io.log);
  return exit_ok;
}

inline int cmd_optimize(RunConfig cfg, const SweepSpec& sweep, Streams io,
                        std::ostream* svg_out) {
  validate(cfg);
  if (sweep.axes.size() > 1 || (!sweep.empty() && sweep.axes[0].variable != "p")) {
    throw ConfigError("optimize accepts a single sweep over p");
  }
  CsvWriter csv(io.out);

  if (!sweep.empty()) {
    const auto ps = sweep.axes[0].values();
    const auto rows =
        optimal_cycle_curve(intersection(cfg, ps.front()), ps, cfg.cycle_max, cfg.objective);
    write_preamble(csv, "optimize", cfg);
    csv.header({"p", "c_min", "c_star_paper", "c_opt_numeric", "avg_delay", "total_delay",
                "beyond_closed_form"});
    bool cycle_monotone = true;
    bool delay_monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      csv.row({fmt(r.p), fmt(r.c_min), fmt(r.c_star_paper.value_or(std::nan(""))),
               fmt(r.c_opt), fmt(r.avg_delay), fmt(r.total_delay), flag(r.beyond_closed_form)});
      if (i > 0) {
        cycle_monotone = cycle_monotone && r.c_opt <= rows[i - 1].c_opt;
        delay_monotone = delay_monotone && r.avg_delay <= rows[i - 1].avg_delay;
      }
    }
    csv.comment("optimal_cycle_non_increasing = " + flag(cycle_monotone));
    csv.comment("avg_delay_non_increasing = " + flag(delay_monotone));
    io.log << "optimal cycle over " << rows.size() << " penetration rates ("
           << to_string(cfg.objective) << " objective): " << fmt(rows.front().c_opt) << " s at p="
           << fmt(rows.front().p) << " to " << fmt(rows.back().c_opt) << " s at p="
           << fmt(rows.back().p) << '\n';
    if (svg_out) {
      svg::Series cyc{"optimal cycle (s)", {}, {}};
      svg::Series del{"average delay (s/veh)", {}, {}};
      for (const auto& r : rows) {
        cyc.x.push_back(r.p);
        cyc.y.push_back(r.c_opt);
        del.x.push_back(r.p);
        del.y.push_back(r.avg_delay);
      }
      svg::line_chart(*svg_out, "Penetration rate vs optimal cycle and delay", "p", "s",
                      {cyc, del});
    }
    log_warnings(cfg, io.log);
    return exit_ok;
  }

  const double p = cfg.require_p();
  const auto ic = intersection(cfg, p);
  const double c_min = min_cycle_length(ic);
  const auto opt = optimize_cycle(ic, c_min, cfg.cycle_max, cfg.objective);

  io.log << "objective:        " << to_string(opt.objective) << '\n'
         << "C_min:            " << fmt(opt.c_min) << " s\n"
         << "C* (printed):     "
         << (opt.c_star_paper ? fmt(*opt.c_star_paper) + " s" : std::string("unavailable"))
         << '\n'
         << "C_opt (numeric):  " << fmt(opt.c_opt_numeric) << " s\n"
         << "delay at optimum: " << fmt(opt.delay_at_opt)
         << (opt.objective == Objective::total_per_cycle ? " veh*s/cycle" : " s/veh") << '\n'
         << "avg delay:        " << fmt(opt.avg_at_opt) << " s/veh\n"
         << "excluded grid points: " << opt.diagnostics.excluded_points << " of "
         << opt.diagnostics.grid_points << '\n';
  for (const auto& w : opt.diagnostics.warnings) {
    io.log << "warning: " << w << '\n';
  }

  write_preamble(csv, "optimize", cfg);
  csv.header({"p", "c_min", "c_star_paper", "c_opt_numeric", "objective", "delay_at_opt",
              "total_delay", "avg_delay", "exact_derivative", "finite_difference",
              "paper_derivative", "excluded_points", "beyond_closed_form"});
  csv.row({fmt(p), fmt(opt.c_min), fmt(opt.c_star_paper.value_or(std::nan(""))),
           fmt(opt.c_opt_numeric), to_string(opt.objective), fmt(opt.delay_at_opt),
           fmt(opt.total_at_opt), fmt(opt.avg_at_opt), fmt(opt.diagnostics.exact_derivative),
           fmt(opt.diagnostics.finite_difference), fmt(opt.diagnostics.paper_derivative),
           std::to_string(opt.diagnostics.excluded_points),
           flag(opt.diagnostics.beyond_closed_form)});
  for (const auto& w : opt.diagnostics.warnings) {
    csv.comment("warning: " + w);
  }
  log_warnings(cfg, io.log);
  return exit_ok;
}

// ---------------------------------------------------------------------------
// validate

struct OracleGridPoint {
  double q = 0.0;
  double red = 0.0;
  double reaction = 0.0;
  double accel = 0.0;
  double p = 0.0;
  double capacity = 0.0;
};

struct OracleGridResult {
  std::size_t checked = 0;
  std::size_t skipped = 0;
  double max_error_cav = 0.0;
  double max_error_hdv = 0.0;
  std::vector<std::string> failures;
};

/// Green long enough that only over-capacity and early clearance exclude
/// points of the oracle grid.
inline constexpr double oracle_grid_green = 600.0;

inline std::vector<OracleGridPoint> oracle_grid(const RunConfig& cfg) {
  std::vector<OracleGridPoint> pts;
  for (double p : {0.0, 0.5, 0.9}) {
    const double c = mixed_capacity(markov_spec(cfg, p), cfg.vehicle).value;
    for (int qi = 1; qi <= 7; ++qi) {
      for (int r = 20; r <= 60; r += 10) {
        for (double tr : {0.0, 2.0}) {
          for (double ta : {1.0, 3.0}) {
            pts.push_back({0.05 * qi, static_cast<double>(r), tr, ta, p, c});
          }
        }
      }
    }
  }
  return pts;
}

inline OracleGridResult check_oracle_grid(const RunConfig& cfg, double step, double tolerance) {
  OracleGridResult res;
  for (const auto& g : oracle_grid(cfg)) {
    const ApproachDemand q{g.q};
    if (!(g.capacity > g.q)) {
      ++res.skipped;
      continue;
    }
    const auto cav = oracle::numeric_delay(
        q, oracle::DepartureCurveSpec::cav(g.red, oracle_grid_green, g.capacity), step);
    const auto hdv = oracle::numeric_delay(
        q,
        oracle::DepartureCurveSpec::hdv(g.red, oracle_grid_green, {g.reaction, g.accel},
                                        g.capacity),
        step);
    ++res.checked;
    res.max_error_cav = std::max(res.max_error_cav, cav.relative_error);
    if (!hdv.has_closed_form()) {
      ++res.skipped;
      continue;
    }
    res.max_error_hdv = std::max(res.max_error_hdv, hdv.relative_error);
    for (const auto* rep : {&cav, &hdv}) {
      if (!(rep->relative_error <= tolerance)) {
        std::ostringstream msg;
        msg << (rep == &cav ? "CAV" : "HDV") << " q=" << fmt(g.q) << " R=" << fmt(g.red)
            << " T_r=" << fmt(g.reaction) << " T_a=" << fmt(g.accel) << " p=" << fmt(g.p)
            << ": numeric " << fmt(rep->numeric_delay) << " vs closed " << fmt(rep->closed_form_delay);
        res.failures.push_back(msg.str());
      }
    }
  }
  return res;
}

inline int cmd_validate(RunConfig cfg, Streams io) {
  validate(cfg);
  const double p = cfg.p.value_or(0.5);
  std::ostream& os = io.out;
  bool oracle_ok = true;

  os << "mixsig validate\n";
  for (const auto& line : resolved_lines(cfg)) {
    os << "  " << line << '\n';
  }
  os << "  (single-p sections use p = " << fmt(p) << ")\n\n";

  // (1)
  {
    const double tol = 1e-6;
    const auto res = check_oracle_grid(cfg, 1e-3, tol);
    os << "[1] closed-form delay vs numeric queuing-diagram integration (step 1e-3 s)\n"
       << "    grid points checked: " << res.checked << ", excluded (over capacity or early "
       << "clearance): " << res.skipped << '\n'
       << "    max relative error CAV-led: " << fmt(res.max_error_cav) << '\n'
       << "    max relative error HDV-led: " << fmt(res.max_error_hdv) << '\n'
       << "    tolerance: " << fmt(tol) << " -> " << (res.failures.empty() ? "PASS" : "FAIL")
       << "\n";
    for (const auto& f : res.failures) {
      os << "    offending: " << f << '\n';
    }
    oracle_ok = oracle_ok && res.failures.empty();
    os << '\n';
  }

  const auto ic = intersection(cfg, p);

  // (2)
  {
    os << "[2] printed derivative vs exact derivative of total delay\n";
    double printed = std::nan("");
    try {
      printed = total_delay_derivative_paper(ic);
    } catch (const ModelError& e) {
      os << "    printed derivative unavailable: " << e.what() << '\n';
    }
    os << "    cycle  exact        finite_diff  printed\n";
    for (double c : {60.0, 75.0, 90.0, 105.0, 120.0}) {
      try {
        const double exact = total_delay_derivative_exact(ic, c);
        const double fd = oracle::finite_difference(
            [&](double x) { return total_delay(ic, x); }, c, 1e-3 * c);
        const double err = oracle::relative_error(fd, exact);
        if (!(err <= 1e-6)) {
          oracle_ok = false;
          os << "    offending: finite difference disagrees at C=" << fmt(c) << " (rel "
             << fmt(err) << ")\n";
        }
        char line[160];
        std::snprintf(line, sizeof line, "    %-6s %-12s %-12s %s\n", fmt(c).c_str(),
                      fmt(exact).c_str(), fmt(fd).c_str(), fmt(printed).c_str());
        os << line;
      } catch (const ModelError& e) {
        os << "    " << fmt(c) << "  not in closed-form regime: " << e.what() << '\n';
      }
    }
    std::vector<double> xs;
    std::vector<double> ys;
    for (int k = 0; k < 20; ++k) {
      const double c = 60.0 + 3.0 * k;
      try {
        ys.push_back(oracle::finite_difference([&](double x) { return total_delay(ic, x); }, c,
                                               1e-3 * c));
        xs.push_back(c);
      } catch (const ModelError&) {
      }
    }
    if (xs.size() >= 3) {
      const auto fit = oracle::linear_fit(xs, ys);
      const auto k = total_delay_coefficients(ic);
      os << "    finding: finite-difference derivative is linear in C over " << xs.size()
         << " points: slope " << fmt(fit.slope) << " (2A = " << fmt(2.0 * k.quadratic)
         << "), R^2 = " << fmt(fit.r_squared) << '\n'
         << "    finding: printed derivative is constant in C (" << fmt(printed) << ")\n";
    } else {
      os << "    too few closed-form points in [60, 117] s for the regression\n";
    }
    os << '\n';
  }

  // (3)
  {
    os << "[3] printed optimal-cycle formula vs constrained numeric optimum\n";
    try {
      os << "    printed C*: " << fmt(optimal_cycle_paper(ic)) << " s\n";
    } catch (const ModelError& e) {
      os << "    printed C*: error: " << e.what() << '\n';
    }
    try {
      const double c_min = min_cycle_length(ic);
      const auto opt = optimize_cycle(ic, c_min, cfg.cycle_max, cfg.objective);
      os << "    C_min: " << fmt(opt.c_min) << " s\n"
         << "    numeric optimum (" << to_string(cfg.objective)
         << " objective): " << fmt(opt.c_opt_numeric) << " s, objective "
         << fmt(opt.delay_at_opt) << '\n';
      if (opt.c_star_paper && *opt.c_star_paper <= 0.0) {
        os << "    finding: printed C* is non-positive; the constrained optimum is used\n";
      }
    } catch (const ModelError& e) {
      os << "    numeric optimum unavailable: " << e.what() << '\n';
    }
    os << '\n';
  }

  // (4)
  {
    const auto phases = lost_time_phases(ic);
    const double derived = startup_lost_time(phases, LostTimeMode::derived);
    const double printed = startup_lost_time(phases, LostTimeMode::paper);
    os << "[4] start-up lost time over " << phases.size() << " phase(s)\n"
       << "    derived (T_r + T_a/2 per phase):  " << fmt(derived) << " s\n"
       << "    printed (T_r + 3T_a/2 per phase): " << fmt(printed) << " s\n"
       << "    in use: " << to_string(cfg.ls_mode) << "\n\n";
  }

  // (5)
  {
    const auto spec = markov_spec(cfg, p);
    const double closed = mixed_capacity(spec, cfg.vehicle).value;
    const double mc = oracle::monte_carlo_capacity(spec, cfg.vehicle, cfg.mc_samples, cfg.seed);
    const double err = oracle::relative_error(mc, closed);
    const bool ok = err <= 5e-3;
    oracle_ok = oracle_ok && ok;
    os << "[5] Monte Carlo capacity (" << cfg.mc_samples << " vehicles, seed " << cfg.seed
       << ")\n"
       << "    closed form: " << fmt(closed) << " veh/s, sampled: " << fmt(mc)
       << " veh/s, relative error " << fmt(err) << " (tolerance 0.005) -> "
       << (ok ? "PASS" : "FAIL") << "\n\n";
  }

  os << (oracle_ok ? "all oracle-equivalence checks passed\n"
                   : "oracle-equivalence FAILURE\n");
  return oracle_ok ? exit_ok : exit_oracle;
}

} // namespace mixsig::cli
