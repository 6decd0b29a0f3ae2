#pragma once

// Intersection-level aggregation and cycle-length selection.
//
// Each approach i receives red (1 - lambda_i) C and green lambda_i C. Its
// expected delay mixes the CAV-led and HDV-led outcomes by the penetration
// rate. With K_i = c_i q_i / (c_i - q_i) the closed forms give
//
//   E[D_i](C) = K_i/2 * [ p R_i^2 + (1-p) (R_i + T_r + T_a/2)^2 ] + const_i
//
// so dD_total/dC = 2 A C + B with
//   A = sum K_i (1 - lambda_i)^2 / 2
//   B = sum K_i (1 - lambda_i) (1 - p) (T_r,i + T_a,i / 2),
// both non-negative: total delay never decreases with the cycle length.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mixsig/capacity.hpp"
#include "mixsig/delay.hpp"
#include "mixsig/errors.hpp"
#include "mixsig/golden_section.hpp"
#include "mixsig/markov.hpp"
#include "mixsig/oracle.hpp"

namespace mixsig {

struct Approach {
  ApproachDemand demand;
  double green_ratio = 0.5;
  HdvStartupParams startup;
  std::optional<double> capacity_override;
};

enum class LostTimeMode { derived, paper };
enum class Objective { total_per_cycle, average_per_vehicle };

inline const char* to_string(LostTimeMode m) {
  return m == LostTimeMode::derived ? "derived" : "paper";
}
inline const char* to_string(Objective o) {
  return o == Objective::total_per_cycle ? "total" : "average";
}

struct IntersectionConfig {
  std::vector<Approach> approaches;
  MarkovSpec markov{5, 0.0};
  VehicleParams vehicle;
  double saturation_degree = 0.95;  // X_c
  double clearance_lost = 4.0;      // L_c, s
  /// Critical-group flow ratios; empty means q_i / c_i for every approach.
  std::vector<double> critical_flow_ratios;
  /// Phase count for start-up lost time; empty means one phase per approach,
  /// otherwise that many phases with the first approach's start-up times.
  std::optional<int> phases;
  LostTimeMode ls_mode = LostTimeMode::derived;

  double penetration() const { return markov.p(); }

  void validate() const {
    if (approaches.empty()) {
      throw DomainError("intersection needs at least one approach");
    }
    for (const auto& a : approaches) {
      if (!(a.green_ratio > 0.0 && a.green_ratio <= 1.0)) {
        throw DomainError("green ratio must lie in (0, 1]");
      }
      if (!(a.demand.arrival_rate >= 0.0)) {
        throw DomainError("arrival rate must be non-negative");
      }
      if (a.capacity_override && !(*a.capacity_override > 0.0)) {
        throw DomainError("capacity override must be positive");
      }
      a.startup.validate();
    }
    if (!(saturation_degree > 0.0 && saturation_degree <= 1.0)) {
      throw DomainError("degree of saturation X_c must lie in (0, 1]");
    }
    if (!(clearance_lost >= 0.0)) {
      throw DomainError("clearance lost time must be non-negative");
    }
    if (phases && *phases < 1) {
      throw DomainError("phase count must be >= 1");
    }
    vehicle.validate();
  }
};

inline double red_time(double green_ratio, double cycle) {
  if (!(green_ratio > 0.0 && green_ratio <= 1.0) || !(cycle > 0.0)) {
    throw DomainError("red_time needs 0 < green ratio <= 1 and cycle > 0");
  }
  return (1.0 - green_ratio) * cycle;
}

/// Capacity shared by every approach without an override.
inline double shared_capacity(const IntersectionConfig& config) {
  return mixed_capacity(config.markov, config.vehicle).value;
}

inline std::vector<double> approach_capacities(const IntersectionConfig& config) {
  const double shared = shared_capacity(config);
  std::vector<double> caps;
  caps.reserve(config.approaches.size());
  for (const auto& a : config.approaches) {
    caps.push_back(a.capacity_override.value_or(shared));
  }
  return caps;
}

// ---------------------------------------------------------------------------
// Delay aggregation

/// closed_form refuses early-clearance HDV queues; numeric_fallback evaluates
/// them by integrating the queuing diagram and marks the result.
enum class EvaluationPolicy { closed_form, numeric_fallback };

inline constexpr double fallback_integration_step = 1e-3;

struct ApproachDelay {
  DelayResult cav;
  DelayResult hdv;
  ExpectedDelay expected;
  bool beyond_closed_form = false;
};

inline ApproachDelay approach_expected_delay(const Approach& approach, double p, double capacity,
                                             double cycle, EvaluationPolicy policy) {
  const auto timing = SignalTiming::from_cycle(cycle, approach.green_ratio);
  const ApproachDemand& q = approach.demand;
  ApproachDelay out;
  if (q.arrival_rate == 0.0) {
    detail::require_under_capacity(0.0, capacity);
    return out;
  }
  if (p > 0.0) {
    out.cav = delay_cav(q, timing, capacity);
  }
  if (p < 1.0) {
    try {
      out.hdv = delay_hdv(q, timing, approach.startup, capacity);
    } catch (const EarlyClearanceError&) {
      if (policy == EvaluationPolicy::closed_form) {
        throw;
      }
      const auto curve =
          oracle::DepartureCurveSpec::hdv(timing.red, timing.green, approach.startup, capacity);
      const auto report = oracle::numeric_delay(q, curve, fallback_integration_step);
      const double accel_end =
          timing.red + approach.startup.reaction_time + approach.startup.accel_time;
      out.hdv.total_delay = report.numeric_delay;
      out.hdv.n_total = q.arrival_rate * timing.cycle;
      out.hdv.avg_delay = report.numeric_delay / out.hdv.n_total;
      out.hdv.queue_clear_time = report.t_end - accel_end;  // negative: cleared mid-ramp
      out.hdv.n1 = capacity * approach.startup.accel_time / 2.0;
      out.hdv.n2 = q.arrival_rate * report.t_end;
      out.hdv.beyond_closed_form = true;
      out.beyond_closed_form = true;
    }
  }
  out.expected = expected_delay(p, out.cav, out.hdv);
  return out;
}

struct IntersectionDelay {
  double total = 0.0;            // veh*s per cycle
  double avg_per_vehicle = 0.0;  // total / (C * sum q_i)
  bool beyond_closed_form = false;
  std::vector<ApproachDelay> approaches;
};

inline IntersectionDelay evaluate_intersection(const IntersectionConfig& config, double cycle,
                                               EvaluationPolicy policy) {
  config.validate();
  const auto caps = approach_capacities(config);
  const double p = config.penetration();
  IntersectionDelay out;
  std::vector<std::size_t> failed;
  std::ostringstream reasons;
  double demand = 0.0;
  for (std::size_t i = 0; i < config.approaches.size(); ++i) {
    try {
      auto a = approach_expected_delay(config.approaches[i], p, caps[i], cycle, policy);
      out.total += a.expected.total;
      out.beyond_closed_form = out.beyond_closed_form || a.beyond_closed_form;
      out.approaches.push_back(std::move(a));
    } catch (const ModelError& e) {
      failed.push_back(i);
      reasons << (failed.size() > 1 ? "; " : "") << "approach " << i << ": " << e.what();
    }
    demand += config.approaches[i].demand.arrival_rate;
  }
  if (!failed.empty()) {
    std::ostringstream msg;
    msg << "cycle " << cycle << " s not under-saturated on " << failed.size()
        << " approach(es) [" << reasons.str() << "]";
    throw ApproachRegimeError(msg.str(), std::move(failed));
  }
  out.avg_per_vehicle = demand > 0.0 ? out.total / (cycle * demand) : 0.0;
  return out;
}

/// Sum of expected per-approach delays, closed forms only.
inline double total_delay(const IntersectionConfig& config, double cycle) {
  return evaluate_intersection(config, cycle, EvaluationPolicy::closed_form).total;
}

inline double average_delay(const IntersectionConfig& config, double cycle) {
  return evaluate_intersection(config, cycle, EvaluationPolicy::closed_form).avg_per_vehicle;
}

// ---------------------------------------------------------------------------
// Derivatives

struct DerivativeCoefficients {
  double quadratic = 0.0;  // A
  double linear = 0.0;     // B
};

inline DerivativeCoefficients total_delay_coefficients(const IntersectionConfig& config) {
  const auto caps = approach_capacities(config);
  const double p = config.penetration();
  DerivativeCoefficients k;
  for (std::size_t i = 0; i < config.approaches.size(); ++i) {
    const auto& a = config.approaches[i];
    const double q = a.demand.arrival_rate;
    detail::require_under_capacity(q, caps[i]);
    const double gain = caps[i] * q / (caps[i] - q);
    const double red_share = 1.0 - a.green_ratio;
    k.quadratic += gain * red_share * red_share / 2.0;
    k.linear += gain * red_share * (1.0 - p) *
                (a.startup.reaction_time + a.startup.accel_time / 2.0);
  }
  return k;
}

/// dD_total/dC of the closed-form total delay; requires every approach to be
/// in the closed-form regime at `cycle`.
inline double total_delay_derivative_exact(const IntersectionConfig& config, double cycle) {
  (void)evaluate_intersection(config, cycle, EvaluationPolicy::closed_form);
  const auto k = total_delay_coefficients(config);
  return 2.0 * k.quadratic * cycle + k.linear;
}

/// The printed derivative expression, evaluated term by term with c the
/// approach capacity. It carries no dependence on the cycle length.
inline double total_delay_derivative_paper(const IntersectionConfig& config) {
  const auto caps = approach_capacities(config);
  const double p = config.penetration();
  double sum = 0.0;
  for (std::size_t i = 0; i < config.approaches.size(); ++i) {
    const auto& a = config.approaches[i];
    const double q = a.demand.arrival_rate;
    const double c = caps[i];
    detail::require_under_capacity(q, c);
    const double lam = a.green_ratio;
    sum += c * q / (c - q) *
           (c * (lam - 1.0) * (lam - 1.0) + a.startup.accel_time * (1.0 - lam) * (1.0 - p) +
            2.0 * a.startup.reaction_time * (1.0 - lam) * (1.0 - p));
  }
  return sum;
}

/// The printed stationary-point formula for the cycle length. For green
/// ratios below one and p < 1 the numerator is negative, so the value is
/// non-positive.
inline double optimal_cycle_paper(const IntersectionConfig& config) {
  const auto caps = approach_capacities(config);
  const double p = config.penetration();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < config.approaches.size(); ++i) {
    const auto& a = config.approaches[i];
    const double q = a.demand.arrival_rate;
    const double c = caps[i];
    detail::require_under_capacity(q, c);
    const double lam = a.green_ratio;
    const double gain = c * q / (c - q);
    const double factor = lam - lam * p + p - 1.0;
    num += gain * (a.startup.accel_time * factor + 2.0 * a.startup.reaction_time * factor);
    den += gain * (lam - 1.0) * (lam - 1.0);
  }
  if (den == 0.0) {
    throw DegenerateError(
        "optimal-cycle denominator vanishes (every loaded approach has green ratio 1)");
  }
  return num / den;
}

// ---------------------------------------------------------------------------
// Lost time and minimum cycle

inline double startup_lost_time(std::span<const HdvStartupParams> phases, LostTimeMode mode) {
  if (phases.empty()) {
    throw DomainError("start-up lost time needs at least one phase");
  }
  const double accel_weight = mode == LostTimeMode::derived ? 0.5 : 1.5;
  double total = 0.0;
  for (const auto& s : phases) {
    total += s.reaction_time + accel_weight * s.accel_time;
  }
  return total;
}

inline double expected_lost_time(double p, double startup_total, double clearance) {
  if (!(p >= 0.0 && p <= 1.0) || !(startup_total >= 0.0) || !(clearance >= 0.0)) {
    throw DomainError("lost-time inputs must be non-negative and p in [0, 1]");
  }
  return (1.0 - p) * startup_total + clearance;
}

inline std::vector<HdvStartupParams> lost_time_phases(const IntersectionConfig& config) {
  if (config.phases) {
    return std::vector<HdvStartupParams>(static_cast<std::size_t>(*config.phases),
                                         config.approaches.front().startup);
  }
  std::vector<HdvStartupParams> out;
  for (const auto& a : config.approaches) {
    out.push_back(a.startup);
  }
  return out;
}

inline double intersection_startup_lost_time(const IntersectionConfig& config) {
  return startup_lost_time(lost_time_phases(config), config.ls_mode);
}

inline double intersection_expected_lost_time(const IntersectionConfig& config) {
  return expected_lost_time(config.penetration(), intersection_startup_lost_time(config),
                            config.clearance_lost);
}

inline double critical_flow_ratio_sum(const IntersectionConfig& config) {
  double sum = 0.0;
  if (!config.critical_flow_ratios.empty()) {
    for (double r : config.critical_flow_ratios) {
      sum += r;
    }
    return sum;
  }
  const auto caps = approach_capacities(config);
  for (std::size_t i = 0; i < config.approaches.size(); ++i) {
    sum += config.approaches[i].demand.arrival_rate / caps[i];
  }
  return sum;
}

inline double min_cycle_length(double expected_lost, double saturation_degree,
                               double flow_ratio_sum) {
  if (!(flow_ratio_sum < saturation_degree)) {
    std::ostringstream msg;
    msg << "critical flow ratios sum to " << flow_ratio_sum
        << ", not below the degree of saturation " << saturation_degree
        << "; no cycle length suffices";
    throw InfeasibleError(msg.str());
  }
  return expected_lost * saturation_degree / (saturation_degree - flow_ratio_sum);
}

inline double min_cycle_length(const IntersectionConfig& config) {
  config.validate();
  return min_cycle_length(intersection_expected_lost_time(config), config.saturation_degree,
                          critical_flow_ratio_sum(config));
}

// ---------------------------------------------------------------------------
// Constrained cycle optimization

struct OptimumDiagnostics {
  double exact_derivative = std::numeric_limits<double>::quiet_NaN();
  double finite_difference = std::numeric_limits<double>::quiet_NaN();
  double paper_derivative = std::numeric_limits<double>::quiet_NaN();
  std::size_t grid_points = 0;
  std::size_t excluded_points = 0;
  double feasible_lo = std::numeric_limits<double>::quiet_NaN();
  bool beyond_closed_form = false;
  std::vector<std::string> warnings;
};

struct CycleOptimum {
  double c_min = 0.0;
  std::optional<double> c_star_paper;
  double c_opt_numeric = 0.0;
  Objective objective = Objective::total_per_cycle;
  double delay_at_opt = 0.0;      // objective value
  double total_at_opt = 0.0;      // veh*s per cycle
  double avg_at_opt = 0.0;        // s/veh
  OptimumDiagnostics diagnostics;
};

inline constexpr std::size_t optimizer_grid_points = 200;

namespace detail {

inline double objective_value(const IntersectionDelay& d, Objective objective) {
  return objective == Objective::total_per_cycle ? d.total : d.avg_per_vehicle;
}

/// Boundary between an infeasible point `bad` and a feasible point `good`;
/// returns a feasible point within 1e-12 s of the boundary.
template <class Feasible>
double feasibility_boundary(Feasible&& feasible, double bad, double good) {
  for (int it = 0; it < 200 && std::abs(good - bad) > 1e-12; ++it) {
    const double mid = 0.5 * (bad + good);
    if (feasible(mid)) {
      good = mid;
    } else {
      bad = mid;
    }
  }
  return good;
}

} // namespace detail

/// Minimizes the objective over [lo, hi]. Points that are not under-saturated
/// are excluded; the search starts from a 200-point grid and refines the best
/// bracket by golden-section search.
inline CycleOptimum optimize_cycle(const IntersectionConfig& config, double lo, double hi,
                                   Objective objective) {
  config.validate();
  CycleOptimum out;
  out.objective = objective;
  out.c_min = min_cycle_length(config);
  if (lo < out.c_min * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "lower cycle bound " << lo << " s is below the minimum cycle " << out.c_min << " s";
    throw DomainError(msg.str());
  }
  if (!(hi > lo)) {
    std::ostringstream msg;
    msg << "cycle search interval [" << lo << ", " << hi << "] is empty";
    throw InfeasibleError(msg.str());
  }

  const auto eval = [&](double cycle) -> std::optional<IntersectionDelay> {
    try {
      return evaluate_intersection(config, cycle, EvaluationPolicy::numeric_fallback);
    } catch (const ModelError&) {
      return std::nullopt;
    }
  };
  const auto f = [&](double cycle) {
    const auto d = eval(cycle);
    return d ? detail::objective_value(*d, objective) : std::numeric_limits<double>::infinity();
  };
  const auto feasible = [&](double cycle) { return eval(cycle).has_value(); };

  std::vector<double> xs(optimizer_grid_points);
  std::vector<double> fs(optimizer_grid_points);
  std::size_t best = optimizer_grid_points;
  for (std::size_t k = 0; k < optimizer_grid_points; ++k) {
    xs[k] = k + 1 == optimizer_grid_points
                ? hi
                : lo + (hi - lo) * static_cast<double>(k) / (optimizer_grid_points - 1);
    fs[k] = f(xs[k]);
    if (std::isfinite(fs[k])) {
      if (best == optimizer_grid_points || fs[k] < fs[best]) {
        best = k;
      }
    } else {
      ++out.diagnostics.excluded_points;
    }
  }
  out.diagnostics.grid_points = optimizer_grid_points;
  if (best == optimizer_grid_points) {
    std::ostringstream msg;
    msg << "no under-saturated cycle length in [" << lo << ", " << hi << "] s";
    throw InfeasibleError(msg.str());
  }

  for (std::size_t k = 0; k < optimizer_grid_points; ++k) {
    if (std::isfinite(fs[k])) {
      out.diagnostics.feasible_lo =
          k == 0 ? xs[0] : detail::feasibility_boundary(feasible, xs[k - 1], xs[k]);
      break;
    }
  }

  double left = xs[best];
  double right = xs[best];
  if (best > 0) {
    left = std::isfinite(fs[best - 1])
               ? xs[best - 1]
               : detail::feasibility_boundary(feasible, xs[best - 1], xs[best]);
  }
  if (best + 1 < optimizer_grid_points) {
    right = std::isfinite(fs[best + 1])
                ? xs[best + 1]
                : detail::feasibility_boundary(feasible, xs[best + 1], xs[best]);
  }

  double x_opt = xs[best];
  double f_opt = fs[best];
  if (right > left) {
    const auto refined = golden_section_minimize(f, left, right, 1e-9);
    for (const auto& [x, v] : {std::pair{refined.x, refined.value}, std::pair{left, f(left)},
                               std::pair{right, f(right)}}) {
      if (v < f_opt) {
        x_opt = x;
        f_opt = v;
      }
    }
  }

  const auto at_opt = evaluate_intersection(config, x_opt, EvaluationPolicy::numeric_fallback);
  out.c_opt_numeric = x_opt;
  out.delay_at_opt = f_opt;
  out.total_at_opt = at_opt.total;
  out.avg_at_opt = at_opt.avg_per_vehicle;
  out.diagnostics.beyond_closed_form = at_opt.beyond_closed_form;
  if (at_opt.beyond_closed_form) {
    out.diagnostics.warnings.emplace_back(
        "optimum lies where an HDV queue clears during acceleration; delay integrated "
        "numerically");
  }

  try {
    out.c_star_paper = optimal_cycle_paper(config);
    if (*out.c_star_paper <= 0.0) {
      out.diagnostics.warnings.emplace_back(
          "printed optimal-cycle formula gives a non-positive cycle; not used");
    }
  } catch (const ModelError& e) {
    out.diagnostics.warnings.emplace_back(std::string("printed optimal-cycle formula: ") +
                                          e.what());
  }
  try {
    out.diagnostics.paper_derivative = total_delay_derivative_paper(config);
  } catch (const ModelError&) {
  }
  try {
    out.diagnostics.exact_derivative = total_delay_derivative_exact(config, x_opt);
    const double h = 1e-3 * x_opt;
    out.diagnostics.finite_difference = oracle::finite_difference(
        [&](double c) { return total_delay(config, c); }, x_opt, h);
  } catch (const ModelError&) {
  }
  return out;
}

struct CurveRow {
  double p = 0.0;
  double c_min = 0.0;
  double c_opt = 0.0;
  double avg_delay = 0.0;    // s/veh at c_opt
  double total_delay = 0.0;  // veh*s per cycle at c_opt
  std::optional<double> c_star_paper;
  bool beyond_closed_form = false;
};

/// One optimization per penetration rate, searching [C_min(p), cycle_max].
inline std::vector<CurveRow> optimal_cycle_curve(const IntersectionConfig& base,
                                                 std::span<const double> penetration_grid,
                                                 double cycle_max, Objective objective) {
  std::vector<CurveRow> rows;
  rows.reserve(penetration_grid.size());
  for (double p : penetration_grid) {
    IntersectionConfig config = base;
    config.markov = MarkovSpec(base.markov.n(), p);
    const double lo = min_cycle_length(config);
    const auto opt = optimize_cycle(config, lo, cycle_max, objective);
    rows.push_back(CurveRow{p, opt.c_min, opt.c_opt_numeric, opt.avg_at_opt, opt.total_at_opt,
                            opt.c_star_paper, opt.diagnostics.beyond_closed_form});
  }
  return rows;
}

} // namespace mixsig
