#pragma once

// Brute-force verifiers for the closed forms. Nothing here calls into the
// closed-form formulas to produce its own numbers; the departure curves are
// rebuilt from their discharge-rate profiles and the clearance time is found
// by bisection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "mixsig/capacity.hpp"
#include "mixsig/delay.hpp"
#include "mixsig/errors.hpp"
#include "mixsig/markov.hpp"

namespace mixsig::oracle {

enum class PlatoonLeader { cav, hdv };

struct DepartureCurveSpec {
  PlatoonLeader kind = PlatoonLeader::cav;
  double red = 0.0;
  double green = 0.0;
  double reaction_time = 0.0;  // HDV only
  double accel_time = 0.0;     // HDV only
  double capacity = 0.0;

  static DepartureCurveSpec cav(double red, double green, double capacity) {
    return {PlatoonLeader::cav, red, green, 0.0, 0.0, capacity};
  }
  static DepartureCurveSpec hdv(double red, double green, const HdvStartupParams& s,
                                double capacity) {
    return {PlatoonLeader::hdv, red, green, s.reaction_time, s.accel_time, capacity};
  }

  /// Moment the discharge rate starts rising above zero.
  double discharge_start() const {
    return kind == PlatoonLeader::cav ? red : red + reaction_time;
  }
  double ramp_length() const { return kind == PlatoonLeader::cav ? 0.0 : accel_time; }

  /// Instantaneous discharge rate while a queue exists.
  double rate(double t) const {
    const double s = t - discharge_start();
    if (s <= 0.0) {
      return 0.0;
    }
    const double ramp = ramp_length();
    return s < ramp ? capacity * s / ramp : capacity;
  }

  /// Vehicles discharged by time t: area under the rate profile.
  double departed(double t) const {
    const double s = t - discharge_start();
    if (s <= 0.0) {
      return 0.0;
    }
    const double ramp = ramp_length();
    if (s < ramp) {
      return 0.5 * s * (capacity * s / ramp);  // triangle
    }
    return 0.5 * ramp * capacity + capacity * (s - ramp);  // triangle + rectangle
  }
};

struct IntegrationReport {
  double numeric_delay = 0.0;
  double step = 0.0;
  double closed_form_delay = std::numeric_limits<double>::quiet_NaN();
  double relative_error = std::numeric_limits<double>::quiet_NaN();
  double t_end = 0.0;

  bool has_closed_form() const { return !std::isnan(closed_form_delay); }
};

inline constexpr double relative_error_floor = 1e-12;

inline double relative_error(double numeric, double closed) {
  return std::abs(numeric - closed) / std::max(std::abs(closed), relative_error_floor);
}

namespace detail {

template <class F>
double bisect_sign_change(F&& g, double lo, double hi) {
  // g(lo) > 0 >= g(hi)
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

} // namespace detail

/// First time after the start of red at which cumulative departures reach
/// cumulative arrivals.
inline double clearance_time(double arrival_rate, const DepartureCurveSpec& curve) {
  if (arrival_rate == 0.0) {
    return 0.0;
  }
  if (!(curve.capacity > arrival_rate)) {
    std::ostringstream msg;
    msg << "arrival rate " << arrival_rate << " is not below capacity " << curve.capacity;
    throw OverCapacityError(msg.str());
  }
  const auto queue = [&](double t) { return arrival_rate * t - curve.departed(t); };

  double lo = curve.discharge_start();
  const double ramp = curve.ramp_length();
  if (ramp == 0.0) {
    if (queue(lo) <= 0.0) {
      return lo;  // full-rate discharge with nothing queued
    }
  } else {
    // rate starts at zero, so a queue exists just after discharge begins
    const double ramp_end = lo + ramp;
    if (queue(ramp_end) <= 0.0) {
      return detail::bisect_sign_change(queue, lo, ramp_end);
    }
    lo = ramp_end;
  }
  double hi = std::max(2.0 * lo, 1.0);
  while (queue(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  return detail::bisect_sign_change(queue, lo, hi);
}

/// Trapezoidal integral of f over [a, b] with ceil((b - a) / step) equal panels.
template <class F>
double trapezoid(F&& f, double a, double b, double step) {
  if (!(b > a)) {
    return 0.0;
  }
  const auto panels = static_cast<std::size_t>(std::ceil((b - a) / step));
  const double h = (b - a) / static_cast<double>(panels);
  double sum = 0.5 * (f(a) + f(b));
  for (std::size_t k = 1; k < panels; ++k) {
    sum += f(a + h * static_cast<double>(k));
  }
  return sum * h;
}

namespace detail {

inline std::optional<double> closed_form_for(double arrival_rate, const DepartureCurveSpec& curve) {
  const ApproachDemand q{arrival_rate};
  const auto timing = SignalTiming::from_red_green(curve.red, curve.green);
  try {
    if (curve.kind == PlatoonLeader::cav) {
      return delay_cav(q, timing, curve.capacity).total_delay;
    }
    return delay_hdv(q, timing, HdvStartupParams{curve.reaction_time, curve.accel_time},
                     curve.capacity)
        .total_delay;
  } catch (const EarlyClearanceError&) {
    return std::nullopt;
  }
}

} // namespace detail

/// Area between cumulative arrivals and departures over [0, T_end], with
/// panel boundaries aligned to every kink of the departure curve.
inline IntegrationReport numeric_delay(const ApproachDemand& q, const DepartureCurveSpec& curve,
                                       double step) {
  if (!(step > 0.0)) {
    throw DomainError("integration step must be positive");
  }
  const double rate = q.arrival_rate;
  IntegrationReport report;
  report.step = step;
  report.t_end = clearance_time(rate, curve);
  if (report.t_end > curve.red + curve.green) {
    std::ostringstream msg;
    msg << "queue clears at " << report.t_end << " s, after the cycle ends at "
        << curve.red + curve.green << " s";
    throw SaturationError(msg.str());
  }

  std::vector<double> breaks{0.0, curve.red, curve.discharge_start(),
                             curve.discharge_start() + curve.ramp_length(), report.t_end};
  for (double& b : breaks) {
    b = std::min(b, report.t_end);
  }
  const auto queue = [&](double t) { return rate * t - curve.departed(t); };
  double area = 0.0;
  for (std::size_t k = 1; k < breaks.size(); ++k) {
    area += trapezoid(queue, breaks[k - 1], breaks[k], step);
  }
  report.numeric_delay = area;

  if (auto closed = detail::closed_form_for(rate, curve)) {
    report.closed_form_delay = *closed;
    report.relative_error = relative_error(report.numeric_delay, *closed);
  }
  return report;
}

/// Sampled capacity: each vehicle contributes the gap of its chain state
/// plus the length-over-speed term.
inline double monte_carlo_capacity(const MarkovSpec& spec, const VehicleParams& params,
                                   std::size_t count, std::uint64_t seed) {
  const auto seq = sample_sequence(spec, count, seed);
  std::vector<double> gap_by_state(spec.state_count());
  for (std::size_t i = 0; i < gap_by_state.size(); ++i) {
    gap_by_state[i] = gap_for_state(static_cast<int>(i), params);
  }
  double total_gap = 0.0;
  for (int s : seq.states) {
    total_gap += gap_by_state[static_cast<std::size_t>(s)];
  }
  const double n = static_cast<double>(count);
  return n / (total_gap + n * params.length_time());
}

template <class F>
double finite_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. A constant y gives
/// r_squared = 1 when it is fitted exactly.
inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - sse / syy : (sse == 0.0 ? 1.0 : 0.0);
  return fit;
}

struct GridMinimum {
  double argmin = std::numeric_limits<double>::quiet_NaN();
  double value = std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;
};

/// Exhaustive scan of lo, lo + step, ... <= hi. Points where f throws a
/// ModelError or returns a non-finite value are skipped.
template <class F>
GridMinimum grid_argmin(F&& f, double lo, double hi, double step) {
  GridMinimum best;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const double x = lo + step * static_cast<double>(k);
    double v = 0.0;
    try {
      v = f(x);
    } catch (const ModelError&) {
      continue;
    }
    if (!std::isfinite(v)) {
      continue;
    }
    ++best.evaluated;
    if (v < best.value) {
      best.value = v;
      best.argmin = x;
    }
  }
  return best;
}

} // namespace mixsig::oracle
