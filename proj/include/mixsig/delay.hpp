#pragma once

// Deterministic queuing delay for one approach over one cycle under a
// constant arrival rate. The cycle starts at the onset of effective red.
//
//  CAV-led platoon: departures start at rate c the moment red ends.
//  HDV-led platoon: nothing moves for T_r after red ends, then the discharge
//  rate ramps linearly from 0 to c over T_a (quadratic cumulative curve),
//  then stays at c.
//
// All rates are veh/s, all times s, delays veh*s per cycle.

#include <cmath>
#include <sstream>

#include "mixsig/errors.hpp"

namespace mixsig {

struct SignalTiming {
  double cycle = 0.0;
  double green = 0.0;
  double red = 0.0;
  double green_ratio = 0.0;

  static SignalTiming from_red_green(double red, double green) {
    if (!(green > 0.0) || !(red >= 0.0)) {
      throw DomainError("signal timing needs green > 0 and red >= 0");
    }
    const double cycle = red + green;
    return SignalTiming{cycle, green, red, green / cycle};
  }

  /// Effective red is (1 - ratio) * cycle. A ratio of exactly 1 is the
  /// no-red limit.
  static SignalTiming from_cycle(double cycle, double green_ratio) {
    if (!(cycle > 0.0)) {
      throw DomainError("cycle length must be positive");
    }
    if (!(green_ratio > 0.0 && green_ratio <= 1.0)) {
      throw DomainError("green ratio must lie in (0, 1]");
    }
    return SignalTiming{cycle, green_ratio * cycle, (1.0 - green_ratio) * cycle, green_ratio};
  }
};

struct ApproachDemand {
  double arrival_rate = 0.0;  // veh/s
};

struct HdvStartupParams {
  double reaction_time = 2.0;  // T_r
  double accel_time = 3.0;     // T_a; zero is the instantaneous-start limit

  void validate() const {
    if (!(reaction_time >= 0.0) || !(accel_time >= 0.0)) {
      throw DomainError("HDV reaction and acceleration times must be non-negative");
    }
  }
};

struct DelayResult {
  double total_delay = 0.0;       // veh*s per cycle
  double avg_delay = 0.0;         // s/veh
  double queue_clear_time = 0.0;  // t_d (CAV) or t_d' (HDV)
  double n_total = 0.0;           // arrivals per cycle
  double n1 = 0.0;                // HDV only: discharged during acceleration
  double n2 = 0.0;                // HDV only: cumulative count at clearance
  bool saturated = false;
  bool beyond_closed_form = false;  // computed numerically outside the closed-form regime
};

/// Areas under the cumulative curves whose difference is the total delay.
struct DelayBreakdown {
  double arrival_area = 0.0;
  double departure_area_accel = 0.0;
  double departure_area_free = 0.0;
  double cav_departure_area = 0.0;

  double delay() const {
    return arrival_area - departure_area_accel - departure_area_free - cav_departure_area;
  }
};

struct ExpectedDelay {
  double total = 0.0;
  double avg = 0.0;
};

namespace detail {

inline void require_under_capacity(double q, double c) {
  if (!(c > q)) {
    std::ostringstream msg;
    msg << "arrival rate " << q << " veh/s is not below capacity " << c << " veh/s";
    throw OverCapacityError(msg.str());
  }
}

inline double per_vehicle(double total, double q, const SignalTiming& timing) {
  const double n_total = q * (timing.red + timing.green);
  return n_total > 0.0 ? total / n_total : 0.0;
}

} // namespace detail

inline double queue_clear_time_cav(const ApproachDemand& q, double red, double capacity) {
  detail::require_under_capacity(q.arrival_rate, capacity);
  return q.arrival_rate * red / (capacity - q.arrival_rate);
}

/// Time after the acceleration phase ends until departures catch arrivals.
inline double queue_clear_time_hdv(const ApproachDemand& q, double red,
                                   const HdvStartupParams& startup, double capacity) {
  detail::require_under_capacity(q.arrival_rate, capacity);
  const double arrived = q.arrival_rate * (red + startup.reaction_time + startup.accel_time);
  const double discharged_in_accel = capacity * startup.accel_time / 2.0;
  if (arrived < discharged_in_accel) {
    std::ostringstream msg;
    msg << "queue clears during the acceleration phase (" << arrived << " arrivals < "
        << discharged_in_accel << " discharged); closed form does not apply";
    throw EarlyClearanceError(msg.str());
  }
  return (arrived - discharged_in_accel) / (capacity - q.arrival_rate);
}

inline double cumulative_departures_cav(double t, double red, double capacity) {
  return t <= red ? 0.0 : capacity * (t - red);
}

inline double cumulative_departures_hdv(double t, double red, const HdvStartupParams& startup,
                                        double capacity) {
  const double start = red + startup.reaction_time;
  const double ta = startup.accel_time;
  if (t <= start) {
    return 0.0;
  }
  if (t <= start + ta) {
    const double s = t - start;
    return capacity / (2.0 * ta) * s * s;
  }
  return capacity * t - capacity * (ta / 2.0 + start);
}

inline DelayBreakdown delay_breakdown_cav(const ApproachDemand& q, const SignalTiming& timing,
                                          double capacity) {
  const double td = queue_clear_time_cav(q, timing.red, capacity);
  DelayBreakdown b;
  const double span = timing.red + td;
  b.arrival_area = 0.5 * q.arrival_rate * span * span;
  b.cav_departure_area = 0.5 * capacity * td * td;
  return b;
}

inline DelayBreakdown delay_breakdown_hdv(const ApproachDemand& q, const SignalTiming& timing,
                                          const HdvStartupParams& startup, double capacity) {
  const double tdp = queue_clear_time_hdv(q, timing.red, startup, capacity);
  const double ta = startup.accel_time;
  const double t_end = timing.red + startup.reaction_time + ta + tdp;
  DelayBreakdown b;
  b.arrival_area = 0.5 * q.arrival_rate * t_end * t_end;
  b.departure_area_accel = capacity * ta * ta / 6.0;
  b.departure_area_free = 0.5 * capacity * tdp * (ta + tdp);
  return b;
}

inline DelayResult delay_cav(const ApproachDemand& q, const SignalTiming& timing, double capacity) {
  const double rate = q.arrival_rate;
  const double td = queue_clear_time_cav(q, timing.red, capacity);
  if (td > timing.green) {
    std::ostringstream msg;
    msg << "CAV-led queue clears after " << td << " s, beyond the " << timing.green
        << " s green";
    throw SaturationError(msg.str());
  }
  DelayResult r;
  r.queue_clear_time = td;
  r.total_delay = capacity * rate * timing.red * timing.red / (2.0 * (capacity - rate));
  r.n_total = rate * (timing.red + timing.green);
  r.avg_delay = detail::per_vehicle(r.total_delay, rate, timing);
  return r;
}

inline DelayResult delay_hdv(const ApproachDemand& q, const SignalTiming& timing,
                             const HdvStartupParams& startup, double capacity) {
  startup.validate();
  const double rate = q.arrival_rate;
  if (rate == 0.0) {
    // no arrivals, no queue
    detail::require_under_capacity(rate, capacity);
    return DelayResult{};
  }
  const double tdp = queue_clear_time_hdv(q, timing.red, startup, capacity);
  const double tr = startup.reaction_time;
  const double ta = startup.accel_time;
  if (tr + ta + tdp > timing.green) {
    std::ostringstream msg;
    msg << "HDV-led queue clears " << tr + ta + tdp << " s into green, beyond the "
        << timing.green << " s green";
    throw SaturationError(msg.str());
  }
  const double t_end = timing.red + tr + ta + tdp;
  DelayResult r;
  r.queue_clear_time = tdp;
  r.total_delay = 0.5 * rate * t_end * t_end - 0.5 * capacity * tdp * (ta + tdp) -
                  capacity * ta * ta / 6.0;
  r.n_total = rate * (timing.red + timing.green);
  r.avg_delay = detail::per_vehicle(r.total_delay, rate, timing);
  r.n1 = capacity * ta / 2.0;
  r.n2 = rate * t_end;
  return r;
}

/// Total-probability mix of the two platoon-leader outcomes.
inline ExpectedDelay expected_delay(double p, const DelayResult& cav, const DelayResult& hdv) {
  return ExpectedDelay{(1.0 - p) * hdv.total_delay + p * cav.total_delay,
                       (1.0 - p) * hdv.avg_delay + p * cav.avg_delay};
}

} // namespace mixsig
