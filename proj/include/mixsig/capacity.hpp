#pragma once

#include <algorithm>
#include <cstddef>

#include "mixsig/errors.hpp"
#include "mixsig/markov.hpp"

namespace mixsig {

/// Car-following and geometry constants. Defaults are the reference
/// parameter set used throughout the sensitivity experiments.
struct VehicleParams {
  double omega_e = 1.2;         // equilibrium-spacing feedback gain, 1/s^2
  double omega_v = 0.5;         // speed-difference feedback gain, 1/s
  double tau_safe = 0.3;        // s
  double tau_hdv = 1.5;         // s
  double vehicle_length = 5.0;  // m
  double v_free = 15.0;         // m/s

  void validate() const {
    if (!(omega_e > 0 && omega_v > 0 && tau_safe > 0 && tau_hdv > 0 && vehicle_length > 0 &&
          v_free > 0)) {
      throw DomainError("vehicle parameters must all be strictly positive");
    }
  }

  /// Time to cover one vehicle length at free-flow speed.
  double length_time() const { return vehicle_length / v_free; }
};

struct Capacity {
  double value = 0.0;         // veh/s
  double expected_gap = 0.0;  // s
};

/// Desired gap behind a run of i >= 1 consecutive CAVs: the string-stability
/// bound 4 omega_v / (omega_e (1 + i)), floored at tau_safe.
inline double cav_time_gap(int i, const VehicleParams& params) {
  if (i < 1) {
    throw DomainError("cav_time_gap requires i >= 1; state 0 uses the HDV gap");
  }
  return std::max(params.tau_safe, 4.0 * params.omega_v / (params.omega_e * (1.0 + i)));
}

/// Gap assigned to a vehicle in chain state i.
inline double gap_for_state(int i, const VehicleParams& params) {
  return i == 0 ? params.tau_hdv : cav_time_gap(i, params);
}

inline double expected_time_gap(const SteadyState& pi, const VehicleParams& params) {
  double gap = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    gap += pi[i] * gap_for_state(static_cast<int>(i), params);
  }
  return gap;
}

inline Capacity capacity_from_gap(double expected_gap, const VehicleParams& params) {
  return Capacity{1.0 / (expected_gap + params.length_time()), expected_gap};
}

inline Capacity mixed_capacity(const MarkovSpec& spec, const VehicleParams& params) {
  params.validate();
  return capacity_from_gap(expected_time_gap(steady_state_closed_form(spec), params), params);
}

/// True when no CAV gap exceeds the HDV gap for states 1..n, the condition
/// under which capacity is non-decreasing in p.
inline bool cav_gaps_dominate(int n, const VehicleParams& params) {
  for (int i = 1; i <= n; ++i) {
    if (cav_time_gap(i, params) > params.tau_hdv) {
      return false;
    }
  }
  return true;
}

} // namespace mixsig
