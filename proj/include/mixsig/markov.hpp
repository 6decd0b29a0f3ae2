#pragma once

// Platoon-composition chain. State i counts the consecutive CAVs ending at
// the current vehicle, capped at the communication capacity n. The next
// vehicle is a CAV with probability p (state advances, or stays at n) and an
// HDV otherwise (state resets to 0).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

#include "mixsig/errors.hpp"

namespace mixsig {

class MarkovSpec {
public:
  MarkovSpec(int n, double p) : n_(n), p_(p) {
    if (n < 1) {
      throw DomainError("communication capacity n must be >= 1");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError("penetration rate p must lie in [0, 1]");
    }
  }

  int n() const { return n_; }
  double p() const { return p_; }
  std::size_t state_count() const { return static_cast<std::size_t>(n_) + 1; }

private:
  int n_;
  double p_;
};

/// Dense (n+1)x(n+1) row-stochastic matrix, row = current state.
class TransitionMatrix {
public:
  explicit TransitionMatrix(std::size_t size) : size_(size), entries_(size * size, 0.0) {}

  std::size_t size() const { return size_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * size_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return entries_[i * size_ + j]; }

  double row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < size_; ++j) {
      s += (*this)(i, j);
    }
    return s;
  }

  /// Row vector times matrix.
  std::vector<double> left_multiply(const std::vector<double>& v) const {
    std::vector<double> out(size_, 0.0);
    for (std::size_t i = 0; i < size_; ++i) {
      if (v[i] == 0.0) {
        continue;
      }
      for (std::size_t j = 0; j < size_; ++j) {
        out[j] += v[i] * (*this)(i, j);
      }
    }
    return out;
  }

private:
  std::size_t size_;
  std::vector<double> entries_;
};

struct SteadyState {
  std::vector<double> pi;

  std::size_t size() const { return pi.size(); }
  double operator[](std::size_t i) const { return pi[i]; }
  double sum() const {
    double s = 0.0;
    for (double x : pi) {
      s += x;
    }
    return s;
  }
};

struct VehicleTypeSequence {
  std::vector<int> states;
  std::uint64_t seed = 0;
};

inline TransitionMatrix build_transition_matrix(const MarkovSpec& spec) {
  const std::size_t n = static_cast<std::size_t>(spec.n());
  const double p = spec.p();
  TransitionMatrix m(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    m(i, 0) = 1.0 - p;
    m(i, std::min(i + 1, n)) += p;
  }
  return m;
}

/// Closed-form stationary distribution. For i < n the geometric form
/// p^i / D holds; the capped state absorbs the tail, pi_n = p^n / ((1-p) D).
inline SteadyState steady_state_closed_form(const MarkovSpec& spec) {
  const int n = spec.n();
  const double p = spec.p();
  SteadyState s{std::vector<double>(spec.state_count(), 0.0)};
  if (p >= 1.0) {
    s.pi[static_cast<std::size_t>(n)] = 1.0;
    return s;
  }
  const double pn = std::pow(p, n);
  double geometric = 0.0;
  for (int m = 0; m < n; ++m) {
    geometric += std::pow(p, m);
  }
  const double denom = pn / (1.0 - p) + geometric;
  for (int i = 0; i < n; ++i) {
    s.pi[static_cast<std::size_t>(i)] = std::pow(p, i) / denom;
  }
  s.pi[static_cast<std::size_t>(n)] = pn / ((1.0 - p) * denom);
  return s;
}

inline double stationarity_residual(const TransitionMatrix& P, const std::vector<double>& pi) {
  const auto next = P.left_multiply(pi);
  double r = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) {
    r = std::max(r, std::abs(next[j] - pi[j]));
  }
  return r;
}

/// Power iteration from the uniform distribution until max |pi P - pi| <= tol.
inline SteadyState steady_state_power_iteration(const TransitionMatrix& P, double tol,
                                                std::size_t max_iter = 100000) {
  if (!(tol > 0.0)) {
    throw DomainError("power iteration tolerance must be positive");
  }
  const std::size_t size = P.size();
  std::vector<double> pi(size, 1.0 / static_cast<double>(size));
  double residual = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    auto next = P.left_multiply(pi);
    double total = 0.0;
    for (double x : next) {
      total += x;
    }
    for (double& x : next) {
      x /= total;
    }
    pi = std::move(next);
    residual = stationarity_residual(P, pi);
    if (residual <= tol) {
      return SteadyState{std::move(pi)};
    }
  }
  std::ostringstream msg;
  msg << "power iteration did not converge in " << max_iter << " iterations (residual "
      << residual << ", tolerance " << tol << ")";
  throw ConvergenceError(msg.str());
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Samples a chain trajectory of `count` vehicles. The first state is drawn
/// from the stationary distribution so the whole sequence is stationary.
inline VehicleTypeSequence sample_sequence(const MarkovSpec& spec, std::size_t count,
                                           std::uint64_t seed) {
  if (count < 1) {
    throw DomainError("sample count must be >= 1");
  }
  const int n = spec.n();
  const double p = spec.p();
  const auto stationary = steady_state_closed_form(spec);

  std::mt19937_64 engine(seed);
  VehicleTypeSequence seq;
  seq.seed = seed;
  seq.states.reserve(count);

  const double u0 = detail::unit_uniform(engine);
  int state = n;
  double cumulative = 0.0;
  for (int i = 0; i <= n; ++i) {
    cumulative += stationary[static_cast<std::size_t>(i)];
    if (u0 < cumulative) {
      state = i;
      break;
    }
  }
  seq.states.push_back(state);

  for (std::size_t k = 1; k < count; ++k) {
    const bool cav = detail::unit_uniform(engine) < p;
    state = cav ? std::min(state + 1, n) : 0;
    seq.states.push_back(state);
  }
  return seq;
}

/// Fraction of the sequence spent in each state.
inline std::vector<double> empirical_frequencies(const VehicleTypeSequence& seq, int n) {
  std::vector<double> freq(static_cast<std::size_t>(n) + 1, 0.0);
  for (int s : seq.states) {
    freq[static_cast<std::size_t>(s)] += 1.0;
  }
  for (double& f : freq) {
    f /= static_cast<double>(seq.states.size());
  }
  return freq;
}

} // namespace mixsig
