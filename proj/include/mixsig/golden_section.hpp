#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

namespace mixsig {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  std::size_t iterations = 0;
};

/// Golden-section search for a minimum of a unimodal f on [a, b]. One new
/// evaluation per iteration; stops when the bracket is narrower than tol.
/// f may return +inf for points it cannot evaluate; the bracket then moves
/// away from them.
template <class F>
ScalarMinimum golden_section_minimize(F&& f, double a, double b, double tol = 1e-9,
                                      std::size_t max_iter = 500) {
  constexpr double inv_phi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  if (b < a) {
    std::swap(a, b);
  }
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  std::size_t it = 0;
  for (; it < max_iter && (b - a) > tol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? ScalarMinimum{c, fc, it} : ScalarMinimum{d, fd, it};
}

} // namespace mixsig
