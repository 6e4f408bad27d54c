#pragma once

#include <cmath>
#include <concepts>

namespace fcsd {

struct ScalarMax {
  double argmax;
  double value;
};

/// Maximizes a unimodal (e.g. concave) function on [lo, hi] by golden-section search.
///
/// Iterates until the bracket is narrower than `tol`, then compares the interior
/// estimate with both endpoints so that monotone objectives return the boundary value.
template <std::invocable<double> F>
ScalarMax golden_section_maximize(F&& f, double lo, double hi, double tol, int max_iterations = 500) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);

  for (int i = 0; i < max_iterations && (b - a) > tol; ++i) {
    if (fc >= fd) {
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

  ScalarMax best{0.5 * (a + b), f(0.5 * (a + b))};
  for (double x : {lo, hi}) {
    const double fx = f(x);
    if (fx > best.value) best = {x, fx};
  }
  return best;
}

}  // namespace fcsd
