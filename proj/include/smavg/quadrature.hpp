#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace smavg {

/// Composite Simpson rule on [a, b] with `intervals` subintervals (rounded
/// up to even).
template <typename F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < intervals; ++i) {
    const double v = f(a + static_cast<double>(i) * h);
    if (i % 2 == 1) {
      odd += v;
    } else {
      even += v;
    }
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

struct RefinedIntegral {
  double value = 0.0;
  std::size_t intervals = 0;
};

/// Doubles the Simpson subinterval count from `initial` until two successive
/// values agree to rel_tol (or abs_tol, whichever is looser).
template <typename F>
RefinedIntegral simpson_refined(F&& f, double a, double b, std::size_t initial, double rel_tol,
                                double abs_tol, std::size_t max_intervals = std::size_t{1} << 26) {
  std::size_t n = initial < 2 ? 2 : initial;
  double previous = simpson(f, a, b, n);
  while (true) {
    n *= 2;
    if (n > max_intervals) {
      throw std::runtime_error("Simpson refinement did not converge within the interval budget");
    }
    const double current = simpson(f, a, b, n);
    if (std::abs(current - previous) <= std::max(rel_tol * std::abs(current), abs_tol)) {
      return {current, n};
    }
    previous = current;
  }
}

}  // namespace smavg
