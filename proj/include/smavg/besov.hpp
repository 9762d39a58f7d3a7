#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "smavg/stochastic_measure.hpp"

namespace smavg {

/// Uniform samples of a function on [lo, hi] with spacing `step`.
struct SampledFunction {
  double lo = 0.0;
  double hi = 1.0;
  double step = 1.0;
  std::vector<double> values;

  /// Samples fn at lo + i * step for i = 0..(hi - lo) / step. The width must
  /// be a whole number of steps.
  static SampledFunction sample(const std::function<double(double)>& fn, double lo, double hi, double step);

  std::size_t intervals() const { return values.empty() ? 0 : values.size() - 1; }
  /// Throws unless the sample count matches the interval and every value is finite.
  void validate() const;
};

/// S_m = (sum_y |g(y + m step) - g(y)|^2 step)^{1/2} for m = 0..intervals,
/// with y over the samples in [lo, hi - m step].
std::vector<double> shift_norms(const SampledFunction& g);

/// w_2(g, r): the largest S_m over shifts m step <= r.
double w2_modulus(const SampledFunction& g, double r);

struct BesovReport {
  double l2_part = 0.0;
  double modulus_integral = 0.0;
  double norm = 0.0;  ///< l2_part + sqrt(modulus_integral)
  double alpha = 0.0;
};

/// Discrete B^alpha_{22} norm at the sample resolution. The L2 part uses the
/// trapezoid rule. The sampled w_2 is constant on each [m step, (m+1) step),
/// so the modulus integral over [step, hi - lo] is summed exactly piecewise:
///   sum_m W_m^2 ((m step)^{-2 alpha} - ((m+1) step)^{-2 alpha}) / (2 alpha).
BesovReport besov_norm(const SampledFunction& g, double alpha);

/// (sum_{n=1}^{n_max} 2^{n beta} sum_k |q(d_kn) - q(d_(k-1)n)|^2)^{1/2} for q
/// sampled on a unit interval at depth >= n_max.
double dyadic_sum(const SampledFunction& q, double beta, int n_max);

struct DyadicVersionResult {
  double eta_tilde = 0.0;
  double bound = 0.0;
  double boundary_part = 0.0;  ///< |q(j) mu((j, j+1])|
  double dyadic_part = 0.0;    ///< dyadic_sum(q, beta, n_max)
  double measure_part = 0.0;   ///< (sum_n 2^{-n beta} sum_k mu(Delta_kn)^2)^{1/2}
  bool holds = false;
};

/// Accumulation slack allowed on top of the exact discrete inequality.
inline constexpr double kDyadicVersionSlack = 1e-12;

/// Telescoping version of \int_{(j, j+1]} q dmu built from left-endpoint step
/// approximations q_n at every level up to the realization depth, and the
/// matching bound. q must be sampled on [j, j+1] at exactly that depth.
DyadicVersionResult dyadic_version_and_bound(const SampledFunction& q, const SMRealization& sm, int j, double beta);

}  // namespace smavg
