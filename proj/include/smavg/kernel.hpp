#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smavg {

/// Number of kernel standard deviations kept by spatial convolutions. The
/// discarded two-sided Gaussian tail mass is erfc(8 / sqrt 2) ~ 1.2e-15.
inline constexpr double kDefaultTruncationSd = 8.0;

/// Constants of the derivative bound |p_x(t,x)| <= (C/t) exp(-lambda x^2 / t).
struct KernelParams {
  double c_dx = 0.0;
  double lambda_dx = 0.0;
  double horizon = 1.0;

  /// lambda = 1/8 and C = e^{-1/2} / (2 sqrt(pi)): the smallest C for that
  /// lambda, attained at |x| = 2 sqrt(t).
  static KernelParams shipped(double horizon = 1.0);

  void validate() const;
};

/// p(t, x) = (2 sqrt(pi t))^{-1} exp(-x^2 / (4t)). Throws for t <= 0.
double heat_kernel(double t, double x);

/// d/dx p(t, x) = -(x / 2t) p(t, x).
double heat_kernel_dx(double t, double x);

/// \int_0^t p(v, d) dv = sqrt(t/pi) e^{-d^2/4t} - (|d|/2) erfc(|d| / (2 sqrt t)).
double heat_kernel_time_integral(double t, double d);

/// Uniform sample points origin + i * step, i = 0..count-1.
struct UniformLine {
  double origin = 0.0;
  double step = 1.0;
  std::size_t count = 0;

  double at(std::size_t i) const { return origin + static_cast<double>(i) * step; }
};

/// Precomputed taps of P_t on a uniform line with spacing `step`:
/// w_m = step * p(t, m * step) for |m * step| <= truncation_sd * sqrt(2t).
class ConvolutionStencil {
 public:
  ConvolutionStencil(double t, double step, double truncation_sd = kDefaultTruncationSd);

  double time() const { return t_; }
  std::size_t half_width() const { return half_width_; }
  std::span<const double> taps() const { return taps_; }

  /// out[i] = sum_m w_m field[clamp(offset + i - m)], i.e. the source field is
  /// extended by its boundary values. `offset` is the index of out[0]'s
  /// position inside the source line.
  void apply(std::span<const double> field, std::ptrdiff_t offset, std::span<double> out) const;

 private:
  double t_;
  double step_;
  std::size_t half_width_;
  std::vector<double> taps_;  // taps_[half_width_ + m] = w_m
};

/// Trapezoid approximation of \int p(t, x - y) field(y) dy evaluated on
/// `target`. `source` and `target` must share the step and be offset by a
/// whole number of steps; outside `source` the field is held at its
/// boundary values.
std::vector<double> kernel_convolve(std::span<const double> field, const UniformLine& source,
                                    double t, const UniformLine& target,
                                    double truncation_sd = kDefaultTruncationSd);

/// Same line in and out.
std::vector<double> kernel_convolve(std::span<const double> field, const UniformLine& line, double t,
                                    double truncation_sd = kDefaultTruncationSd);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Relative slack used where an inequality is attained with equality and
/// both sides are rounded independently.
inline constexpr double kRoundingSlack = 1e-12;

/// lhs = |p_x(t,x)| against rhs = (C/t) exp(-lambda x^2 / t).
BoundCheck kernel_dx_bound_check(double t, double x, const KernelParams& params);

/// Absolute tolerance of the exponential-integral quadrature.
inline constexpr double kLogTailTolerance = 1e-9;

/// lhs = \int_0^t v^{-1} e^{-b/v} dv = \int_{b/t}^inf e^{-z}/z dz by adaptive
/// quadrature, rhs = |ln(T/b)| + 1.
BoundCheck log_tail_bound(double b, double t, double horizon);

}  // namespace smavg
