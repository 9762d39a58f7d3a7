#include "smavg/kernel.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace smavg {

namespace {

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("time must be positive and finite, got " + std::to_string(t));
  }
}

std::ptrdiff_t whole_offset(double from, double to, double step) {
  const double raw = (to - from) / step;
  const double rounded = std::round(raw);
  if (std::abs(raw - rounded) > 1e-9) {
    throw std::invalid_argument("convolution lines are not aligned on a common grid");
  }
  return static_cast<std::ptrdiff_t>(rounded);
}

}  // namespace

KernelParams KernelParams::shipped(double horizon) {
  return {std::exp(-0.5) / (2.0 * std::sqrt(std::numbers::pi)), 1.0 / 8.0, horizon};
}

void KernelParams::validate() const {
  if (!(c_dx > 0.0) || !(lambda_dx > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("kernel constants and horizon must be positive");
  }
}

double heat_kernel(double t, double x) {
  require_positive_time(t);
  return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(std::numbers::pi * t));
}

double heat_kernel_dx(double t, double x) { return -x / (2.0 * t) * heat_kernel(t, x); }

double heat_kernel_time_integral(double t, double d) {
  if (t < 0.0) throw std::invalid_argument("time integral needs t >= 0");
  if (t == 0.0) return 0.0;
  const double ad = std::abs(d);
  const double st = std::sqrt(t);
  return st / std::sqrt(std::numbers::pi) * std::exp(-d * d / (4.0 * t)) -
         0.5 * ad * std::erfc(ad / (2.0 * st));
}

ConvolutionStencil::ConvolutionStencil(double t, double step, double truncation_sd)
    : t_(t), step_(step) {
  require_positive_time(t);
  if (!(step > 0.0)) throw std::invalid_argument("stencil step must be positive");
  if (!(truncation_sd > 0.0)) throw std::invalid_argument("truncation width must be positive");
  const double reach = truncation_sd * std::sqrt(2.0 * t);
  half_width_ = static_cast<std::size_t>(std::ceil(reach / step));
  taps_.resize(2 * half_width_ + 1);
  for (std::size_t i = 0; i < taps_.size(); ++i) {
    const double x = (static_cast<double>(i) - static_cast<double>(half_width_)) * step;
    taps_[i] = step * heat_kernel(t, x);
  }
}

void ConvolutionStencil::apply(std::span<const double> field, std::ptrdiff_t offset,
                               std::span<double> out) const {
  if (field.empty()) throw std::invalid_argument("cannot convolve an empty field");
  const auto n = static_cast<std::ptrdiff_t>(field.size());
  const auto hw = static_cast<std::ptrdiff_t>(half_width_);
  const double* w = taps_.data() + half_width_;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::ptrdiff_t c = offset + static_cast<std::ptrdiff_t>(i);
    if (c - hw >= 0 && c + hw < n) {
      // Interior: four independent accumulators, fixed order.
      const double* f = field.data() + c;
      double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      std::ptrdiff_t m = -hw;
      for (; m + 3 <= hw; m += 4) {
        a0 += w[m] * f[-m];
        a1 += w[m + 1] * f[-m - 1];
        a2 += w[m + 2] * f[-m - 2];
        a3 += w[m + 3] * f[-m - 3];
      }
      for (; m <= hw; ++m) a0 += w[m] * f[-m];
      out[i] = (a0 + a1) + (a2 + a3);
    } else {
      double acc = 0.0;
      for (std::ptrdiff_t m = -hw; m <= hw; ++m) {
        const std::ptrdiff_t k = std::clamp<std::ptrdiff_t>(c - m, 0, n - 1);
        acc += w[m] * field[static_cast<std::size_t>(k)];
      }
      out[i] = acc;
    }
  }
}

std::vector<double> kernel_convolve(std::span<const double> field, const UniformLine& source,
                                    double t, const UniformLine& target, double truncation_sd) {
  require_positive_time(t);
  if (field.size() != source.count) {
    throw std::invalid_argument("field has " + std::to_string(field.size()) +
                                " samples but its line has " + std::to_string(source.count));
  }
  if (std::abs(source.step - target.step) > 1e-12 * source.step) {
    throw std::invalid_argument("convolution lines must share the step");
  }
  const ConvolutionStencil stencil(t, source.step, truncation_sd);
  std::vector<double> out(target.count);
  stencil.apply(field, whole_offset(source.origin, target.origin, source.step), out);
  return out;
}

std::vector<double> kernel_convolve(std::span<const double> field, const UniformLine& line, double t,
                                    double truncation_sd) {
  return kernel_convolve(field, line, t, line, truncation_sd);
}

BoundCheck kernel_dx_bound_check(double t, double x, const KernelParams& params) {
  require_positive_time(t);
  params.validate();
  BoundCheck r;
  r.lhs = std::abs(x) / (2.0 * t) * heat_kernel(t, x);
  r.rhs = params.c_dx / t * std::exp(-params.lambda_dx * x * x / t);
  r.holds = r.lhs <= r.rhs * (1.0 + kRoundingSlack);
  return r;
}

BoundCheck log_tail_bound(double b, double t, double horizon) {
  if (!(b > 0.0)) throw std::invalid_argument("log_tail_bound needs b > 0");
  require_positive_time(t);
  if (t > horizon) throw std::invalid_argument("log_tail_bound needs t <= T");
  BoundCheck r;
  const double lower = b / t;
  if (lower > 700.0) {
    r.lhs = 0.0;  // below e^{-700} / 700
  } else {
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    r.lhs = integrator.integrate([](double z) { return std::exp(-z) / z; }, lower,
                                 std::numeric_limits<double>::infinity(), 1e-12, &err);
    if (err > kLogTailTolerance) {
      throw std::runtime_error("exponential-integral quadrature missed its tolerance");
    }
  }
  r.rhs = std::abs(std::log(horizon / b)) + 1.0;
  r.holds = r.lhs <= r.rhs + kLogTailTolerance;
  return r;
}

}  // namespace smavg
