#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "smavg/kernel.hpp"

using namespace smavg;

namespace {

std::vector<double> sample(const UniformLine& line, double (*fn)(double)) {
  std::vector<double> v(line.count);
  for (std::size_t i = 0; i < line.count; ++i) v[i] = fn(line.at(i));
  return v;
}

double gaussian_a1(double y) { return std::exp(-y * y / 4.0); }

}  // namespace

TEST(HeatKernel, ClosedFormValues) {
  EXPECT_NEAR(heat_kernel(1.0, 0.0), 0.28209479177387814, 1e-15);
  EXPECT_NEAR(heat_kernel(0.25, 1.0), std::exp(-1.0) / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(heat_kernel(0.25, 1.0), 0.2075537487102974, 1e-12);
}

TEST(HeatKernel, EvenPositiveAndRejectsNonPositiveTime) {
  EXPECT_EQ(heat_kernel(0.3, 1.7), heat_kernel(0.3, -1.7));
  EXPECT_GT(heat_kernel(0.01, 3.0), 0.0);
  EXPECT_THROW(heat_kernel(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(heat_kernel(-1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(heat_kernel_dx(0.0, 1.0), std::invalid_argument);
}

TEST(HeatKernel, UnitMassOverLogSweep) {
  // Composite Simpson over +-12 standard deviations at a step far below the width.
  for (int i = 0; i <= 12; ++i) {
    const double t = 1e-3 * std::pow(1e3, i / 12.0);
    const double half = 12.0 * std::sqrt(2.0 * t);
    const int n = 4000;
    const double h = 2.0 * half / n;
    double acc = heat_kernel(t, -half) + heat_kernel(t, half);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * heat_kernel(t, -half + k * h);
    EXPECT_NEAR(acc * h / 3.0, 1.0, 1e-8) << "t = " << t;
  }
}

TEST(HeatKernel, DerivativeMatchesCentralDifference) {
  for (double t : {0.01, 0.3, 1.0}) {
    for (double x : {-1.3, 0.2, 0.9}) {
      const double h = 1e-6;
      const double fd = (heat_kernel(t, x + h) - heat_kernel(t, x - h)) / (2 * h);
      EXPECT_NEAR(heat_kernel_dx(t, x), fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(HeatKernel, TimeIntegralMatchesQuadrature) {
  // Simpson in w = sqrt(v), where 2 w p(w^2, d) = e^{-d^2/(4 w^2)} / sqrt(pi).
  for (double t : {0.1, 1.0}) {
    for (double d : {0.0, 0.05, 0.7, 2.0}) {
      const int n = 20000;
      const double top = std::sqrt(t);
      const double h = top / n;
      auto f = [&](double w) {
        if (w == 0.0) return d == 0.0 ? 1.0 / std::sqrt(std::numbers::pi) : 0.0;
        return 2.0 * w * heat_kernel(w * w, d);
      };
      double acc = f(0.0) + f(top);
      for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(k * h);
      EXPECT_NEAR(heat_kernel_time_integral(t, d), acc * h / 3.0, 1e-9) << t << ' ' << d;
    }
  }
}

TEST(Convolve, ConstantOneIsPreserved) {
  const UniformLine line{-4.0, 1.0 / 64, 513};
  const std::vector<double> ones(line.count, 1.0);
  for (double t : {1e-3, 0.1, 1.0}) {
    const auto out = kernel_convolve(ones, line, t);
    for (double v : out) {
      EXPECT_NEAR(v, 1.0, 1e-6);
      EXPECT_LE(v, 1.0 + 1e-12);
      EXPECT_GE(v, 1.0 - 1e-12);
    }
  }
}

TEST(Convolve, GaussianClosedForm) {
  // sqrt(a / (a + t)) exp(-x^2 / (4 (a + t))) with a = t = 1.
  const UniformLine source{-20.0, 1.0 / 64, 40 * 64 + 1};
  const UniformLine target{-4.0, 1.0 / 64, 8 * 64 + 1};
  const auto out = kernel_convolve(sample(source, gaussian_a1), source, 1.0, target);
  for (std::size_t i = 0; i < target.count; ++i) {
    const double x = target.at(i);
    EXPECT_NEAR(out[i], std::sqrt(0.5) * std::exp(-x * x / 8.0), 1e-4);
  }
}

TEST(Convolve, ZeroFieldStaysZero) {
  const UniformLine line{-2.0, 1.0 / 32, 129};
  for (double v : kernel_convolve(std::vector<double>(line.count, 0.0), line, 0.5)) EXPECT_EQ(v, 0.0);
}

TEST(Convolve, SemigroupProperty) {
  const UniformLine line{-16.0, 1.0 / 32, 32 * 32 + 1};
  const auto field = sample(line, gaussian_a1);
  for (auto [s, t] : {std::pair{0.1, 0.4}, std::pair{0.25, 0.75}, std::pair{0.5, 0.5}}) {
    const auto twice = kernel_convolve(kernel_convolve(field, line, s), line, t);
    const auto once = kernel_convolve(field, line, s + t);
    for (std::size_t i = 0; i < line.count; ++i) EXPECT_NEAR(twice[i], once[i], 1e-4);
  }
}

TEST(Convolve, RejectsBadInput) {
  const UniformLine line{-1.0, 0.25, 9};
  const std::vector<double> field(9, 1.0);
  EXPECT_THROW(kernel_convolve(field, line, 0.0), std::invalid_argument);
  EXPECT_THROW(kernel_convolve(std::vector<double>(5, 1.0), line, 0.1), std::invalid_argument);
  const UniformLine shifted{-0.9, 0.25, 9};
  EXPECT_THROW(kernel_convolve(field, line, 0.1, shifted), std::invalid_argument);
}

TEST(DxBound, ShippedConstantsAndCenter) {
  const auto p = KernelParams::shipped(1.0);
  EXPECT_NEAR(p.c_dx, std::exp(-0.5) / (2.0 * std::sqrt(std::numbers::pi)), 1e-15);
  EXPECT_NEAR(p.c_dx, 0.17109914015610828, 1e-15);
  EXPECT_EQ(p.lambda_dx, 0.125);
  const auto r = kernel_dx_bound_check(0.5, 0.0, p);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_TRUE(r.holds);
}

TEST(DxBound, HoldsOverFullSweepAndIsTightAtTwoSqrtT) {
  const auto p = KernelParams::shipped(1.0);
  for (int i = 0; i <= 30; ++i) {
    const double t = 1e-3 * std::pow(1e3, i / 30.0);
    for (int k = -1000; k <= 1000; ++k) {
      EXPECT_TRUE(kernel_dx_bound_check(t, 0.01 * k, p).holds) << t << ' ' << 0.01 * k;
    }
    const auto tight = kernel_dx_bound_check(t, 2.0 * std::sqrt(t), p);
    EXPECT_NEAR(tight.lhs / tight.rhs, 1.0, 1e-12);
  }
}

TEST(DxBound, AggressiveLambdaFails) {
  auto p = KernelParams::shipped(1.0);
  p.lambda_dx = 10.0;
  EXPECT_FALSE(kernel_dx_bound_check(0.1, 2.0, p).holds);
}

TEST(DxBound, RejectsBadInput) {
  EXPECT_THROW(kernel_dx_bound_check(0.0, 1.0, KernelParams::shipped()), std::invalid_argument);
  KernelParams bad{0.0, 0.125, 1.0};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(LogTail, ExponentialIntegralValues) {
  // E1(b) = -Ei(-b).
  const auto a = log_tail_bound(0.5, 1.0, 1.0);
  EXPECT_NEAR(a.lhs, -std::expint(-0.5), 1e-9);
  EXPECT_NEAR(a.lhs, 0.55977, 1e-5);
  EXPECT_NEAR(a.rhs, std::log(2.0) + 1.0, 1e-12);
  EXPECT_TRUE(a.holds);
  const auto b = log_tail_bound(1.0, 1.0, 1.0);
  EXPECT_NEAR(b.lhs, -std::expint(-1.0), 1e-9);
  EXPECT_NEAR(b.rhs, 1.0, 1e-15);
  EXPECT_TRUE(b.holds);
  const auto c = log_tail_bound(100.0, 1.0, 1.0);
  EXPECT_LT(c.lhs, 1e-40);
  EXPECT_TRUE(c.holds);
}

TEST(LogTail, HoldsOverLogSweepAndMatchesOracle) {
  for (int i = 0; i <= 60; ++i) {
    const double b = 1e-4 * std::pow(1e6, i / 60.0);
    const auto r = log_tail_bound(b, 1.0, 1.0);
    EXPECT_TRUE(r.holds) << b;
    EXPECT_NEAR(r.lhs, -std::expint(-b), 1e-9) << b;
  }
}

TEST(LogTail, RejectsBadInput) {
  EXPECT_THROW(log_tail_bound(0.0, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(log_tail_bound(1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(log_tail_bound(1.0, 2.0, 1.0), std::invalid_argument);
}
