#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "smavg/mild_solver.hpp"

using namespace smavg;

namespace {

const SpaceTimeGrid kSmall{2, 5, 1.0, 16};
const DyadicDomain kSmallDomain{-4, 4, 5};

CoefficientSet coefficients(TimeProfile profile, Nonlinearity::Kind f = Nonlinearity::Kind::saturating,
                            InitialCondition::Kind u0 = InitialCondition::Kind::gaussian) {
  return {SigmaSpec::make(profile), Nonlinearity{f}, InitialCondition{u0}};
}

MeasureSpec zero_measure() {
  MeasureSpec s;
  s.weight = Weight::zero();
  return s;
}

// K(t, d) straight from its definition: Simpson in u = sqrt(t - s) with a
// step far below every scale in play. The solver's own step is capped at
// dx/8, which leaves a few 1e-6 at the nearest lags where e^{-d^2/4u^2}
// switches on over u ~ d/2.
double profile_oracle(const SigmaSpec& spec, double eps, double t, double d) {
  const int n = 400000;
  const double top = std::sqrt(t);
  const double h = top / n;
  auto f = [&](double u) {
    if (u == 0.0) return d == 0.0 ? spec.time_factor(t / eps) / std::sqrt(std::numbers::pi) : 0.0;
    return 2.0 * u * heat_kernel(u * u, d) * spec.time_factor((t - u * u) / eps);
  };
  double acc = f(0.0) + f(top);
  for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(k * h);
  return acc * h / 3.0;
}

}  // namespace

TEST(Grid, AlignmentAndValidation) {
  EXPECT_EQ(kSmall.dx(), 1.0 / 32);
  EXPECT_EQ(kSmall.points(), 129u);
  EXPECT_TRUE(kSmall.aligned_with(kSmallDomain));
  EXPECT_FALSE(kSmall.aligned_with(DyadicDomain{-4, 4, 6}));
  EXPECT_FALSE(kSmall.aligned_with(DyadicDomain{-1, 4, 5}));
  EXPECT_THROW((SpaceTimeGrid{2, 5, 1.0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((SpaceTimeGrid{2, 5, 0.0, 4}.validate()), std::invalid_argument);
  EXPECT_THROW(NoiseKernelTable(SigmaSpec{}, Mode::averaged(), kSmall, DyadicDomain{-4, 4, 6}), std::invalid_argument);
  EXPECT_THROW(Mode::fast(0.0), std::invalid_argument);
}

TEST(NoiseProfile, MatchesDefinitionQuadrature) {
  const auto spec = SigmaSpec::make(TimeProfile::periodic_cos);
  for (double eps : {0.25, 0.01}) {
    for (double d : {0.0, 1.0 / 32, 0.5, 2.0}) {
      for (double t : {0.25, 1.0}) {
        const double got = noise_time_profile(spec, Mode::fast(eps), t, d, 1.0 / 32);
        EXPECT_NEAR(got, profile_oracle(spec, eps, t, d), 2e-5) << eps << ' ' << d << ' ' << t;
      }
    }
  }
}

TEST(NoiseProfile, AveragedModeIsClosedForm) {
  const auto spec = SigmaSpec::make(TimeProfile::periodic_cos);
  EXPECT_EQ(noise_time_profile(spec, Mode::averaged(), 0.5, 0.3, 0.01), 2.0 * heat_kernel_time_integral(0.5, 0.3));
  EXPECT_EQ(noise_time_profile(spec, Mode::fast(0.1), 0.0, 0.3, 0.01), 0.0);
}

TEST(NoiseTerm, ZeroAverageGivesZeroField) {
  const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, 3);
  const auto n = noise_term(sm, SigmaSpec::make(TimeProfile::periodic_sin), Mode::averaged(), kSmall);
  for (double v : n.values) EXPECT_EQ(v, 0.0);
}

TEST(NoiseTerm, TimeConstantIgnoresEps) {
  const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, 3);
  const auto spec = SigmaSpec::make(TimeProfile::time_constant);
  const auto bar = noise_term(sm, spec, Mode::averaged(), kSmall);
  const auto fast = noise_term(sm, spec, Mode::fast(0.01), kSmall);
  EXPECT_EQ(bar.values, fast.values);
  for (double v : xi_epsilon(sm, spec, 0.01, kSmall).values) EXPECT_EQ(v, 0.0);
}

TEST(NoiseTerm, FirstRowIsZero) {
  const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, 3);
  const auto n = noise_term(sm, SigmaSpec{}, Mode::fast(0.1), kSmall);
  for (double v : n.row(0)) EXPECT_EQ(v, 0.0);
}

TEST(NoiseTerm, TableMatchesDirectStochasticIntegral) {
  // The centered-noise construction node by node: g(z, y_k) at every left endpoint,
  // then the left-endpoint sum against mu.
  const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, 5);
  const auto spec = SigmaSpec::make(TimeProfile::periodic_cos);
  const Mode mode = Mode::fast(0.05);
  const auto field = noise_term(sm, spec, mode, kSmall);
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{16, 64}, {5, 0}, {9, 128}, {1, 77}}) {
    const double t = kSmall.t(i), x = kSmall.x(j);
    const double direct = integrate_deterministic(sm, Integrand([&](double y) {
      return spec.amplitude_at(y) * noise_time_profile(spec, mode, t, x - y, kSmall.dx());
    }));
    EXPECT_NEAR(field.at(i, j), direct, 1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST(NoiseTerm, XiIsDifferenceOfNoiseTerms) {
  const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, 6);
  const auto spec = SigmaSpec::make(TimeProfile::periodic_cos);
  const auto xi = xi_epsilon(sm, spec, 0.05, kSmall);
  const auto a = noise_term(sm, spec, Mode::fast(0.05), kSmall);
  const auto b = noise_term(sm, spec, Mode::averaged(), kSmall);
  for (std::size_t k = 0; k < xi.values.size(); ++k) EXPECT_NEAR(xi.values[k], a.values[k] - b.values[k], 1e-12);
}

TEST(NoiseTerm, XiShrinksWithEpsAndStaysBoundedAfterScaling) {
  const SpaceTimeGrid grid{1, 6, 1.0, 8};
  const DyadicDomain domain{-3, 3, 6};
  const auto spec = SigmaSpec::make(TimeProfile::periodic_sin);
  for (std::uint64_t seed : {1u, 2u}) {
    const auto sm = realize_sm(MeasureSpec{}, domain, seed);
    auto sup = [&](double eps) {
      double m = 0.0;
      for (double v : xi_epsilon(sm, spec, eps, grid).values) m = std::max(m, std::abs(v));
      return m;
    };
    const double coarse = sup(1e-2);
    const double fine = sup(1e-4);
    EXPECT_GT(coarse, fine);
    const double scaled_coarse = coarse * std::pow(1e-2, -1.0 / 6.0);
    const double scaled_fine = fine * std::pow(1e-4, -1.0 / 6.0);
    const double ratio = std::max(scaled_coarse, scaled_fine) / std::min(scaled_coarse, scaled_fine);
    EXPECT_LE(ratio, 10.0) << "seed " << seed;
  }
}

TEST(Solver, DeterministicGaussianEvolution) {
  const SpaceTimeGrid grid{4, 8, 1.0, 64};
  const DyadicDomain domain{-8, 8, 8};
  const auto sm = realize_sm(zero_measure(), domain, 1);
  const auto u = solve_mild(sm, coefficients(TimeProfile::periodic_cos, Nonlinearity::Kind::zero), Mode::averaged(), grid);
  double worst = 0.0;
  for (std::size_t i = 0; i <= grid.nt; ++i) {
    const double t = grid.t(i);
    for (std::size_t j = 0; j < grid.points(); ++j) {
      const double x = grid.x(j);
      worst = std::max(worst, std::abs(u.at(i, j) - std::sqrt(1.0 / (1.0 + t)) * std::exp(-x * x / (4.0 * (1.0 + t)))));
    }
  }
  EXPECT_LT(worst, 1e-3);
  for (std::size_t j = 0; j < grid.points(); ++j) EXPECT_EQ(u.at(0, j), std::exp(-grid.x(j) * grid.x(j) / 4.0));
}

TEST(Solver, ZeroDriftStopsAfterOneIteration) {
  const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, 2);
  const auto coeffs = coefficients(TimeProfile::periodic_cos, Nonlinearity::Kind::zero);
  const MildSolver solver(coeffs, kSmall);
  const auto noise = noise_term(sm, coeffs.sigma, Mode::fast(0.1), kSmall);
  const auto u = solver.solve(noise);
  EXPECT_EQ(u.iterations, 1u);
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    EXPECT_EQ(u.values[k], solver.initial_term().values[k] + noise.values[k]);
  }
}

TEST(Solver, PicardIncrementsContract) {
  MeasureSpec strong;
  strong.weight = Weight::gaussian(4.0, 1.0);
  const auto sm = realize_sm(strong, kSmallDomain, 4);
  const auto coeffs = coefficients(TimeProfile::periodic_cos, Nonlinearity::Kind::clamp);
  const auto u = solve_mild(sm, coeffs, Mode::fast(0.1), kSmall);
  const double bound = coeffs.f.lipschitz() * kSmall.horizon * 1.1;
  ASSERT_GE(u.increments.size(), 3u);
  double total = 0.0;
  for (std::size_t m = 1; m < u.increments.size(); ++m) {
    if (u.increments[m - 1] > 1e-13) EXPECT_LE(u.increments[m] / u.increments[m - 1], bound) << m;
    total += u.increments[m];
  }
  EXPECT_TRUE(std::isfinite(total));
  EXPECT_LT(u.residual, 1e-8);
}

TEST(Solver, DivergenceIsReported) {
  const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, 4);
  const auto coeffs = coefficients(TimeProfile::periodic_cos);
  const MildSolver solver(coeffs, kSmall);
  const auto noise = noise_term(sm, coeffs.sigma, Mode::averaged(), kSmall);
  try {
    solver.solve(noise, PicardOptions{1e-15, 2});
    FAIL() << "expected PicardDivergence";
  } catch (const PicardDivergence& e) {
    EXPECT_EQ(e.iterations(), 2u);
    EXPECT_GT(e.residual(), 0.0);
  }
  auto poisoned = noise;
  poisoned.at(3, 7) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(solver.solve(poisoned), PicardDivergence);
}

TEST(SupError, BasicCases) {
  auto a = FieldTrajectory::zeros(kSmall);
  auto b = a;
  EXPECT_EQ(sup_error(a, b), 0.0);
  b.at(4, 60) = 0.25;
  EXPECT_EQ(sup_error(a, b), 0.25);
  b.at(2, 0) = 3.0;  // x = -2 lies in the margin band
  EXPECT_EQ(sup_error(a, b, 1.0), 0.25);
  auto c = FieldTrajectory::zeros(SpaceTimeGrid{2, 5, 1.0, 8});
  EXPECT_THROW(sup_error(a, c), std::invalid_argument);
}

TEST(SupError, TimeConstantSigmaGivesIdenticalSolutions) {
  const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, 8);
  const auto coeffs = coefficients(TimeProfile::time_constant);
  const auto ub = solve_mild(sm, coeffs, Mode::averaged(), kSmall);
  for (double eps : {0.25, 0.01}) {
    EXPECT_LE(sup_error(solve_mild(sm, coeffs, Mode::fast(eps), kSmall), ub), 2e-8);
  }
}

// Property over seeds: the discrete Gronwall comparison
// sup_x |u_eps - u_bar|(t) <= e^{L_f t} sup_{s<=t} sup_x |xi|(s) (1 + 0.1).
TEST(Gronwall, HoldsPerRealization) {
  const auto coeffs = coefficients(TimeProfile::periodic_cos);
  const MildSolver solver(coeffs, kSmall);
  const NoiseKernelTable bar(coeffs.sigma, Mode::averaged(), kSmall, kSmallDomain);
  const NoiseKernelTable fast(coeffs.sigma, Mode::fast(0.05), kSmall, kSmallDomain);
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, seed);
    const auto nb = bar.apply(sm);
    const auto nf = fast.apply(sm);
    const auto diff = row_sup_difference(solver.solve(nf), solver.solve(nb));
    double running = 0.0;
    for (std::size_t i = 0; i <= kSmall.nt; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < kSmall.points(); ++j) row = std::max(row, std::abs(nf.at(i, j) - nb.at(i, j)));
      running = std::max(running, row);
      EXPECT_LE(diff[i], std::exp(coeffs.f.lipschitz() * kSmall.t(i)) * running * 1.1 + 2e-8) << seed << ' ' << i;
    }
  }
}

TEST(Refinement, HalvingStepsKeepsSupErrorStable) {
  const auto coeffs = coefficients(TimeProfile::periodic_cos);
  const SpaceTimeGrid coarse{4, 8, 1.0, 64};
  const SpaceTimeGrid fine{4, 9, 1.0, 128};
  auto error = [&](const SpaceTimeGrid& g) {
    const auto sm = realize_sm(MeasureSpec{}, DyadicDomain{-8, 8, g.n_max}, 1);
    const auto ub = solve_mild(sm, coeffs, Mode::averaged(), g);
    const auto ue = solve_mild(sm, coeffs, Mode::fast(1.0 / 16), g);
    return sup_error(ue, ub, 2.0);
  };
  const double a = error(coarse);
  const double b = error(fine);
  EXPECT_LT(std::abs(a - b), 0.2 * b) << "coarse " << a << " fine " << b;
}

TEST(Trajectory, CsvRoundTripIsBitExact) {
  const auto sm = realize_sm(MeasureSpec{}, kSmallDomain, 12);
  auto u = solve_mild(sm, coefficients(TimeProfile::periodic_cos), Mode::fast(0.1), kSmall);
  std::stringstream buf;
  write_trajectory_csv(buf, u);
  const auto back = read_trajectory_csv(buf);
  EXPECT_EQ(back.grid, u.grid);
  EXPECT_EQ(back.values, u.values);
  EXPECT_EQ(back.iterations, u.iterations);
  EXPECT_EQ(back.residual, u.residual);
  EXPECT_EQ(back.eps, u.eps);
  EXPECT_EQ(back.label, u.label);
  std::stringstream bad("t,x,u\n");
  EXPECT_THROW(read_trajectory_csv(bad), std::runtime_error);
}
