#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "smavg/coefficients.hpp"
#include "smavg/kernel.hpp"
#include "smavg/stochastic_measure.hpp"

namespace smavg {

/// Uniform grid on [0, T] x [-R, R] with dx = 2^-n_max, so spatial nodes
/// coincide with dyadic endpoints of the driving measure.
struct SpaceTimeGrid {
  int radius = 4;
  int n_max = 8;
  double horizon = 1.0;
  std::size_t nt = 64;

  std::size_t nx() const { return static_cast<std::size_t>(2 * radius) << n_max; }
  std::size_t points() const { return nx() + 1; }
  double dx() const;
  double dt() const { return horizon / static_cast<double>(nt); }
  double x(std::size_t j) const;
  double t(std::size_t i) const { return horizon * static_cast<double>(i) / static_cast<double>(nt); }
  UniformLine line() const { return {-static_cast<double>(radius), dx(), points()}; }

  void validate() const;
  /// Same depth, and the measure domain covers [-R, R].
  bool aligned_with(const DyadicDomain& domain) const;

  bool operator==(const SpaceTimeGrid&) const = default;
};

/// Either the fast-oscillating coefficient sigma(t/eps, y) or its average.
struct Mode {
  std::optional<double> eps;

  static Mode averaged() { return {}; }
  static Mode fast(double eps);
  bool is_averaged() const { return !eps.has_value(); }
  std::string label() const;
};

/// Values on the (nt+1) x (nx+1) grid, row-major in time.
struct FieldTrajectory {
  SpaceTimeGrid grid;
  std::vector<double> values;
  std::string label;
  double eps = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double residual = 0.0;
  std::vector<double> increments;  ///< sup-norm Picard increments, one per iteration

  static FieldTrajectory zeros(const SpaceTimeGrid& grid);

  double at(std::size_t i, std::size_t j) const { return values[i * grid.points() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * grid.points() + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values).subspan(i * grid.points(), grid.points());
  }
  std::span<double> row(std::size_t i) {
    return std::span<double>(values).subspan(i * grid.points(), grid.points());
  }
};

/// K(t, d) = \int_0^t p(t - s, d) m(s/eps) ds for a product coefficient
/// m(s) a(y); with `centered` the mean m_bar is subtracted from m. The
/// averaged mode uses the closed form m_bar \int_0^t p(v, d) dv. The
/// oscillating part is integrated in u = sqrt(t - s), where
/// 2u p(u^2, d) = e^{-d^2/(4u^2)} / sqrt(pi) is bounded.
double noise_time_profile(const SigmaSpec& spec, Mode mode, double t, double d, double dx,
                          bool centered = false);

/// Centered noise integrand g(z, y) = \int_0^t p(t - s, x - y)(sigma(s/eps, y) - sigma_bar(y)) ds.
double centered_noise_integrand(const SigmaSpec& spec, double eps, double t, double x, double y, double dx);

/// K(t_i, |x_j - y_k|) tabulated for every time row and lattice lag. Every
/// grid node sees the measure atoms at whole-step offsets, so one table
/// serves all nodes and all realizations sharing (spec, mode, grid, domain).
class NoiseKernelTable {
 public:
  NoiseKernelTable(const SigmaSpec& spec, Mode mode, const SpaceTimeGrid& grid,
                   const DyadicDomain& sm_domain, bool centered = false, std::size_t jobs = 1);

  const SpaceTimeGrid& grid() const { return grid_; }
  const DyadicDomain& sm_domain() const { return domain_; }
  Mode mode() const { return mode_; }
  std::size_t max_lag() const { return max_lag_; }
  double at(std::size_t time_index, std::size_t lag) const {
    return table_[time_index * (max_lag_ + 1) + lag];
  }

  /// \int g(z, .) dmu at every node: sum_k a(y_k) K(t, x - y_k) mu(atom_k).
  FieldTrajectory apply(const SMRealization& sm) const;

 private:
  SigmaSpec spec_;
  Mode mode_;
  SpaceTimeGrid grid_;
  DyadicDomain domain_;
  bool centered_;
  std::ptrdiff_t offset_;  // lag of (x_0, y_0) in steps
  std::size_t max_lag_;
  std::vector<double> table_;
};

/// Third term of the mild equation for one realization.
FieldTrajectory noise_term(const SMRealization& sm, const SigmaSpec& spec, Mode mode,
                           const SpaceTimeGrid& grid);

/// xi_eps = noise_term(eps) - noise_term(averaged), built in one pass from
/// the centered coefficient sigma(s/eps, y) - sigma_bar(y).
FieldTrajectory xi_epsilon(const SMRealization& sm, const SigmaSpec& spec, double eps,
                           const SpaceTimeGrid& grid);

struct PicardOptions {
  double tol = 1e-8;
  std::size_t max_iter = 50;
};

class PicardDivergence : public std::runtime_error {
 public:
  PicardDivergence(const std::string& what, std::size_t iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
  std::size_t iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

/// Picard iteration for
///   u(t) = P_t u0 + \int_0^t P_{t-s} f(., u(s)) ds + noise(t).
/// The drift integral uses the trapezoid rule in time, accumulated with the
/// exact semigroup recursion
///   D_{i+1} = P_dt (D_i + dt/2 F_i) + dt/2 F_{i+1},
/// which reproduces the composite trapezoid sum over all earlier rows.
class MildSolver {
 public:
  MildSolver(CoefficientSet coeffs, SpaceTimeGrid grid, double truncation_sd = kDefaultTruncationSd);

  const SpaceTimeGrid& grid() const { return grid_; }
  const CoefficientSet& coefficients() const { return coeffs_; }

  /// P_t u0 on the grid; u0 is sampled on a line wide enough that no
  /// boundary extension enters.
  const FieldTrajectory& initial_term() const { return initial_; }

  /// Discrete \int_0^t P_{t-s} F(s) ds for a forcing field F.
  FieldTrajectory drift_integral(const FieldTrajectory& forcing) const;

  /// Iterates from u^0 = P_t u0 + noise until the sup-norm increment drops
  /// below tol. Throws PicardDivergence on non-convergence or non-finite values.
  FieldTrajectory solve(const FieldTrajectory& noise, const PicardOptions& options = {}) const;

 private:
  CoefficientSet coeffs_;
  SpaceTimeGrid grid_;
  ConvolutionStencil step_stencil_;
  FieldTrajectory initial_;
};

FieldTrajectory solve_mild(const SMRealization& sm, const CoefficientSet& coeffs, Mode mode,
                           const SpaceTimeGrid& grid, const PicardOptions& options = {});

/// max |u_eps - u_bar| over nodes with |x| <= R - margin.
double sup_error(const FieldTrajectory& u_eps, const FieldTrajectory& u_bar, double margin = 0.0);

/// sup_x |a(t_i, x) - b(t_i, x)| for every time row, over |x| <= R - margin.
std::vector<double> row_sup_difference(const FieldTrajectory& a, const FieldTrajectory& b,
                                       double margin = 0.0);

/// CSV: one '#' metadata line, a "t,x,u" header, then one row per node.
void write_trajectory_csv(std::ostream& out, const FieldTrajectory& traj);
FieldTrajectory read_trajectory_csv(std::istream& in);

}  // namespace smavg
