#include "smavg/mild_solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "smavg/support.hpp"

namespace smavg {

namespace {

// Below e^{-40} the Gaussian factor is dropped.
constexpr double kGaussianCutoff = 40.0;

// Simpson nodes in u = sqrt(t - s) for one time level, with the centered
// oscillating factor and the weights folded together. The step resolves the
// fast period (16 steps, never coarser than eps P / 16), the Gaussian
// transition near u ~ |d| / 2 for every lag d >= dx, and sqrt(t) / 64.
class RowQuadrature {
 public:
  RowQuadrature(const SigmaSpec& spec, double eps, double t, double dx) {
    const double top = std::sqrt(t);
    const double h_osc = eps * spec.period() / (16.0 * std::max(2.0 * top, 1.0));
    const double h_max = std::min({top / 64.0, h_osc, dx / 8.0});
    auto n = static_cast<std::size_t>(std::ceil(top / h_max));
    if (n % 2 != 0) ++n;
    h_ = top / static_cast<double>(n);
    const double mean = spec.time_mean();
    weighted_.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
      const double u = static_cast<double>(k) * h_;
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      weighted_[k] = w * h_ / 3.0 * (spec.time_factor((t - u * u) / eps) - mean) /
                     std::sqrt(std::numbers::pi);
    }
    t_ = t;
  }

  double evaluate(double d) const {
    if (d == 0.0) {
      double acc = 0.0;
      for (double w : weighted_) acc += w;
      return acc;
    }
    const double d2 = d * d;
    if (d2 / (4.0 * t_) > kGaussianCutoff) return 0.0;
    const auto first = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::abs(d) / (2.0 * std::sqrt(kGaussianCutoff) * h_)));
    double acc = 0.0;
    for (std::size_t k = first; k < weighted_.size(); ++k) {
      const double u = static_cast<double>(k) * h_;
      acc += weighted_[k] * std::exp(-d2 / (4.0 * u * u));
    }
    return acc;
  }

 private:
  double h_ = 0.0;
  double t_ = 0.0;
  std::vector<double> weighted_;
};

bool has_oscillating_part(const SigmaSpec& spec, Mode mode) {
  return !mode.is_averaged() && spec.profile != TimeProfile::time_constant;
}

void check_same_grid(const FieldTrajectory& a, const FieldTrajectory& b) {
  if (!(a.grid == b.grid) || a.values.size() != b.values.size()) {
    throw std::invalid_argument("trajectories live on different grids");
  }
}

double parse_double(std::string_view token) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::runtime_error("bad number '" + std::string(token) + "' in trajectory CSV");
  }
  return v;
}

}  // namespace

double SpaceTimeGrid::dx() const { return std::ldexp(1.0, -n_max); }

double SpaceTimeGrid::x(std::size_t j) const {
  return -static_cast<double>(radius) + std::ldexp(static_cast<double>(j), -n_max);
}

void SpaceTimeGrid::validate() const {
  if (radius < 1) throw std::invalid_argument("grid radius must be a positive integer");
  if (n_max < 1 || n_max > 20) throw std::invalid_argument("grid depth n_max must lie in [1, 20]");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be positive");
  if (nt < 2) throw std::invalid_argument("grid needs nt >= 2");
}

bool SpaceTimeGrid::aligned_with(const DyadicDomain& domain) const {
  return domain.n_max == n_max && domain.j_min <= -radius && domain.j_max >= radius;
}

Mode Mode::fast(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
  return Mode{eps};
}

std::string Mode::label() const { return eps ? "eps=" + format_g17(*eps) : "averaged"; }

FieldTrajectory FieldTrajectory::zeros(const SpaceTimeGrid& grid) {
  FieldTrajectory f;
  f.grid = grid;
  f.values.assign((grid.nt + 1) * grid.points(), 0.0);
  return f;
}

double noise_time_profile(const SigmaSpec& spec, Mode mode, double t, double d, double dx,
                          bool centered) {
  if (t < 0.0) throw std::invalid_argument("noise profile needs t >= 0");
  if (t == 0.0) return 0.0;
  double value = centered ? 0.0 : spec.time_mean() * heat_kernel_time_integral(t, d);
  if (has_oscillating_part(spec, mode)) value += RowQuadrature(spec, *mode.eps, t, dx).evaluate(d);
  return value;
}

double centered_noise_integrand(const SigmaSpec& spec, double eps, double t, double x, double y, double dx) {
  return spec.amplitude_at(y) * noise_time_profile(spec, Mode::fast(eps), t, x - y, dx, true);
}

NoiseKernelTable::NoiseKernelTable(const SigmaSpec& spec, Mode mode, const SpaceTimeGrid& grid,
                                   const DyadicDomain& sm_domain, bool centered, std::size_t jobs)
    : spec_(spec), mode_(mode), grid_(grid), domain_(sm_domain), centered_(centered) {
  grid_.validate();
  if (!grid_.aligned_with(domain_)) {
    throw std::invalid_argument("space-time grid is not aligned with the measure's dyadic domain");
  }
  offset_ = static_cast<std::ptrdiff_t>(-grid_.radius - domain_.j_min) << grid_.n_max;
  const auto atoms = static_cast<std::ptrdiff_t>(domain_.atom_count());
  max_lag_ = static_cast<std::size_t>(
      std::max(atoms - 1 - offset_, static_cast<std::ptrdiff_t>(grid_.nx()) + offset_));
  const std::size_t width = max_lag_ + 1;
  table_.assign((grid_.nt + 1) * width, 0.0);
  const double dx = grid_.dx();
  const bool oscillating = has_oscillating_part(spec_, mode_);
  parallel_for(grid_.nt, jobs, [&](std::size_t row) {
    const std::size_t i = row + 1;
    const double t = grid_.t(i);
    double* out = table_.data() + i * width;
    if (!centered_) {
      const double mean = spec_.time_mean();
      for (std::size_t lag = 0; lag < width; ++lag) {
        out[lag] = mean * heat_kernel_time_integral(t, static_cast<double>(lag) * dx);
      }
    }
    if (oscillating) {
      const RowQuadrature quad(spec_, *mode_.eps, t, dx);
      for (std::size_t lag = 0; lag < width; ++lag) out[lag] += quad.evaluate(static_cast<double>(lag) * dx);
    }
  });
}

FieldTrajectory NoiseKernelTable::apply(const SMRealization& sm) const {
  if (!(sm.domain() == domain_)) throw std::invalid_argument("realization domain differs from the table's");
  const auto atoms = sm.atom_values();
  const std::size_t n = atoms.size();
  // Reversed weighted atoms make each node's sum a forward dot product
  // against the symmetric kernel row.
  std::vector<double> reversed(n);
  for (std::size_t k = 0; k < n; ++k) {
    reversed[n - 1 - k] = spec_.amplitude_at(domain_.atom_left(k)) * atoms[k];
  }
  FieldTrajectory out = FieldTrajectory::zeros(grid_);
  out.label = "noise " + mode_.label();
  if (mode_.eps) out.eps = *mode_.eps;
  out.seed = sm.seed();
  const std::size_t width = max_lag_ + 1;
  std::vector<double> sym(2 * max_lag_ + 1);
  for (std::size_t i = 1; i <= grid_.nt; ++i) {
    const double* k_row = table_.data() + i * width;
    for (std::size_t lag = 0; lag <= max_lag_; ++lag) {
      sym[max_lag_ + lag] = k_row[lag];
      sym[max_lag_ - lag] = k_row[lag];
    }
    auto dst = out.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) {
      const auto base = static_cast<std::ptrdiff_t>(max_lag_) + static_cast<std::ptrdiff_t>(j) +
                        offset_ - static_cast<std::ptrdiff_t>(n - 1);
      const double* kk = sym.data() + base;
      const double* c = reversed.data();
      double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
      std::size_t k = 0;
      for (; k + 4 <= n; k += 4) {
        a0 += c[k] * kk[k];
        a1 += c[k + 1] * kk[k + 1];
        a2 += c[k + 2] * kk[k + 2];
        a3 += c[k + 3] * kk[k + 3];
      }
      for (; k < n; ++k) a0 += c[k] * kk[k];
      dst[j] = (a0 + a1) + (a2 + a3);
    }
  }
  return out;
}

FieldTrajectory noise_term(const SMRealization& sm, const SigmaSpec& spec, Mode mode,
                           const SpaceTimeGrid& grid) {
  return NoiseKernelTable(spec, mode, grid, sm.domain()).apply(sm);
}

FieldTrajectory xi_epsilon(const SMRealization& sm, const SigmaSpec& spec, double eps,
                           const SpaceTimeGrid& grid) {
  auto xi = NoiseKernelTable(spec, Mode::fast(eps), grid, sm.domain(), true).apply(sm);
  xi.label = "xi eps=" + format_g17(eps);
  return xi;
}

MildSolver::MildSolver(CoefficientSet coeffs, SpaceTimeGrid grid, double truncation_sd)
    : coeffs_(coeffs), grid_(grid), step_stencil_((grid.validate(), grid.dt()), grid.dx(), truncation_sd) {
  initial_ = FieldTrajectory::zeros(grid_);
  initial_.label = "initial term";
  const UniformLine target = grid_.line();
  // u0 is known in closed form, so sample it past the kernel reach.
  const auto pad = static_cast<std::size_t>(std::ceil(truncation_sd * std::sqrt(2.0 * grid_.horizon) / grid_.dx())) + 1;
  const UniformLine source{target.origin - static_cast<double>(pad) * target.step, target.step,
                           target.count + 2 * pad};
  std::vector<double> u0(source.count);
  for (std::size_t k = 0; k < source.count; ++k) u0[k] = coeffs_.u0(source.at(k));
  auto row0 = initial_.row(0);
  for (std::size_t j = 0; j < target.count; ++j) row0[j] = u0[pad + j];
  for (std::size_t i = 1; i <= grid_.nt; ++i) {
    const auto r = kernel_convolve(u0, source, grid_.t(i), target, truncation_sd);
    std::copy(r.begin(), r.end(), initial_.row(i).begin());
  }
}

FieldTrajectory MildSolver::drift_integral(const FieldTrajectory& forcing) const {
  if (!(forcing.grid == grid_)) throw std::invalid_argument("forcing lives on a different grid");
  FieldTrajectory d = FieldTrajectory::zeros(grid_);
  const double half = 0.5 * grid_.dt();
  std::vector<double> staged(grid_.points());
  for (std::size_t i = 0; i < grid_.nt; ++i) {
    const auto prev = d.row(i);
    const auto f_now = forcing.row(i);
    for (std::size_t j = 0; j < staged.size(); ++j) staged[j] = prev[j] + half * f_now[j];
    auto next = d.row(i + 1);
    step_stencil_.apply(staged, 0, next);
    const auto f_next = forcing.row(i + 1);
    for (std::size_t j = 0; j < next.size(); ++j) next[j] += half * f_next[j];
  }
  return d;
}

FieldTrajectory MildSolver::solve(const FieldTrajectory& noise, const PicardOptions& options) const {
  if (!(noise.grid == grid_)) throw std::invalid_argument("noise field lives on a different grid");
  if (options.max_iter < 1 || !(options.tol > 0.0)) throw std::invalid_argument("bad Picard options");
  FieldTrajectory u = FieldTrajectory::zeros(grid_);
  for (std::size_t n = 0; n < u.values.size(); ++n) u.values[n] = initial_.values[n] + noise.values[n];
  FieldTrajectory forcing = FieldTrajectory::zeros(grid_);
  std::vector<double> increments;
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    for (std::size_t i = 0; i <= grid_.nt; ++i) {
      const auto ur = u.row(i);
      auto fr = forcing.row(i);
      for (std::size_t j = 0; j < fr.size(); ++j) fr[j] = coeffs_.f(grid_.x(j), ur[j]);
    }
    const FieldTrajectory drift = drift_integral(forcing);
    residual = 0.0;
    for (std::size_t n = 0; n < u.values.size(); ++n) {
      const double next = (initial_.values[n] + drift.values[n]) + noise.values[n];
      if (!std::isfinite(next)) {
        throw PicardDivergence("Picard iterate became non-finite at iteration " + std::to_string(iter),
                               iter, residual);
      }
      residual = std::max(residual, std::abs(next - u.values[n]));
      u.values[n] = next;
    }
    increments.push_back(residual);
    if (residual < options.tol) {
      u.iterations = iter;
      u.residual = residual;
      u.increments = std::move(increments);
      u.eps = noise.eps;
      u.seed = noise.seed;
      u.label = std::isnan(noise.eps) ? "averaged" : "eps=" + format_g17(noise.eps);
      return u;
    }
  }
  throw PicardDivergence("Picard iteration did not reach tol " + format_g17(options.tol) + " in " +
                             std::to_string(options.max_iter) + " iterations (last increment " +
                             format_g17(residual) + ")",
                         options.max_iter, residual);
}

FieldTrajectory solve_mild(const SMRealization& sm, const CoefficientSet& coeffs, Mode mode,
                           const SpaceTimeGrid& grid, const PicardOptions& options) {
  const MildSolver solver(coeffs, grid);
  return solver.solve(noise_term(sm, coeffs.sigma, mode, grid), options);
}

std::vector<double> row_sup_difference(const FieldTrajectory& a, const FieldTrajectory& b, double margin) {
  check_same_grid(a, b);
  const auto& g = a.grid;
  const double limit = static_cast<double>(g.radius) - margin;
  std::vector<double> out(g.nt + 1, 0.0);
  for (std::size_t i = 0; i <= g.nt; ++i) {
    const auto ra = a.row(i);
    const auto rb = b.row(i);
    for (std::size_t j = 0; j < ra.size(); ++j) {
      if (std::abs(g.x(j)) > limit) continue;
      out[i] = std::max(out[i], std::abs(ra[j] - rb[j]));
    }
  }
  return out;
}

double sup_error(const FieldTrajectory& u_eps, const FieldTrajectory& u_bar, double margin) {
  const auto rows = row_sup_difference(u_eps, u_bar, margin);
  return *std::max_element(rows.begin(), rows.end());
}

void write_trajectory_csv(std::ostream& out, const FieldTrajectory& traj) {
  const auto& g = traj.grid;
  out << "# label=" << traj.label << ";eps=" << format_g17(traj.eps) << ";seed=" << traj.seed
      << ";iterations=" << traj.iterations << ";residual=" << format_g17(traj.residual)
      << ";radius=" << g.radius << ";n_max=" << g.n_max << ";horizon=" << format_g17(g.horizon)
      << ";nt=" << g.nt << '\n';
  out << "t,x,u\n";
  for (std::size_t i = 0; i <= g.nt; ++i) {
    for (std::size_t j = 0; j < g.points(); ++j) {
      out << format_g17(g.t(i)) << ',' << format_g17(g.x(j)) << ',' << format_g17(traj.at(i, j))
          << '\n';
    }
  }
}

FieldTrajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw std::runtime_error("trajectory CSV lacks its metadata line");
  }
  FieldTrajectory traj;
  std::istringstream meta(line.substr(2));
  std::string field;
  while (std::getline(meta, field, ';')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::runtime_error("bad metadata field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "label") traj.label = value;
    else if (key == "eps") traj.eps = parse_double(value);
    else if (key == "seed") traj.seed = std::stoull(value);
    else if (key == "iterations") traj.iterations = std::stoull(value);
    else if (key == "residual") traj.residual = parse_double(value);
    else if (key == "radius") traj.grid.radius = std::stoi(value);
    else if (key == "n_max") traj.grid.n_max = std::stoi(value);
    else if (key == "horizon") traj.grid.horizon = parse_double(value);
    else if (key == "nt") traj.grid.nt = std::stoull(value);
    else throw std::runtime_error("unknown metadata key '" + key + "'");
  }
  traj.grid.validate();
  if (!std::getline(in, line) || line != "t,x,u") throw std::runtime_error("trajectory CSV lacks its header");
  traj.values.assign((traj.grid.nt + 1) * traj.grid.points(), 0.0);
  for (double& v : traj.values) {
    if (!std::getline(in, line)) throw std::runtime_error("trajectory CSV truncated");
    const auto last = line.rfind(',');
    if (last == std::string::npos) throw std::runtime_error("bad trajectory row '" + line + "'");
    v = parse_double(std::string_view(line).substr(last + 1));
  }
  return traj;
}

}  // namespace smavg
