#include "smavg/besov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smavg {

namespace {

// Depth N with step == 2^-N on a unit interval, or -1.
int dyadic_depth(const SampledFunction& q) {
  if (std::abs(q.hi - q.lo - 1.0) > 1e-12) return -1;
  const std::size_t n = q.intervals();
  if (n == 0 || (n & (n - 1)) != 0) return -1;
  int depth = 0;
  while ((std::size_t{1} << depth) < n) ++depth;
  return depth;
}

}  // namespace

SampledFunction SampledFunction::sample(const std::function<double(double)>& fn, double lo, double hi,
                                        double step) {
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("sampling needs step > 0 and hi > lo");
  const double count = (hi - lo) / step;
  const double rounded = std::round(count);
  if (std::abs(count - rounded) > 1e-9 * std::max(1.0, rounded)) {
    throw std::invalid_argument("interval width is not a whole number of steps");
  }
  SampledFunction g{lo, hi, step, {}};
  const auto n = static_cast<std::size_t>(rounded);
  g.values.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g.values[i] = fn(lo + static_cast<double>(i) * step);
  g.validate();
  return g;
}

void SampledFunction::validate() const {
  if (!(step > 0.0) || !(hi > lo)) throw std::invalid_argument("sampled function has a degenerate interval");
  if (values.size() < 2) throw std::invalid_argument("sampled function needs at least two samples");
  const double expected = (hi - lo) / step;
  if (std::abs(expected - static_cast<double>(intervals())) > 1e-9 * std::max(1.0, expected)) {
    throw std::invalid_argument("sample count does not match the interval and step");
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("sampled function has a non-finite value");
  }
}

std::vector<double> shift_norms(const SampledFunction& g) {
  g.validate();
  const std::size_t n = g.intervals();
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t m = 1; m <= n; ++m) {
    double acc = 0.0;
    for (std::size_t i = 0; i + m <= n; ++i) {
      const double diff = g.values[i + m] - g.values[i];
      acc += diff * diff;
    }
    out[m] = std::sqrt(acc * g.step);
  }
  return out;
}

double w2_modulus(const SampledFunction& g, double r) {
  const double width = g.hi - g.lo;
  if (!(r >= 0.0) || r > width * (1.0 + 1e-12)) throw std::invalid_argument("w2 modulus needs 0 <= r <= d - c");
  const auto norms = shift_norms(g);
  const auto top = std::min(norms.size() - 1, static_cast<std::size_t>(std::floor(r / g.step + 1e-9)));
  return *std::max_element(norms.begin(), norms.begin() + static_cast<std::ptrdiff_t>(top) + 1);
}

BesovReport besov_norm(const SampledFunction& g, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("Besov exponent must lie in (0, 1)");
  const auto norms = shift_norms(g);
  BesovReport report;
  report.alpha = alpha;
  const std::size_t n = g.intervals();
  double sq = 0.5 * (g.values.front() * g.values.front() + g.values.back() * g.values.back());
  for (std::size_t i = 1; i < n; ++i) sq += g.values[i] * g.values[i];
  report.l2_part = std::sqrt(sq * g.step);
  double running = 0.0;
  double integral = 0.0;
  for (std::size_t m = 1; m < n; ++m) {
    running = std::max(running, norms[m]);
    const double a = static_cast<double>(m) * g.step;
    const double b = static_cast<double>(m + 1) * g.step;
    integral += running * running * (std::pow(a, -2.0 * alpha) - std::pow(b, -2.0 * alpha)) / (2.0 * alpha);
  }
  report.modulus_integral = integral;
  report.norm = report.l2_part + std::sqrt(integral);
  return report;
}

double dyadic_sum(const SampledFunction& q, double beta, int n_max) {
  if (!(beta > 0.0)) throw std::invalid_argument("dyadic sum needs beta > 0");
  if (n_max < 1) throw std::invalid_argument("dyadic sum needs n_max >= 1");
  q.validate();
  const int depth = dyadic_depth(q);
  if (depth < 0) throw std::invalid_argument("dyadic sum needs a unit interval sampled at a dyadic step");
  if (depth < n_max) throw std::invalid_argument("samples are coarser than the requested dyadic depth");
  double total = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const std::size_t stride = std::size_t{1} << (depth - n);
    double level = 0.0;
    for (std::size_t k = 1; k <= (std::size_t{1} << n); ++k) {
      const double diff = q.values[k * stride] - q.values[(k - 1) * stride];
      level += diff * diff;
    }
    total += std::exp2(static_cast<double>(n) * beta) * level;
  }
  return std::sqrt(total);
}

DyadicVersionResult dyadic_version_and_bound(const SampledFunction& q, const SMRealization& sm, int j, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("dyadic version bound needs beta > 0");
  q.validate();
  const auto& domain = sm.domain();
  const int depth = domain.n_max;
  if (dyadic_depth(q) != depth) throw std::invalid_argument("q and the measure have different dyadic depths");
  if (j < domain.j_min || j >= domain.j_max) throw std::invalid_argument("unit interval lies outside the measure domain");
  if (std::abs(q.lo - static_cast<double>(j)) > 1e-12) throw std::invalid_argument("q is not sampled on [j, j+1]");

  const auto unit = static_cast<std::size_t>(j - domain.j_min);
  auto mu = [&](int n, std::size_t k) {  // mu(Delta_kn), 1 <= k <= 2^n
    return sm.level_values(n)[(unit << n) + k - 1];
  };
  auto q_at = [&](int n, std::size_t k) {  // q(d_kn)
    return q.values[k << (depth - n)];
  };

  DyadicVersionResult r;
  const double total = mu(0, 1);
  double version = q_at(0, 0) * total;
  double previous = version;
  double measure_sq = 0.0;
  for (int n = 1; n <= depth; ++n) {
    double current = 0.0;
    double level_sq = 0.0;
    for (std::size_t k = 1; k <= (std::size_t{1} << n); ++k) {
      const double m = mu(n, k);
      current += q_at(n, k - 1) * m;
      level_sq += m * m;
    }
    version += current - previous;
    previous = current;
    measure_sq += std::exp2(-static_cast<double>(n) * beta) * level_sq;
  }
  r.eta_tilde = version;
  r.boundary_part = std::abs(q_at(0, 0) * total);
  r.dyadic_part = dyadic_sum(q, beta, depth);
  r.measure_part = std::sqrt(measure_sq);
  r.bound = r.boundary_part + r.dyadic_part * r.measure_part;
  r.holds = std::abs(r.eta_tilde) <= r.bound + kDyadicVersionSlack;
  return r;
}

}  // namespace smavg
