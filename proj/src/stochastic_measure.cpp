#include "smavg/stochastic_measure.hpp"

#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "smavg/support.hpp"

namespace smavg {

namespace {

constexpr int kMaxDepth = 40;

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t tag, std::uint64_t level) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(level)};
  return std::mt19937_64(seq);
}

// Finest-unit offset of an absolute grid coordinate, relative to j_min.
std::int64_t to_finest(const DyadicDomain& d, int level, std::int64_t coord) {
  if (level > d.n_max) {
    throw std::invalid_argument("grid interval level " + std::to_string(level) +
                                " is finer than the realization depth " +
                                std::to_string(d.n_max));
  }
  if (level < 0) throw std::invalid_argument("grid interval level must be non-negative");
  const std::int64_t shifted = coord - (static_cast<std::int64_t>(d.j_min) << level);
  return shifted << (d.n_max - level);
}

struct FinestRange {
  std::int64_t begin;
  std::int64_t end;
};

FinestRange finest_range(const DyadicDomain& d, const GridInterval& iv) {
  if (iv.hi < iv.lo) throw std::invalid_argument("grid interval has hi < lo");
  FinestRange r{to_finest(d, iv.level, iv.lo), to_finest(d, iv.level, iv.hi)};
  const auto total = static_cast<std::int64_t>(d.atom_count());
  if (r.begin < 0 || r.end > total) {
    throw std::invalid_argument("grid interval lies outside the realized domain");
  }
  return r;
}

// Tree sum over level-`level` node `index` restricted to finest range r.
double tree_sum(const SMRealization& sm, int level, std::int64_t index, FinestRange r) {
  const int shift = sm.domain().n_max - level;
  const std::int64_t a = index << shift;
  const std::int64_t b = (index + 1) << shift;
  if (b <= r.begin || a >= r.end) return 0.0;
  if (a >= r.begin && b <= r.end) return sm.level_values(level)[static_cast<std::size_t>(index)];
  return tree_sum(sm, level + 1, 2 * index, r) + tree_sum(sm, level + 1, 2 * index + 1, r);
}

std::vector<double> sample_wiener(const MeasureSpec& spec, const DyadicDomain& d,
                                  std::uint64_t seed) {
  std::vector<double> current(d.unit_count());
  {
    auto rng = stream_for(seed, 1, 0);
    std::normal_distribution<double> normal;
    for (std::size_t u = 0; u < current.size(); ++u) {
      const int j = d.j_min + static_cast<int>(u);
      const double var = spec.weight.integral_pow(j, j + 1, 2.0);
      current[u] = std::sqrt(std::max(var, 0.0)) * normal(rng);
    }
  }
  for (int n = 1; n <= d.n_max; ++n) {
    auto rng = stream_for(seed, 1, static_cast<std::uint64_t>(n));
    std::normal_distribution<double> normal;
    const double h = std::ldexp(1.0, -n);
    std::vector<double> next(current.size() * 2);
    for (std::size_t p = 0; p < current.size(); ++p) {
      const double a = d.j_min + static_cast<double>(2 * p) * h;
      const double v1 = std::max(spec.weight.integral_pow(a, a + h, 2.0), 0.0);
      const double v2 = std::max(spec.weight.integral_pow(a + h, a + 2 * h, 2.0), 0.0);
      const double z = normal(rng);
      const double total = v1 + v2;
      double left = 0.0;
      if (total > 0.0) {
        left = current[p] * (v1 / total) + std::sqrt(v1 * v2 / total) * z;
      }
      next[2 * p] = left;
      next[2 * p + 1] = current[p] - left;
    }
    current = std::move(next);
  }
  return current;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Davies-Harte circulant embedding of fractional Gaussian noise with step h.
std::vector<double> sample_fgn(std::size_t n, double hurst, double h, std::mt19937_64& rng) {
  const std::size_t m = 2 * n;
  auto autocov = [hurst](double k) {
    const double e = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(k + 1.0), e) - 2.0 * std::pow(std::abs(k), e) +
                  std::pow(std::abs(k - 1.0), e));
  };
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * m));
  if (buf == nullptr) throw std::bad_alloc();
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(m), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  for (std::size_t k = 0; k < m; ++k) {
    const double lag = static_cast<double>(k <= n ? k : m - k);
    buf[k][0] = autocov(lag);
    buf[k][1] = 0.0;
  }
  fftw_execute(plan);
  std::vector<double> eig(m);
  double max_eig = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    eig[k] = buf[k][0];
    max_eig = std::max(max_eig, std::abs(eig[k]));
  }
  for (auto& e : eig) {
    if (e < -1e-10 * max_eig) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
      fftw_free(buf);
      throw std::runtime_error("circulant embedding is not non-negative definite");
    }
    e = std::max(e, 0.0);
  }
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < m; ++k) {
    const double s = std::sqrt(eig[k] / static_cast<double>(m));
    buf[k][0] = s * normal(rng);
    buf[k][1] = s * normal(rng);
  }
  fftw_execute(plan);
  const double scale = std::pow(h, hurst);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = scale * buf[k][0];
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

std::vector<double> sample_fbm_weighted(const MeasureSpec& spec, const DyadicDomain& d,
                                        std::uint64_t seed) {
  const std::size_t n = d.atom_count();
  if (spec.weight.shape == Weight::Shape::zero || spec.weight.scale == 0.0) {
    return std::vector<double>(n, 0.0);
  }
  auto rng = stream_for(seed, 2, 0);
  auto fgn = sample_fgn(n, spec.hurst, d.atom_length(), rng);
  for (std::size_t k = 0; k < n; ++k) fgn[k] *= spec.weight(d.atom_left(k));
  return fgn;
}

// Chambers-Mallows-Stuck, symmetric case.
double standard_symmetric_stable(double alpha, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-std::numbers::pi / 2, std::numbers::pi / 2);
  std::exponential_distribution<double> expo(1.0);
  const double v = angle(rng);
  const double w = expo(rng);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

std::vector<double> sample_alpha_stable(const MeasureSpec& spec, const DyadicDomain& d,
                                        std::uint64_t seed) {
  const std::size_t n = d.atom_count();
  std::vector<double> out(n, 0.0);
  auto rng = stream_for(seed, 3, 0);
  const double h = d.atom_length();
  for (std::size_t k = 0; k < n; ++k) {
    const double a = d.atom_left(k);
    const double x = standard_symmetric_stable(spec.alpha, rng);
    const double mass = spec.weight.integral_pow(a, a + h, spec.alpha);
    out[k] = mass > 0.0 ? std::pow(mass, 1.0 / spec.alpha) * x : 0.0;
  }
  return out;
}

std::vector<double> sample_pure_jump(const MeasureSpec& spec, const DyadicDomain& d,
                                     std::uint64_t seed) {
  const std::size_t n = d.atom_count();
  std::vector<double> out(n, 0.0);
  auto rng = stream_for(seed, 4, 0);
  const double h = d.atom_length();
  const double lambda = spec.jump_intensity;
  std::poisson_distribution<long long> poisson(lambda * h);
  const double sign = spec.weight.scale < 0.0 ? -1.0 : 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = d.atom_left(k);
    const auto count = static_cast<double>(poisson(rng));
    const double eff = sign * std::sqrt(std::max(spec.weight.integral_pow(a, a + h, 2.0), 0.0) / h);
    out[k] = eff * (count - lambda * h) / std::sqrt(lambda);
  }
  return out;
}

}  // namespace

double GridInterval::left() const { return std::ldexp(static_cast<double>(lo), -level); }
double GridInterval::right() const { return std::ldexp(static_cast<double>(hi), -level); }

GridInterval dyadic_atom(int j, std::int64_t k, int n) {
  if (n < 0 || n > kMaxDepth) throw std::invalid_argument("dyadic level out of range");
  if (k < 1 || k > (std::int64_t{1} << n)) throw std::invalid_argument("dyadic index out of range");
  const std::int64_t base = static_cast<std::int64_t>(j) << n;
  return {n, base + k - 1, base + k};
}

GridInterval unit_interval(int j) { return {0, j, static_cast<std::int64_t>(j) + 1}; }

double DyadicDomain::atom_length() const { return std::ldexp(1.0, -n_max); }

double DyadicDomain::endpoint(int j, std::int64_t k, int n) const {
  return static_cast<double>(j) + std::ldexp(static_cast<double>(k), -n);
}

double DyadicDomain::atom_left(std::size_t atom) const {
  return static_cast<double>(j_min) + std::ldexp(static_cast<double>(atom), -n_max);
}

void DyadicDomain::validate(std::size_t atom_budget) const {
  if (j_min >= j_max) throw std::invalid_argument("dyadic domain needs j_min < j_max");
  if (n_max < 1) throw std::invalid_argument("dyadic domain needs n_max >= 1");
  if (n_max > kMaxDepth) throw std::invalid_argument("dyadic depth exceeds the supported maximum");
  const std::size_t units = unit_count();
  if (units > (atom_budget >> n_max)) {
    throw std::invalid_argument("atom count " + std::to_string(units) + " x 2^" +
                                std::to_string(n_max) + " exceeds the atom budget of " +
                                std::to_string(atom_budget));
  }
}

double Weight::operator()(double y) const {
  switch (shape) {
    case Shape::zero: return 0.0;
    case Shape::constant: return scale;
    case Shape::gaussian: return scale * std::exp(-rate * y * y);
  }
  return 0.0;
}

double Weight::integral_pow(double a, double b, double p) const {
  if (b <= a) return 0.0;
  switch (shape) {
    case Shape::zero: return 0.0;
    case Shape::constant: return std::pow(std::abs(scale), p) * (b - a);
    case Shape::gaussian: {
      // \int_a^b |c|^p e^{-k y^2} dy with k = p b, using erfc on the tails
      // so that far-out atoms keep relative accuracy.
      const double k = p * rate;
      const double s = std::sqrt(k);
      const double pref = std::pow(std::abs(scale), p) * std::sqrt(std::numbers::pi / k) / 2.0;
      if (a >= 0.0) return pref * (std::erfc(s * a) - std::erfc(s * b));
      if (b <= 0.0) return pref * (std::erfc(-s * b) - std::erfc(-s * a));
      return pref * (std::erf(s * b) - std::erf(s * a));
    }
  }
  return 0.0;
}

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::wiener: return "wiener";
    case MeasureKind::fbm_weighted: return "fbm_weighted";
    case MeasureKind::alpha_stable: return "alpha_stable";
    case MeasureKind::pure_jump_martingale: return "pure_jump_martingale";
  }
  return "unknown";
}

MeasureKind measure_kind_from_string(const std::string& name) {
  static const std::map<std::string, MeasureKind> table{
      {"wiener", MeasureKind::wiener},
      {"fbm_weighted", MeasureKind::fbm_weighted},
      {"alpha_stable", MeasureKind::alpha_stable},
      {"pure_jump_martingale", MeasureKind::pure_jump_martingale}};
  auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown measure kind '" + name + "'");
  return it->second;
}

std::string to_string(Weight::Shape shape) {
  switch (shape) {
    case Weight::Shape::zero: return "zero";
    case Weight::Shape::constant: return "constant";
    case Weight::Shape::gaussian: return "gaussian";
  }
  return "unknown";
}

Weight::Shape weight_shape_from_string(const std::string& name) {
  if (name == "zero") return Weight::Shape::zero;
  if (name == "constant") return Weight::Shape::constant;
  if (name == "gaussian") return Weight::Shape::gaussian;
  throw std::invalid_argument("unknown weight shape '" + name + "'");
}

void MeasureSpec::validate() const {
  if (!std::isfinite(weight.scale) || !std::isfinite(weight.rate)) {
    throw std::invalid_argument("weight parameters must be finite");
  }
  if (weight.shape == Weight::Shape::gaussian && weight.rate <= 0.0) {
    throw std::invalid_argument("gaussian weight needs a positive rate");
  }
  switch (kind) {
    case MeasureKind::wiener: break;
    case MeasureKind::fbm_weighted:
      if (!(hurst > 0.5 && hurst < 1.0)) {
        throw std::invalid_argument("fbm_weighted needs a Hurst index in (1/2, 1)");
      }
      // |g(y)| <= C e^{-y^2} keeps |y|^tau integrable on the whole line.
      if (weight.shape == Weight::Shape::constant && weight.scale != 0.0) {
        throw std::invalid_argument("fbm_weighted needs a weight bounded by C exp(-y^2)");
      }
      if (weight.shape == Weight::Shape::gaussian && weight.rate < 1.0) {
        throw std::invalid_argument("fbm_weighted needs a gaussian weight with rate >= 1");
      }
      break;
    case MeasureKind::alpha_stable:
      if (!(alpha > 1.0 && alpha < 2.0)) {
        throw std::invalid_argument("alpha_stable needs a stability index in (1, 2)");
      }
      break;
    case MeasureKind::pure_jump_martingale:
      if (!(jump_intensity > 0.0) || !std::isfinite(jump_intensity)) {
        throw std::invalid_argument("pure_jump_martingale needs a positive jump intensity");
      }
      break;
  }
}

SMRealization::SMRealization(MeasureSpec spec, DyadicDomain domain, std::uint64_t seed,
                             std::vector<double> atom_values)
    : spec_(spec), domain_(domain), seed_(seed) {
  domain_.validate(std::numeric_limits<std::size_t>::max());
  if (atom_values.size() != domain_.atom_count()) {
    throw std::invalid_argument("atom value count does not match the dyadic domain");
  }
  levels_.resize(static_cast<std::size_t>(domain_.n_max) + 1);
  levels_.back() = std::move(atom_values);
  for (int n = domain_.n_max - 1; n >= 0; --n) {
    const auto& child = levels_[static_cast<std::size_t>(n) + 1];
    auto& parent = levels_[static_cast<std::size_t>(n)];
    parent.resize(child.size() / 2);
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = child[2 * i] + child[2 * i + 1];
  }
}

std::span<const double> SMRealization::level_values(int level) const {
  if (level < 0 || level > domain_.n_max) throw std::out_of_range("level outside realization depth");
  return levels_[static_cast<std::size_t>(level)];
}

std::uint64_t SMRealization::checksum() const {
  Fnv1a h;
  h.update(atom_values());
  return h.digest();
}

SMRealization realize_sm(const MeasureSpec& spec, const DyadicDomain& domain, std::uint64_t seed,
                         std::size_t atom_budget) {
  spec.validate();
  domain.validate(atom_budget);
  std::vector<double> atoms;
  switch (spec.kind) {
    case MeasureKind::wiener: atoms = sample_wiener(spec, domain, seed); break;
    case MeasureKind::fbm_weighted: atoms = sample_fbm_weighted(spec, domain, seed); break;
    case MeasureKind::alpha_stable: atoms = sample_alpha_stable(spec, domain, seed); break;
    case MeasureKind::pure_jump_martingale: atoms = sample_pure_jump(spec, domain, seed); break;
  }
  return SMRealization(spec, domain, seed, std::move(atoms));
}

double measure_of(const SMRealization& sm, const GridInterval& interval) {
  const auto& d = sm.domain();
  const FinestRange r = finest_range(d, interval);
  // Unit nodes are summed left to right; inside a partially covered unit the
  // pyramid is descended, so any single node comes back exactly as stored.
  const std::int64_t per_unit = std::int64_t{1} << d.n_max;
  double total = 0.0;
  for (std::int64_t u = r.begin / per_unit; u * per_unit < r.end; ++u) {
    total += tree_sum(sm, 0, u, r);
  }
  return total;
}

Integrand Integrand::indicator(GridInterval interval, double value) {
  return Integrand([value](double) { return value; }, interval);
}

double integrate_deterministic(const SMRealization& sm, const Integrand& g) {
  const auto& d = sm.domain();
  const auto atoms = sm.atom_values();
  FinestRange r{0, static_cast<std::int64_t>(atoms.size())};
  if (g.support) {
    const auto& s = *g.support;
    if (s.hi < s.lo) throw std::invalid_argument("integrand support has hi < lo");
    // Supports may extend past the domain; clip them.
    const auto clip = [&](std::int64_t coord) {
      const std::int64_t shifted = coord - (static_cast<std::int64_t>(d.j_min) << s.level);
      if (s.level > d.n_max) throw std::invalid_argument("integrand support finer than realization");
      return std::clamp<std::int64_t>(shifted << (d.n_max - s.level), 0,
                                      static_cast<std::int64_t>(atoms.size()));
    };
    r = {clip(s.lo), clip(s.hi)};
  }
  // Products are reduced pairwise in the same tree shape as the measure
  // pyramid, so an indicator reproduces measure_of bit for bit.
  std::vector<double> level(atoms.size(), 0.0);
  for (std::int64_t k = r.begin; k < r.end; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double v = g.fn(d.atom_left(i));
    if (!std::isfinite(v)) {
      throw std::domain_error("integrand is not finite at y = " + std::to_string(d.atom_left(i)));
    }
    level[i] = v * atoms[i];
  }
  for (int n = d.n_max; n > 0; --n) {
    std::vector<double> parent(level.size() / 2);
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = level[2 * i] + level[2 * i + 1];
    level = std::move(parent);
  }
  double total = 0.0;
  for (double v : level) total += v;
  return total;
}

IntegrandFamily weighted_unit_indicators(const DyadicDomain& domain, double rho) {
  std::vector<int> units;
  for (int j = domain.j_min; j < domain.j_max; ++j) units.push_back(j);
  std::stable_sort(units.begin(), units.end(), [](int a, int b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
    return a < b;
  });
  IntegrandFamily fam;
  fam.description = "(|j|+1)^{rho/2} 1_(j,j+1], rho = " + std::to_string(rho);
  for (int j : units) {
    fam.members.push_back(
        Integrand::indicator(unit_interval(j), std::pow(std::abs(j) + 1.0, rho / 2.0)));
  }
  return fam;
}

std::vector<double> squared_integral_series(const SMRealization& sm, const IntegrandFamily& fam,
                                            std::size_t max_terms) {
  const std::size_t count = std::min(max_terms, fam.members.size());
  std::vector<double> sums;
  sums.reserve(count);
  double acc = 0.0;
  for (std::size_t l = 0; l < count; ++l) {
    const double v = integrate_deterministic(sm, fam.members[l]);
    acc += v * v;
    sums.push_back(acc);
  }
  return sums;
}

bool series_stabilized(std::span<const double> partial_sums, double rel_tol, std::size_t window) {
  if (partial_sums.size() < window + 1) return false;
  for (std::size_t i = partial_sums.size() - window; i < partial_sums.size(); ++i) {
    const double diff = std::abs(partial_sums[i] - partial_sums[i - 1]);
    if (diff == 0.0) continue;
    if (!(diff < rel_tol * std::abs(partial_sums[i]))) return false;
  }
  return true;
}

TauIntegrabilityReport check_tau_integrability(const SMRealization& sm, double tau,
                                               std::span<const int> radii, double rel_tol) {
  if (!(tau > 2.5)) throw std::invalid_argument("tau must exceed 5/2");
  if (radii.size() < 2) throw std::invalid_argument("need at least two nested radii");
  const auto& d = sm.domain();
  TauIntegrabilityReport report;
  report.tau = tau;
  int previous = 0;
  for (int radius : radii) {
    if (radius <= previous) throw std::invalid_argument("radii must be positive and increasing");
    if (-radius < d.j_min || radius > d.j_max) {
      throw std::invalid_argument("radius " + std::to_string(radius) + " exceeds the realized domain");
    }
    previous = radius;
    report.radii.push_back(radius);
    report.partial_integrals.push_back(integrate_deterministic(
        sm, Integrand([tau](double y) { return std::pow(std::abs(y), tau); },
                      GridInterval{0, -radius, radius})));
  }
  const double last = report.partial_integrals.back();
  const double diff = std::abs(last - report.partial_integrals[report.partial_integrals.size() - 2]);
  report.last_relative_change = diff == 0.0 ? 0.0 : diff / std::abs(last);
  report.stabilized = diff == 0.0 || report.last_relative_change < rel_tol;
  return report;
}

TauIntegrabilityReport check_tau_integrability(const MeasureSpec& spec, double tau,
                                               std::span<const int> radii, std::uint64_t seed,
                                               int n_max, double rel_tol) {
  if (radii.empty()) throw std::invalid_argument("need at least two nested radii");
  const int r_max = *std::max_element(radii.begin(), radii.end());
  const auto sm = realize_sm(spec, DyadicDomain{-r_max, r_max, n_max}, seed);
  return check_tau_integrability(sm, tau, radii, rel_tol);
}

namespace {

double parse_double(const std::string& token) {
  double v = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) throw std::runtime_error("bad number '" + token + "'");
  return v;
}

std::string expect_key(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("realization file truncated before '" + key + "'");
  std::istringstream ls(line);
  std::string k;
  ls >> k;
  if (k != key) throw std::runtime_error("expected '" + key + "' but found '" + k + "'");
  std::string rest;
  std::getline(ls >> std::ws, rest);
  return rest;
}

}  // namespace

void write_realization(std::ostream& out, const SMRealization& sm) {
  const auto& s = sm.spec();
  const auto& d = sm.domain();
  out << "smrealization 1\n";
  out << "kind " << to_string(s.kind) << '\n';
  out << "weight " << to_string(s.weight.shape) << ' ' << format_g17(s.weight.scale) << ' '
      << format_g17(s.weight.rate) << '\n';
  out << "hurst " << format_g17(s.hurst) << '\n';
  out << "alpha " << format_g17(s.alpha) << '\n';
  out << "jump_intensity " << format_g17(s.jump_intensity) << '\n';
  out << "domain " << d.j_min << ' ' << d.j_max << ' ' << d.n_max << '\n';
  out << "seed " << sm.seed() << '\n';
  out << "atoms " << sm.atom_values().size() << '\n';
  for (double v : sm.atom_values()) out << format_g17(v) << '\n';
}

SMRealization read_realization(std::istream& in) {
  if (expect_key(in, "smrealization") != "1") throw std::runtime_error("unsupported realization version");
  MeasureSpec spec;
  spec.kind = measure_kind_from_string(expect_key(in, "kind"));
  {
    std::istringstream ws(expect_key(in, "weight"));
    std::string shape, scale, rate;
    ws >> shape >> scale >> rate;
    spec.weight = Weight{weight_shape_from_string(shape), parse_double(scale), parse_double(rate)};
  }
  spec.hurst = parse_double(expect_key(in, "hurst"));
  spec.alpha = parse_double(expect_key(in, "alpha"));
  spec.jump_intensity = parse_double(expect_key(in, "jump_intensity"));
  DyadicDomain d;
  {
    std::istringstream ds(expect_key(in, "domain"));
    if (!(ds >> d.j_min >> d.j_max >> d.n_max)) throw std::runtime_error("bad domain line");
  }
  const std::uint64_t seed = std::stoull(expect_key(in, "seed"));
  const std::size_t count = std::stoull(expect_key(in, "atoms"));
  if (count != d.atom_count()) throw std::runtime_error("atom count does not match domain");
  std::vector<double> atoms(count);
  std::string line;
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("realization file truncated in atoms");
    atoms[i] = parse_double(line);
  }
  return SMRealization(spec, d, seed, std::move(atoms));
}

}  // namespace smavg
