#include "smavg/coefficients.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "smavg/quadrature.hpp"

namespace smavg {

namespace {

const double kSqrt2 = std::sqrt(2.0);

double amplitude_sup_scan(const SigmaSpec& spec) {
  // a is even and negligible past |y| = 12.
  double best = 0.0;
  for (int i = 0; i <= 120000; ++i) best = std::max(best, std::abs(spec.amplitude_at(i * 1e-4)));
  return best * (1.0 + 1e-6);
}

}  // namespace

std::string to_string(TimeProfile profile) {
  switch (profile) {
    case TimeProfile::periodic_cos: return "periodic_cos";
    case TimeProfile::periodic_sin: return "periodic_sin";
    case TimeProfile::time_constant: return "time_constant";
    case TimeProfile::quasiperiodic: return "quasiperiodic";
    case TimeProfile::chirp: return "chirp";
  }
  return "unknown";
}

TimeProfile time_profile_from_string(const std::string& name) {
  for (auto p : {TimeProfile::periodic_cos, TimeProfile::periodic_sin, TimeProfile::time_constant,
                 TimeProfile::quasiperiodic, TimeProfile::chirp}) {
    if (to_string(p) == name) return p;
  }
  throw std::invalid_argument("unknown sigma profile '" + name + "'");
}

std::string to_string(Amplitude amplitude) {
  return amplitude == Amplitude::holder ? "holder" : "smooth";
}

Amplitude amplitude_from_string(const std::string& name) {
  if (name == "holder") return Amplitude::holder;
  if (name == "smooth") return Amplitude::smooth;
  throw std::invalid_argument("unknown sigma amplitude '" + name + "'");
}

SigmaSpec SigmaSpec::make(TimeProfile profile, Amplitude amplitude, double beta) {
  SigmaSpec s{profile, amplitude, beta};
  s.validate();
  return s;
}

void SigmaSpec::validate() const {
  if (!(beta > 0.5 && beta < 1.0)) {
    throw std::invalid_argument("sigma Holder exponent must lie in (1/2, 1)");
  }
}

double SigmaSpec::time_factor(double s) const {
  switch (profile) {
    case TimeProfile::periodic_cos: return 2.0 + std::cos(s);
    case TimeProfile::periodic_sin: return std::sin(s);
    case TimeProfile::time_constant: return 1.0;
    case TimeProfile::quasiperiodic: return std::sin(s) + std::sin(kSqrt2 * s);
    case TimeProfile::chirp: return std::cos(std::sqrt(s));
  }
  return 0.0;
}

double SigmaSpec::time_mean() const {
  switch (profile) {
    case TimeProfile::periodic_cos: return 2.0;
    case TimeProfile::time_constant: return 1.0;
    case TimeProfile::periodic_sin:
    case TimeProfile::quasiperiodic:
    case TimeProfile::chirp: return 0.0;
  }
  return 0.0;
}

double SigmaSpec::time_sup() const {
  switch (profile) {
    case TimeProfile::periodic_cos: return 3.0;
    case TimeProfile::quasiperiodic: return 2.0;
    default: return 1.0;
  }
}

double SigmaSpec::max_frequency() const {
  switch (profile) {
    case TimeProfile::quasiperiodic: return kSqrt2;
    case TimeProfile::time_constant: return 0.0;
    default: return 1.0;
  }
}

double SigmaSpec::period() const {
  switch (profile) {
    case TimeProfile::quasiperiodic: return 2.0 * std::numbers::pi / kSqrt2;
    default: return 2.0 * std::numbers::pi;
  }
}

bool SigmaSpec::periodic() const {
  return profile == TimeProfile::periodic_cos || profile == TimeProfile::periodic_sin ||
         profile == TimeProfile::time_constant;
}

double SigmaSpec::amplitude_at(double y) const {
  const double envelope = std::exp(-y * y / 8.0);
  if (amplitude == Amplitude::smooth) return envelope;
  return (1.0 + std::pow(std::abs(y), beta)) * envelope;
}

double SigmaSpec::amplitude_sup() const { return amplitude_sup_scan(*this); }

std::function<double(double)> sigma_bar_of(const SigmaSpec& spec) {
  spec.validate();
  const double mean = spec.time_mean();
  return [spec, mean](double y) { return mean * spec.amplitude_at(y); };
}

double G_sigma(const SigmaSpec& spec, double r, double y) {
  if (r < 0.0) throw std::invalid_argument("G_sigma needs r >= 0");
  if (r == 0.0) return 0.0;
  const double mean = spec.time_mean();
  auto centered = [&](double s) { return spec.time_factor(s) - mean; };
  // Chunks of at most an eighth of the resolution period keep a 10-point
  // rule far beyond double precision for these trigonometric integrands.
  const double chunk = spec.period() / 8.0;
  const auto pieces = static_cast<std::size_t>(std::ceil(r / chunk));
  double total = 0.0;
  for (std::size_t i = 0; i < pieces; ++i) {
    const double a = static_cast<double>(i) * chunk;
    const double b = std::min(r, a + chunk);
    total += boost::math::quadrature::gauss<double, 10>::integrate(centered, a, b);
  }
  return total * spec.amplitude_at(y);
}

double holder_estimate(const std::function<double(double)>& fn, double exponent, double lo, double hi,
                       std::size_t n_pairs) {
  if (!(exponent > 0.0 && exponent <= 1.0)) throw std::invalid_argument("Holder exponent must lie in (0, 1]");
  if (!(hi > lo)) throw std::invalid_argument("Holder estimate needs a non-degenerate interval");
  if (n_pairs < 100) throw std::invalid_argument("Holder estimate needs at least 100 pairs");
  const double width = hi - lo;
  double best = 0.0;
  auto probe = [&](double a, double b) {
    const double gap = std::abs(b - a);
    if (gap == 0.0) return;
    best = std::max(best, std::abs(fn(a) - fn(b)) / std::pow(gap, exponent));
  };
  const std::size_t ladder = n_pairs / 2;
  const auto scales = static_cast<std::size_t>(std::max(4.0, std::floor(std::sqrt(static_cast<double>(ladder)))));
  const std::size_t positions = std::max<std::size_t>(2, ladder / scales);
  for (std::size_t si = 0; si < scales; ++si) {
    // Separations from width * 1e-6 up to the whole interval.
    const double gap = width * std::pow(1e-6, 1.0 - static_cast<double>(si) / static_cast<double>(scales - 1));
    for (std::size_t pi = 0; pi < positions; ++pi) {
      const double a = lo + (width - gap) * static_cast<double>(pi) / static_cast<double>(positions - 1);
      probe(a, std::min(hi, a + gap));
    }
  }
  std::mt19937_64 rng(0x5eedULL);
  std::uniform_real_distribution<double> uniform(lo, hi);
  for (std::size_t i = ladder; i < n_pairs; ++i) probe(uniform(rng), uniform(rng));
  return best;
}

double averaged_oscillation_integral(const SigmaSpec& spec, double eps, double D, double t, double y) {
  if (!(eps > 0.0) || !(D > 0.0) || !(t > 0.0)) {
    throw std::invalid_argument("oscillation integral needs eps, D, t > 0");
  }
  const double mean = spec.time_mean();
  auto integrand = [&](double u) {
    if (u == 0.0) return 0.0;
    return 2.0 * std::exp(-D / (u * u)) * (spec.time_factor((t - u * u) / eps) - mean);
  };
  const double top = std::sqrt(t);
  // At least 16 steps per fast period in u (phase rate 2u/eps) and never
  // coarser than eps P / 16.
  const double h_osc = eps * spec.period() / (16.0 * std::max(2.0 * top, 1.0));
  const double h = std::min(top / 64.0, h_osc);
  const auto initial = static_cast<std::size_t>(std::ceil(top / h));
  const auto result = simpson_refined(integrand, 0.0, top, initial, 1e-6, 1e-13);
  return spec.amplitude_at(y) * result.value / std::sqrt(eps);
}

double Nonlinearity::operator()(double /*y*/, double z) const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::saturating: return 0.5 * z / (1.0 + z * z);
    case Kind::clamp: return std::clamp(z, -1.0, 1.0);
  }
  return 0.0;
}

double Nonlinearity::lipschitz() const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::saturating: return 0.5;
    case Kind::clamp: return 1.0;
  }
  return 0.0;
}

double Nonlinearity::bound() const {
  switch (kind) {
    case Kind::zero: return 0.0;
    case Kind::saturating: return 0.25;
    case Kind::clamp: return 1.0;
  }
  return 0.0;
}

double InitialCondition::operator()(double y) const {
  return kind == Kind::gaussian ? std::exp(-y * y / 4.0) : 0.0;
}

double InitialCondition::bound() const { return kind == Kind::gaussian ? 1.0 : 0.0; }

std::string to_string(Nonlinearity::Kind kind) {
  switch (kind) {
    case Nonlinearity::Kind::zero: return "zero";
    case Nonlinearity::Kind::saturating: return "saturating";
    case Nonlinearity::Kind::clamp: return "clamp";
  }
  return "unknown";
}

Nonlinearity::Kind nonlinearity_from_string(const std::string& name) {
  if (name == "zero") return Nonlinearity::Kind::zero;
  if (name == "saturating") return Nonlinearity::Kind::saturating;
  if (name == "clamp") return Nonlinearity::Kind::clamp;
  throw std::invalid_argument("unknown nonlinearity '" + name + "'");
}

std::string to_string(InitialCondition::Kind kind) {
  return kind == InitialCondition::Kind::gaussian ? "gaussian" : "zero";
}

InitialCondition::Kind initial_condition_from_string(const std::string& name) {
  if (name == "gaussian") return InitialCondition::Kind::gaussian;
  if (name == "zero") return InitialCondition::Kind::zero;
  throw std::invalid_argument("unknown initial condition '" + name + "'");
}

double gamma1_bound(double beta) {
  if (!(beta > 0.5 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (1/2, 1]");
  return 0.5 * (1.0 - 1.0 / (2.0 * beta));
}

}  // namespace smavg
