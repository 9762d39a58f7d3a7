#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace smavg {

/// Time factor m(s) of a product coefficient sigma(s, y) = m(s) a(y).
enum class TimeProfile {
  periodic_cos,   ///< 2 + cos s
  periodic_sin,   ///< sin s
  time_constant,  ///< 1
  quasiperiodic,  ///< sin s + sin(sqrt(2) s)
  chirp,          ///< cos(sqrt s): mean zero, centered integral grows like 2 sqrt(r)
};

/// Spatial factor a(y).
enum class Amplitude {
  holder,  ///< (1 + |y|^beta) exp(-y^2 / 8), beta-Holder at the origin
  smooth,  ///< exp(-y^2 / 8)
};

std::string to_string(TimeProfile profile);
TimeProfile time_profile_from_string(const std::string& name);
std::string to_string(Amplitude amplitude);
Amplitude amplitude_from_string(const std::string& name);

/// Declared Holder constant of either amplitude for every beta in (1/2, 1).
inline constexpr double kAmplitudeHolderConstant = 1.01;

struct SigmaSpec {
  TimeProfile profile = TimeProfile::periodic_cos;
  Amplitude amplitude = Amplitude::holder;
  double beta = 0.75;

  static SigmaSpec make(TimeProfile profile, Amplitude amplitude = Amplitude::holder,
                        double beta = 0.75);

  /// Throws unless 1/2 < beta < 1.
  void validate() const;

  double time_factor(double s) const;
  double time_mean() const;
  double time_sup() const;
  /// Fastest angular frequency of m; sets quadrature resolution.
  double max_frequency() const;
  /// Period for periodic profiles; 2 pi / max_frequency otherwise.
  double period() const;
  bool periodic() const;
  /// False for profiles whose centered integral is unbounded.
  bool bounded_centered_integral() const { return profile != TimeProfile::chirp; }

  double amplitude_at(double y) const;
  double amplitude_sup() const;

  double operator()(double s, double y) const { return time_factor(s) * amplitude_at(y); }

  /// Holder exponent used for rates; smooth amplitudes report the limit 1.
  double effective_beta() const { return amplitude == Amplitude::smooth ? 1.0 : beta; }
  /// L_sigma, valid for sigma(s, .) at every s.
  double holder_constant() const { return time_sup() * kAmplitudeHolderConstant; }
  /// M_sigma = sup |sigma|.
  double bound() const { return time_sup() * amplitude_sup(); }
};

/// sigma_bar(y) = lim (1/t) \int_0^t sigma(s, y) ds, exact for every shipped profile.
std::function<double(double)> sigma_bar_of(const SigmaSpec& spec);

/// G_sigma(r, y) = \int_0^r (sigma(s, y) - sigma_bar(y)) ds by composite
/// Gauss-Legendre quadrature.
double G_sigma(const SigmaSpec& spec, double r, double y);

/// max |fn(y1) - fn(y2)| / |y1 - y2|^exponent over a deterministic pair set
/// on [lo, hi]: a geometric ladder of separations swept across the interval
/// plus seeded uniform pairs.
double holder_estimate(const std::function<double(double)>& fn, double exponent, double lo, double hi,
                       std::size_t n_pairs = 10000);

/// (1/sqrt eps) \int_0^t (t-s)^{-1/2} e^{-D/(t-s)} (sigma(s/eps, y) - sigma_bar(y)) ds,
/// computed in u = sqrt(t - s) with Simpson refinement to 1e-6 relative.
double averaged_oscillation_integral(const SigmaSpec& spec, double eps, double D, double t, double y);

struct Nonlinearity {
  enum class Kind {
    zero,
    saturating,  ///< z / (2 (1 + z^2)), L_f = 1/2
    clamp,       ///< clamp(z, -1, 1), L_f = 1
  };
  Kind kind = Kind::saturating;

  double operator()(double y, double z) const;
  double lipschitz() const;
  double bound() const;
};

struct InitialCondition {
  enum class Kind { zero, gaussian };  ///< gaussian: exp(-y^2 / 4)
  Kind kind = Kind::gaussian;

  double operator()(double y) const;
  double bound() const;
};

std::string to_string(Nonlinearity::Kind kind);
Nonlinearity::Kind nonlinearity_from_string(const std::string& name);
std::string to_string(InitialCondition::Kind kind);
InitialCondition::Kind initial_condition_from_string(const std::string& name);

struct CoefficientSet {
  SigmaSpec sigma;
  Nonlinearity f;
  InitialCondition u0;

  double sigma_bar(double y) const { return sigma.time_mean() * sigma.amplitude_at(y); }
};

/// (1/2)(1 - 1/(2 beta)); beta = 1 gives the smooth-coefficient limit 1/4.
double gamma1_bound(double beta);

}  // namespace smavg
