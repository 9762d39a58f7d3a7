#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smavg {

/// Atom budget used when the caller does not configure one.
inline constexpr std::size_t kDefaultAtomBudget = std::size_t{1} << 22;

/// Half-open grid interval (lo * 2^-level, hi * 2^-level] in absolute
/// coordinates. Empty when lo == hi.
struct GridInterval {
  int level = 0;
  std::int64_t lo = 0;
  std::int64_t hi = 0;

  double left() const;
  double right() const;
  bool empty() const { return lo == hi; }
};

/// The dyadic atom Delta_kn^{(j)} = (j + (k-1) 2^-n, j + k 2^-n], 1 <= k <= 2^n.
GridInterval dyadic_atom(int j, std::int64_t k, int n);

/// The unit interval (j, j+1].
GridInterval unit_interval(int j);

/// Truncated real line (j_min, j_max] resolved down to atoms of length 2^-n_max.
struct DyadicDomain {
  int j_min = -8;
  int j_max = 8;
  int n_max = 8;

  std::size_t unit_count() const { return static_cast<std::size_t>(j_max - j_min); }
  std::size_t atoms_per_unit() const { return std::size_t{1} << n_max; }
  std::size_t atom_count() const { return unit_count() * atoms_per_unit(); }
  double atom_length() const;

  /// d_kn^{(j)} = j + k 2^-n.
  double endpoint(int j, std::int64_t k, int n) const;

  /// Left endpoint of finest atom `atom` (grid order, starting at j_min).
  double atom_left(std::size_t atom) const;

  /// Number of level-n nodes across the whole domain.
  std::size_t nodes_at(int level) const { return unit_count() << level; }

  /// Throws std::invalid_argument on a malformed domain or when the finest
  /// level would exceed `atom_budget` atoms.
  void validate(std::size_t atom_budget = kDefaultAtomBudget) const;

  bool operator==(const DyadicDomain&) const = default;
};

/// Deterministic spatial weight g of the driving noise. Closed forms for
/// integrals of |g|^p keep variances additive across dyadic levels.
struct Weight {
  enum class Shape { zero, constant, gaussian };

  Shape shape = Shape::gaussian;
  double scale = 1.0;  ///< c
  double rate = 1.0;   ///< b in c * exp(-b y^2)

  static Weight zero() { return {Shape::zero, 0.0, 0.0}; }
  static Weight constant(double c) { return {Shape::constant, c, 0.0}; }
  static Weight gaussian(double c, double b) { return {Shape::gaussian, c, b}; }

  double operator()(double y) const;

  /// \int_a^b |g(y)|^p dy.
  double integral_pow(double a, double b, double p) const;

  bool operator==(const Weight&) const = default;
};

enum class MeasureKind { wiener, fbm_weighted, alpha_stable, pure_jump_martingale };

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& name);
std::string to_string(Weight::Shape shape);
Weight::Shape weight_shape_from_string(const std::string& name);

/// Which stochastic measure to sample, with its law parameters.
struct MeasureSpec {
  MeasureKind kind = MeasureKind::wiener;
  Weight weight = Weight::gaussian(1.0, 1.0);
  double hurst = 0.75;           ///< fbm_weighted only, in (1/2, 1)
  double alpha = 1.5;            ///< alpha_stable only, in (1, 2)
  double jump_intensity = 64.0;  ///< pure_jump_martingale: jumps per unit length

  void validate() const;
  bool operator==(const MeasureSpec&) const = default;
};

/// One sampled stochastic measure. Finest-atom values are the only stored
/// data; coarser levels are summed pairwise from them at construction so
/// every parent equals the sum of its two children bit for bit.
///
/// Immutable after construction.
class SMRealization {
 public:
  SMRealization(MeasureSpec spec, DyadicDomain domain, std::uint64_t seed,
                std::vector<double> atom_values);

  const MeasureSpec& spec() const { return spec_; }
  const DyadicDomain& domain() const { return domain_; }
  std::uint64_t seed() const { return seed_; }

  std::span<const double> atom_values() const { return levels_.back(); }

  /// Values of all level-n nodes in grid order.
  std::span<const double> level_values(int level) const;

  /// FNV-1a hash over the finest-atom bit patterns.
  std::uint64_t checksum() const;

 private:
  MeasureSpec spec_;
  DyadicDomain domain_;
  std::uint64_t seed_;
  std::vector<std::vector<double>> levels_;
};

/// Samples a realization of `spec` on `domain`.
///
/// Wiener atoms come from a level-by-level bridge refinement with one random
/// stream per level, so realizations at different depths with the same seed
/// share their driving path: a depth-n realization equals the depth-(n+1)
/// realization aggregated one level up.
SMRealization realize_sm(const MeasureSpec& spec, const DyadicDomain& domain, std::uint64_t seed,
                         std::size_t atom_budget = kDefaultAtomBudget);

/// mu(interval) for a grid interval at any level <= n_max inside the domain.
double measure_of(const SMRealization& sm, const GridInterval& interval);

/// Deterministic integrand, optionally restricted to a grid interval. On each
/// finest atom the integrand takes the value fn(left endpoint) when the atom
/// lies inside the support, and zero otherwise.
struct Integrand {
  std::function<double(double)> fn;
  std::optional<GridInterval> support;

  Integrand(std::function<double(double)> f) : fn(std::move(f)) {}  // NOLINT
  Integrand(std::function<double(double)> f, GridInterval restrict_to)
      : fn(std::move(f)), support(restrict_to) {}

  static Integrand indicator(GridInterval interval, double value = 1.0);
};

/// Left-endpoint Riemann-Stieltjes sum over finest atoms.
double integrate_deterministic(const SMRealization& sm, const Integrand& g);

struct IntegrandFamily {
  std::vector<Integrand> members;
  std::string description;
};

/// {(|j|+1)^{rho/2} 1_(j,j+1]} over the units of `domain`, ordered by |j|
/// (negative before positive on ties).
IntegrandFamily weighted_unit_indicators(const DyadicDomain& domain, double rho);

/// Partial sums s_L = sum_{l<=L} (\int phi_l dmu)^2 for L = 1..min(L, |fam|).
std::vector<double> squared_integral_series(const SMRealization& sm, const IntegrandFamily& fam,
                                            std::size_t max_terms);

/// Cauchy test on the last `window` increments: |s_L - s_{L-1}| < rel_tol * s_L.
bool series_stabilized(std::span<const double> partial_sums, double rel_tol = 1e-3,
                       std::size_t window = 4);

struct TauIntegrabilityReport {
  double tau = 0.0;
  std::vector<int> radii;
  std::vector<double> partial_integrals;  ///< I_R = \int_{(-R,R]} |y|^tau dmu
  double last_relative_change = 0.0;
  bool stabilized = false;
};

/// I_R over nested radii on an existing realization. Stabilized when the last
/// successive change is below rel_tol relative to the larger-radius value.
TauIntegrabilityReport check_tau_integrability(const SMRealization& sm, double tau,
                                               std::span<const int> radii, double rel_tol = 1e-3);

/// Samples a realization on (-R_max, R_max] and runs the check above.
TauIntegrabilityReport check_tau_integrability(const MeasureSpec& spec, double tau,
                                               std::span<const int> radii, std::uint64_t seed,
                                               int n_max, double rel_tol = 1e-3);

/// Text persistence: key/value header then one atom per line at 17
/// significant digits. Round trip is bit exact.
void write_realization(std::ostream& out, const SMRealization& sm);
SMRealization read_realization(std::istream& in);

}  // namespace smavg
