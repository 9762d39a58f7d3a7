#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "smavg/coefficients.hpp"
#include "smavg/kernel.hpp"
#include "smavg/mild_solver.hpp"
#include "smavg/stochastic_measure.hpp"

namespace smavg {

inline constexpr const char* kVersion = "1.0.0";

/// Everything a study run depends on. Parsed from flat `key = value` text;
/// see README for the schema.
struct StudyConfig {
  MeasureSpec sm;
  int sm_radius = 8;  ///< the measure lives on (-sm_radius, sm_radius]
  SigmaSpec sigma;
  Nonlinearity f;
  InitialCondition u0;
  SpaceTimeGrid grid;
  std::vector<double> eps{0.25, 0.0625, 0.015625, 0.00390625, 0.0009765625};
  std::size_t replications = 16;
  std::uint64_t seed = 1;
  PicardOptions picard;
  double c_dx = 0.0;       ///< 0 selects the shipped constant
  double lambda_dx = 0.0;  ///< 0 selects the shipped constant
  double truncation_sd = kDefaultTruncationSd;
  double margin = 2.0;  ///< sup_error ignores |x| > R - margin

  /// Throws std::invalid_argument naming the offending key.
  void validate() const;

  DyadicDomain sm_domain() const { return {-sm_radius, sm_radius, grid.n_max}; }
  CoefficientSet coefficients() const { return {sigma, f, u0}; }
  KernelParams kernel_params() const;

  /// Canonical `key = value` lines covering every key; parse(echo()) == *this.
  std::string echo() const;
};

/// Strict parser: unknown keys, duplicate keys and malformed values throw.
StudyConfig parse_config(std::istream& in);
StudyConfig load_config(const std::filesystem::path& path);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  ///< log(error) = intercept + slope log(eps)
  bool degenerate = false;  ///< some error <= 0: no slope
};

/// Least-squares slope of log(error) against log(eps). Needs >= 3 pairs
/// with eps > 0.
RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

struct ReplicationResult {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::uint64_t sm_checksum = 0;
  std::vector<std::uint64_t> solve_checksums;  ///< realization checksum seen by each solve (averaged first)
  std::vector<double> errors;                  ///< sup_error per eps
  std::vector<double> xi_sup;                  ///< sup |xi_eps| over the grid per eps
  RateFit fit;
  double boundedness_ratio = 0.0;  ///< max/min over eps of eps^{-0.9 gamma1} error
  bool gronwall_holds = true;
  double gronwall_worst = 0.0;  ///< largest lhs / rhs over rows and eps
  bool flagged = false;
  std::string failure;
};

struct RateReport {
  std::vector<double> eps;
  std::vector<ReplicationResult> replications;
  double gamma1 = 0.0;
  double tolerance = 0.05;
  double median_slope = 0.0;
  std::size_t flagged = 0;
  bool degenerate = false;
  bool study_failed = false;  ///< more than 10% of replications flagged
  bool boundedness_holds = false;
  bool gronwall_holds = false;
  bool coupling_holds = false;
  bool verdict = false;
  std::string verdict_text;
};

/// Boundedness factor allowed between the extreme scaled errors of one replication.
inline constexpr double kBoundednessFactor = 10.0;
/// Relative slack of the Gronwall comparison.
inline constexpr double kGronwallSlack = 0.1;

RateReport run_convergence_study(const StudyConfig& config, std::size_t jobs = 1);

/// '#' summary lines, then
///   row_type,replication,seed,sm_checksum,eps,sup_error,fitted_error,slope,intercept
/// with one `data` row per (replication, eps) and one `fit` row per
/// replication. A degenerate report yields the comments and header only.
void emit_plot_data(std::ostream& out, const RateReport& report);

/// (eps, error) pairs per replication read back from emit_plot_data output.
std::vector<std::vector<std::pair<double, double>>> read_plot_data(std::istream& in);

struct CheckResult {
  std::string name;
  bool expect_pass = true;  ///< false for negative controls
  bool observed = false;    ///< the inequality or property held
  std::size_t cases = 0;
  std::size_t failures = 0;
  double extremal = 0.0;
  std::string detail;

  bool passed() const { return observed == expect_pass; }
};

struct SuiteReport {
  std::string name;
  std::vector<CheckResult> checks;

  bool passed() const;
  const CheckResult& find(const std::string& check) const;
};

/// Lemma and estimate checks: series stabilization, tau-integrability,
/// dyadic version bound grid, dyadic/Besov ratio, oscillation-integral sweep, kernel
/// estimates, and the centered-integral sweeps, with negative controls.
SuiteReport run_lemma_suite(const StudyConfig& config, std::size_t jobs = 1);

struct BesovProbeRow {
  std::string probe;
  double eps = 0.0;
  double x = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct BesovSuite {
  SuiteReport report;
  std::vector<BesovProbeRow> rows;
};

/// Interpolation probe w_2(g, r)^2 <= C min(r^{2 beta}, eps) on the centered
/// field g(z, .) at z = (T, 1/2) over [0, 1], plus dyadic-sum / Besov-norm
/// ratios of the same fields.
BesovSuite run_besov_suite(const StudyConfig& config, std::size_t jobs = 1);

/// Largest allowed spread of the fitted interpolation constant across eps.
inline constexpr double kInterpolationSpread = 3.0;

void write_suite_csv(std::ostream& out, const SuiteReport& report);
void write_besov_csv(std::ostream& out, const BesovSuite& suite);

/// Config echo, version and one checksum line per emitted file.
void write_manifest(std::ostream& out, const StudyConfig& config,
                    const std::vector<std::pair<std::string, std::uint64_t>>& checksums);

}  // namespace smavg
