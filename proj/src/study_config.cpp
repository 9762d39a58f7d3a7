#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "smavg/study.hpp"
#include "smavg/support.hpp"

namespace smavg {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("config key '" + key + "': '" + text + "' is not a finite number");
  }
  return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& text) {
  Int v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::invalid_argument("config key '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
  return out;
}

template <typename F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config key '" + key + "': " + e.what());
  }
}

using Setter = std::function<void(StudyConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"sm.kind", [](StudyConfig& c, const std::string& k, const std::string& v) {
         c.sm.kind = wrap(k, [&] { return measure_kind_from_string(v); });
       }},
      {"sm.hurst", [](StudyConfig& c, const std::string& k, const std::string& v) { c.sm.hurst = to_double(k, v); }},
      {"sm.alpha", [](StudyConfig& c, const std::string& k, const std::string& v) { c.sm.alpha = to_double(k, v); }},
      {"sm.intensity",
       [](StudyConfig& c, const std::string& k, const std::string& v) { c.sm.jump_intensity = to_double(k, v); }},
      {"sm.weight", [](StudyConfig& c, const std::string& k, const std::string& v) {
         c.sm.weight.shape = wrap(k, [&] { return weight_shape_from_string(v); });
       }},
      {"sm.weight_scale",
       [](StudyConfig& c, const std::string& k, const std::string& v) { c.sm.weight.scale = to_double(k, v); }},
      {"sm.weight_rate",
       [](StudyConfig& c, const std::string& k, const std::string& v) { c.sm.weight.rate = to_double(k, v); }},
      {"sm.radius", [](StudyConfig& c, const std::string& k, const std::string& v) { c.sm_radius = to_int<int>(k, v); }},
      {"sigma.profile", [](StudyConfig& c, const std::string& k, const std::string& v) {
         c.sigma.profile = wrap(k, [&] { return time_profile_from_string(v); });
       }},
      {"sigma.amplitude", [](StudyConfig& c, const std::string& k, const std::string& v) {
         c.sigma.amplitude = wrap(k, [&] { return amplitude_from_string(v); });
       }},
      {"sigma.beta", [](StudyConfig& c, const std::string& k, const std::string& v) { c.sigma.beta = to_double(k, v); }},
      {"f.kind", [](StudyConfig& c, const std::string& k, const std::string& v) {
         c.f.kind = wrap(k, [&] { return nonlinearity_from_string(v); });
       }},
      {"u0.kind", [](StudyConfig& c, const std::string& k, const std::string& v) {
         c.u0.kind = wrap(k, [&] { return initial_condition_from_string(v); });
       }},
      {"grid.R", [](StudyConfig& c, const std::string& k, const std::string& v) { c.grid.radius = to_int<int>(k, v); }},
      {"grid.n_max", [](StudyConfig& c, const std::string& k, const std::string& v) { c.grid.n_max = to_int<int>(k, v); }},
      {"grid.T", [](StudyConfig& c, const std::string& k, const std::string& v) { c.grid.horizon = to_double(k, v); }},
      {"grid.nt", [](StudyConfig& c, const std::string& k, const std::string& v) { c.grid.nt = to_int<std::size_t>(k, v); }},
      {"eps", [](StudyConfig& c, const std::string& k, const std::string& v) { c.eps = to_list(k, v); }},
      {"replications",
       [](StudyConfig& c, const std::string& k, const std::string& v) { c.replications = to_int<std::size_t>(k, v); }},
      {"seed", [](StudyConfig& c, const std::string& k, const std::string& v) { c.seed = to_int<std::uint64_t>(k, v); }},
      {"picard.tol", [](StudyConfig& c, const std::string& k, const std::string& v) { c.picard.tol = to_double(k, v); }},
      {"picard.max_iter",
       [](StudyConfig& c, const std::string& k, const std::string& v) { c.picard.max_iter = to_int<std::size_t>(k, v); }},
      {"kernel.C_dx", [](StudyConfig& c, const std::string& k, const std::string& v) { c.c_dx = to_double(k, v); }},
      {"kernel.lambda_dx",
       [](StudyConfig& c, const std::string& k, const std::string& v) { c.lambda_dx = to_double(k, v); }},
      {"kernel.truncation_sd",
       [](StudyConfig& c, const std::string& k, const std::string& v) { c.truncation_sd = to_double(k, v); }},
      {"margin", [](StudyConfig& c, const std::string& k, const std::string& v) { c.margin = to_double(k, v); }},
  };
  return table;
}

}  // namespace

KernelParams StudyConfig::kernel_params() const {
  KernelParams p = KernelParams::shipped(grid.horizon);
  if (c_dx > 0.0) p.c_dx = c_dx;
  if (lambda_dx > 0.0) p.lambda_dx = lambda_dx;
  return p;
}

void StudyConfig::validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    throw std::invalid_argument("config key '" + key + "': " + why);
  };
  wrap("sm", [&] { sm.validate(); return 0; });
  wrap("sigma.beta", [&] { sigma.validate(); return 0; });
  wrap("grid", [&] { grid.validate(); return 0; });
  if (sm_radius < grid.radius) fail("sm.radius", "must be at least grid.R");
  wrap("sm.radius", [&] { sm_domain().validate(); return 0; });
  if (eps.empty()) fail("eps", "list is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0 && eps[i] <= 1.0)) fail("eps", "values must lie in (0, 1]");
    if (i > 0 && !(eps[i] < eps[i - 1])) fail("eps", "values must be strictly decreasing");
  }
  if (replications < 1) fail("replications", "must be at least 1");
  if (!(picard.tol > 0.0)) fail("picard.tol", "must be positive");
  if (picard.max_iter < 1) fail("picard.max_iter", "must be at least 1");
  if (c_dx < 0.0) fail("kernel.C_dx", "must be positive (0 selects the shipped value)");
  if (lambda_dx < 0.0) fail("kernel.lambda_dx", "must be positive (0 selects the shipped value)");
  if (!(truncation_sd >= 4.0)) fail("kernel.truncation_sd", "must be at least 4");
  if (!(margin >= 0.0 && margin < grid.radius)) fail("margin", "must lie in [0, grid.R)");
}

std::string StudyConfig::echo() const {
  std::ostringstream out;
  std::string eps_list;
  for (std::size_t i = 0; i < eps.size(); ++i) eps_list += (i ? ", " : "") + format_g17(eps[i]);
  out << "sm.kind = " << to_string(sm.kind) << '\n'
      << "sm.hurst = " << format_g17(sm.hurst) << '\n'
      << "sm.alpha = " << format_g17(sm.alpha) << '\n'
      << "sm.intensity = " << format_g17(sm.jump_intensity) << '\n'
      << "sm.weight = " << to_string(sm.weight.shape) << '\n'
      << "sm.weight_scale = " << format_g17(sm.weight.scale) << '\n'
      << "sm.weight_rate = " << format_g17(sm.weight.rate) << '\n'
      << "sm.radius = " << sm_radius << '\n'
      << "sigma.profile = " << to_string(sigma.profile) << '\n'
      << "sigma.amplitude = " << to_string(sigma.amplitude) << '\n'
      << "sigma.beta = " << format_g17(sigma.beta) << '\n'
      << "f.kind = " << to_string(f.kind) << '\n'
      << "u0.kind = " << to_string(u0.kind) << '\n'
      << "grid.R = " << grid.radius << '\n'
      << "grid.n_max = " << grid.n_max << '\n'
      << "grid.T = " << format_g17(grid.horizon) << '\n'
      << "grid.nt = " << grid.nt << '\n'
      << "eps = " << eps_list << '\n'
      << "replications = " << replications << '\n'
      << "seed = " << seed << '\n'
      << "picard.tol = " << format_g17(picard.tol) << '\n'
      << "picard.max_iter = " << picard.max_iter << '\n'
      << "kernel.C_dx = " << format_g17(c_dx) << '\n'
      << "kernel.lambda_dx = " << format_g17(lambda_dx) << '\n'
      << "kernel.truncation_sd = " << format_g17(truncation_sd) << '\n'
      << "margin = " << format_g17(margin) << '\n';
  return out.str();
}

StudyConfig parse_config(std::istream& in) {
  StudyConfig config;
  std::map<std::string, int> seen;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    }
    if (seen.contains(key)) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": key '" + key +
                                  "' already set on line " + std::to_string(seen[key]));
    }
    seen[key] = number;
    it->second(config, key, value);
  }
  config.validate();
  return config;
}

StudyConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path.string());
  return parse_config(in);
}

}  // namespace smavg
