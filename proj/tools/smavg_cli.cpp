// Command-line driver: rate | lemmas | besov | all.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "smavg/study.hpp"
#include "smavg/support.hpp"

namespace {

using smavg::format_g17;

struct Outputs {
  std::filesystem::path dir;
  std::vector<std::pair<std::string, std::uint64_t>> checksums;

  void write(const std::string& name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
    smavg::Fnv1a h;
    h.update(body);
    checksums.emplace_back(name, h.digest());
  }
};

void print_suite(const smavg::SuiteReport& suite) {
  for (const auto& c : suite.checks) {
    std::printf("  %-40s %s (cases %zu, failures %zu, extremal %.6g)%s\n", c.name.c_str(),
                c.passed() ? "ok  " : "FAIL", c.cases, c.failures, c.extremal,
                c.expect_pass ? "" : " [negative control]");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Averaging-principle laboratory for the stochastic heat equation"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--config", config_path, "Flat key = value study configuration (defaults when omitted)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--seed", seed, "Base seed, overrides the config");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  auto* rate = app.add_subcommand("rate", "Coupled eps sweep with rate fit");
  auto* lemmas = app.add_subcommand("lemmas", "Lemma and estimate checks");
  auto* besov = app.add_subcommand("besov", "Interpolation probe and Besov ratios");
  auto* all = app.add_subcommand("all", "Every suite");

  CLI11_PARSE(app, argc, argv);

  try {
    smavg::StudyConfig config = config_path.empty() ? smavg::StudyConfig{} : smavg::load_config(config_path);
    if (seed) config.seed = *seed;
    config.validate();

    Outputs outputs{out_dir, {}};
    std::filesystem::create_directories(outputs.dir);
    const bool run_all = all->parsed();
    bool ok = true;

    if (run_all || rate->parsed()) {
      const auto report = smavg::run_convergence_study(config, jobs);
      std::ostringstream csv;
      smavg::emit_plot_data(csv, report);
      outputs.write("rate_report.csv", csv.str());
      std::printf("rate: %s\n", report.verdict_text.c_str());
      std::printf("  gamma1 %s, median slope %s, flagged %zu, boundedness %s, gronwall %s, coupling %s\n",
                  format_g17(report.gamma1).c_str(), format_g17(report.median_slope).c_str(), report.flagged,
                  report.boundedness_holds ? "ok" : "FAIL", report.gronwall_holds ? "ok" : "FAIL",
                  report.coupling_holds ? "ok" : "FAIL");
      ok = ok && report.verdict;
    }
    if (run_all || lemmas->parsed()) {
      const auto suite = smavg::run_lemma_suite(config, jobs);
      std::ostringstream csv;
      smavg::write_suite_csv(csv, suite);
      outputs.write("lemma_suite.csv", csv.str());
      std::printf("lemmas: %s\n", suite.passed() ? "pass" : "fail");
      print_suite(suite);
      ok = ok && suite.passed();
    }
    if (run_all || besov->parsed()) {
      const auto suite = smavg::run_besov_suite(config, jobs);
      std::ostringstream csv;
      smavg::write_besov_csv(csv, suite);
      outputs.write("besov_ratios.csv", csv.str());
      std::printf("besov: %s\n", suite.report.passed() ? "pass" : "fail");
      print_suite(suite.report);
      ok = ok && suite.report.passed();
    }

    std::ostringstream manifest;
    smavg::write_manifest(manifest, config, outputs.checksums);
    std::ofstream(outputs.dir / "study_manifest", std::ios::binary) << manifest.str();
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
