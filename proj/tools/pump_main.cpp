// Command-line driver: config-driven experiments plus the built-in
// verification suites.

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "pump/config.hpp"
#include "pump/verify.hpp"

namespace {

int run_config_task(const std::string& config_path, const std::string& out_override,
                    const std::string& task_override, unsigned seed, bool have_seed) {
  try {
    pump::ExperimentConfig cfg = pump::load_config(config_path);
    if (!task_override.empty()) cfg.task = task_override;
    if (!out_override.empty()) cfg.out_path = out_override;
    if (have_seed) cfg.seed = seed;
    nlohmann::json report = pump::run_experiment(cfg);
    std::cout << report.dump(2) << std::endl;
    return 0;
  } catch (const pump::ConfigError& e) {
    std::cerr << "config error at " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-volume G-charge Thouless pump toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, suite;
  unsigned seed = 0;
  bool have_seed = false;

  auto add_common = [&](CLI::App* sub, bool config_required = true) {
    auto* copt = sub->add_option("--config", config_path, "experiment config (JSON)");
    if (config_required) copt->required();
    sub->add_option("--out", out_path, "report output path");
    sub->add_option("--seed", seed, "override RNG seed")->each([&](const std::string&) {
      have_seed = true;
    });
  };

  auto* run = app.add_subcommand("run", "run the task named in the config");
  add_common(run);
  auto* index = app.add_subcommand("index", "pump index of the configured loop");
  add_common(index);
  auto* split = app.add_subcommand("split", "single-edge splitting of the configured loop");
  add_common(split);
  auto* gap = app.add_subcommand("gap", "spectral gap of F and of disordered F+W");
  add_common(gap);
  auto* sweep = app.add_subcommand("sweep", "index stability sweep");
  add_common(sweep);

  auto* verify = app.add_subcommand("verify", "run a built-in verification suite");
  verify->add_option("--suite", suite, "suite name (empty lists suites)");
  verify->add_option("--out", out_path, "CSV output path");
  verify->add_option("--seed", seed, "override RNG seed")->each([&](const std::string&) {
    have_seed = true;
  });

  std::string report_path;
  auto* report = app.add_subcommand("report", "pretty-print a report JSON");
  report->add_option("file", report_path, "report file")->required();

  CLI11_PARSE(app, argc, argv);

  if (verify->parsed()) {
    if (suite.empty()) {
      std::cout << "available suites:\n";
      for (const auto& s : pump::suite_names()) std::cout << "  " << s << "\n";
      return 0;
    }
    try {
      pump::VerifyResult res = pump::run_suite(suite, have_seed ? seed : 20240809u);
      std::string csv = pump::verify_csv(res);
      if (!out_path.empty()) {
        std::ofstream f(out_path);
        f << csv;
      }
      for (const auto& row : res.rows)
        std::cout << (row.pass ? "PASS " : "FAIL ") << row.test << " expected " << row.expected
                  << " measured " << row.measured << "\n";
      std::cout << (res.all_pass ? "ALL PASS" : "FAILURES PRESENT") << " (" << std::fixed
                << std::setprecision(1) << res.seconds << " s)" << std::endl;
      return res.all_pass ? 0 : 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << std::endl;
      return 3;
    }
  }
  if (report->parsed()) {
    try {
      std::ifstream f(report_path);
      if (!f) throw std::runtime_error("cannot open " + report_path);
      nlohmann::json j;
      f >> j;
      std::cout << std::setprecision(17) << j.dump(2) << std::endl;
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << std::endl;
      return 3;
    }
  }

  std::string task;
  if (index->parsed()) task = "index";
  if (split->parsed()) task = "split";
  if (gap->parsed()) task = "gap";
  if (sweep->parsed()) task = "sweep";
  return run_config_task(config_path, out_path, task, seed, have_seed);
}
