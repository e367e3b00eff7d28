#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hcran/config.hpp"
#include "hcran/harness.hpp"
#include "hcran/verify.hpp"

namespace fs = std::filesystem;

namespace {

hcran::ConfigBundle load(const std::string& path) {
  hcran::ConfigBundle bundle = path.empty() ? hcran::parse_config("") : hcran::load_config(path);
  hcran::apply_process_env_overrides(bundle);
  bundle.system.validate();
  bundle.traffic.validate(bundle.system.num_rue);
  return bundle;
}

fs::path prepare_out(const std::string& dir) {
  fs::path out(dir);
  fs::create_directories(out);
  return out;
}

void print_table(const std::vector<hcran::RunSummary>& table) {
  hcran::write_summary_csv(std::cout, table);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Queue-aware energy-efficient beamforming simulator for H-CRAN downlinks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int jobs = 1;

  auto* simulate = app.add_subcommand("simulate", "Run one trajectory and write its trace");
  std::uint64_t seed = 1;
  int slots = 0;
  simulate->add_option("--config", config_path, "Config file (key = value)");
  simulate->add_option("--seed", seed, "Random seed");
  simulate->add_option("--slots", slots, "Number of slots (overrides the config)");
  simulate->add_option("--out", out_dir, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Average summaries over a (V, lambda) grid");
  std::vector<double> v_list;
  std::vector<double> lambda_list;
  int seeds = 5;
  sweep->add_option("--config", config_path, "Config file (key = value)");
  sweep->add_option("--v-list", v_list, "Tradeoff parameters")->delimiter(',')->required();
  sweep->add_option("--lambda-list", lambda_list, "Mean arrival rates")->delimiter(',')->required();
  sweep->add_option("--seeds", seeds, "Seeds per point")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_dir, "Output directory");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* fronthaul = app.add_subcommand("compare-fronthaul",
                                       "Paired runs with a finite fronthaul cap and without");
  double cap = 6.0;
  fronthaul->add_option("--config", config_path, "Config file (key = value)");
  fronthaul->add_option("--cap", cap, "Fronthaul cap C_n (bit/slot/Hz)")->required();
  fronthaul->add_option("--v-list", v_list, "Tradeoff parameters")->delimiter(',')->required();
  fronthaul->add_option("--seeds", seeds, "Seeds per point")->check(CLI::PositiveNumber);
  fronthaul->add_option("--out", out_dir, "Output directory");
  fronthaul->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Run the oracle and invariant suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      hcran::ConfigBundle b = load(config_path);
      if (slots > 0) b.system.slots = slots;
      b.system.validate();
      const fs::path out = prepare_out(out_dir);
      const hcran::Trajectory t = hcran::run_trajectory(b.system, b.traffic, seed);
      hcran::emit_trace_csv((out / "trace.csv").string(), t.trace, b.system.num_rue,
                            b.system.num_rrh);
      hcran::emit_summary_csv((out / "summary.csv").string(), {t.summary});
      print_table({t.summary});
      return 0;
    }
    if (*sweep) {
      const hcran::ConfigBundle b = load(config_path);
      const fs::path out = prepare_out(out_dir);
      const hcran::SweepResult r =
          hcran::sweep(b.system, b.traffic, v_list, lambda_list, seeds, jobs);
      hcran::emit_summary_csv((out / "sweep.csv").string(), r.averaged);
      hcran::emit_summary_csv((out / "sweep_runs.csv").string(), r.runs);
      print_table(r.averaged);
      return 0;
    }
    if (*fronthaul) {
      const hcran::ConfigBundle b = load(config_path);
      const fs::path out = prepare_out(out_dir);
      const hcran::FronthaulComparison r =
          hcran::compare_fronthaul(b.system, b.traffic, cap, v_list, seeds, jobs);
      std::vector<hcran::RunSummary> table = r.constrained;
      table.insert(table.end(), r.ideal.begin(), r.ideal.end());
      std::vector<hcran::RunSummary> runs = r.constrained_runs;
      runs.insert(runs.end(), r.ideal_runs.begin(), r.ideal_runs.end());
      hcran::emit_summary_csv((out / "fronthaul.csv").string(), table);
      hcran::emit_summary_csv((out / "fronthaul_runs.csv").string(), runs);
      print_table(table);
      return 0;
    }
    if (*verify) return hcran::run_verification(std::cout) ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
