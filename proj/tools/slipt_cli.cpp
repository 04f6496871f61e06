// slipt: time-slot allocation for uplink secrecy in hybrid VLC/RF links with
// lightwave energy harvesting.
//
//   slipt solve  --config PATH | --preset NAME [--seed N] [--oracle]
//   slipt sweep  --config PATH | --preset fig3 [--seed N] [--trials N] [--oracle] [--out DIR]
//   slipt report --config PATH | --preset fig4 [--seed N] [--out DIR]
//
// Exit codes: 0 success, 1 runtime failure, 2 config error, 3 infeasible everywhere.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "slipt/experiment/config.hpp"
#include "slipt/experiment/scenario.hpp"
#include "slipt/experiment/sweep.hpp"
#include "slipt/reference_oracle.hpp"
#include "slipt_presets.hpp"

namespace {

using namespace slipt;
using namespace slipt::experiment;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out_dir;
  bool oracle = false;
};

ExperimentConfig resolve_config(const CommonOptions& o) {
  if (o.config_path.empty() == o.preset.empty())
    throw ConfigError("<cli>", "pass exactly one of --config or --preset");
  ExperimentConfig cfg;
  if (!o.preset.empty()) {
    const auto text = presets::find(o.preset);
    if (!text) throw ConfigError("<cli>", "unknown preset '" + o.preset + "' (fig3, fig4)");
    cfg = parse_config(*text, o.seed);
  } else {
    cfg = load_config(o.config_path, o.seed);
  }
  if (o.trials) {
    if (*o.trials < 1) throw ConfigError("trials", "must be >= 1");
    cfg.trials = *o.trials;
  }
  if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool with_trials, bool with_oracle, bool with_out) {
  cmd->add_option("--config", o.config_path, "Experiment config file (INI)");
  cmd->add_option("--preset", o.preset, "Built-in config: fig3 | fig4");
  cmd->add_option("--seed", o.seed, "Override the config seed");
  if (with_trials) cmd->add_option("--trials", o.trials, "Override the Monte-Carlo trial count");
  if (with_oracle) cmd->add_flag("--oracle", o.oracle, "Cross-check against the brute-force grid (K <= 2)");
  if (with_out) cmd->add_option("--out", o.out_dir, "Output directory for CSV files");
}

int run_solve(const CommonOptions& o) {
  const auto cfg = resolve_config(o);
  const auto rep = allocation_report(cfg);
  for (const auto& w : rep.scenario.warnings) std::cerr << "warning: " << w << '\n';
  const auto& fs = rep.scenario.feasible;
  std::cout << "users: " << fs.users() << "\n"
            << "r_min: " << csv::number(fs.r_min) << "\n"
            << "rate_bound: " << csv::number(fs.rate_bound()) << "\n"
            << "status: " << to_string(rep.result.status) << "\n";
  if (rep.result.status == DcaStatus::infeasible) return kExitInfeasible;
  std::cout << "objective_bits: " << csv::number(rep.result.objective) << "\n"
            << "clamped_secrecy_sum: " << csv::number(clamped_secrecy_sum(rep.scenario.channels, rep.reported))
            << "\n"
            << "dl_rate: " << csv::number(dl_sum_rate(fs.rate_coeffs, rep.reported.tau_dl)) << "\n"
            << "iterations: " << rep.result.iterations << "\n"
            << "kkt_residual: " << csv::number(rep.result.kkt_residual) << "\n"
            << "tau_dl: " << csv::join(rep.reported.tau_dl) << "\n"
            << "tau_ul: " << csv::join(rep.reported.tau_ul) << "\n";
  if (o.oracle) {
    if (fs.users() > 2) {
      std::cerr << "warning: --oracle supports at most 2 users; skipped\n";
    } else {
      const auto oracle = grid_search(rep.scenario.channels, fs, GridSpec::for_users(fs.users()));
      const auto cmp = compare(rep.result, oracle.objective, 1e-3);
      std::cout << "oracle_objective: " << csv::number(oracle.objective) << "\n"
                << "oracle_gap: " << csv::number(cmp.gap) << "\n"
                << "oracle_check: " << (cmp.pass ? "pass" : "fail") << "\n";
    }
  }
  return 0;
}

int run_sweep_cmd(const CommonOptions& o) {
  const auto cfg = resolve_config(o);
  const auto result = run_sweep(cfg, {.oracle = o.oracle});
  const std::filesystem::path out(cfg.output_dir);
  write_file(out / "sweep_rows.csv", [&](std::ostream& os) { write_sweep_rows(os, result.rows); });
  write_file(out / "sweep_agg.csv", [&](std::ostream& os) { write_sweep_aggregates(os, result.aggregates); });
  std::cout << "wrote " << result.rows.size() << " rows to " << (out / "sweep_rows.csv").string() << " and "
            << (out / "sweep_agg.csv").string() << "\n";
  return result.all_infeasible() ? kExitInfeasible : 0;
}

int run_report(const CommonOptions& o) {
  const auto cfg = resolve_config(o);
  const auto rep = allocation_report(cfg);
  for (const auto& w : rep.scenario.warnings) std::cerr << "warning: " << w << '\n';
  const std::filesystem::path path = std::filesystem::path(cfg.output_dir) / "allocation_report.csv";
  write_file(path, [&](std::ostream& os) { write_allocation_report(os, rep); });
  std::cout << "wrote " << path.string() << " (status " << to_string(rep.result.status) << ")\n";
  return rep.result.status == DcaStatus::infeasible ? kExitInfeasible : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink secrecy time-slot allocation for hybrid VLC/RF with lightwave energy harvesting"};
  app.require_subcommand(1);

  CommonOptions solve_opts, sweep_opts, report_opts;
  auto* solve = app.add_subcommand("solve", "Solve one seeded scenario and print the allocation");
  add_common(solve, solve_opts, false, true, false);
  auto* sweep = app.add_subcommand("sweep", "Run an r_min / K sweep and write sweep_rows.csv and sweep_agg.csv");
  add_common(sweep, sweep_opts, true, true, true);
  auto* report = app.add_subcommand("report", "Write allocation_report.csv for one seeded scenario");
  add_common(report, report_opts, false, false, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return run_solve(solve_opts);
    if (*sweep) return run_sweep_cmd(sweep_opts);
    if (*report) return run_report(report_opts);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
