#pragma once

// r_min / K sweeps with Monte-Carlo trials, the single-scenario allocation
// report, and their CSV writers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slipt/dc_solver.hpp"
#include "slipt/experiment/config.hpp"
#include "slipt/experiment/csv.hpp"
#include "slipt/experiment/scenario.hpp"
#include "slipt/reference_oracle.hpp"

namespace slipt::experiment {

inline constexpr double kReportSnap = 1e-6;

/// Zeroes UL fractions below 1e-6, and DL fractions below 1e-6 when that
/// keeps the rate constraint.
inline Allocation snap_for_report(const Allocation& x, const FeasibleSet& fs) {
  Allocation out = x;
  for (double& t : out.tau_ul)
    if (t < kReportSnap) t = 0.0;
  std::vector<double> dl = out.tau_dl;
  for (double& t : dl)
    if (t < kReportSnap) t = 0.0;
  if (dl_sum_rate(fs.rate_coeffs, dl) >= fs.r_min) out.tau_dl = std::move(dl);
  return out;
}

inline double clamped_secrecy_sum(const ScenarioChannels& s, const Allocation& x) {
  double sum = 0.0;
  for (std::size_t k = 0; k < s.users(); ++k) sum += std::max(0.0, secrecy_capacity_user(s, k, x.tau_dl[k], x.tau_ul[k]));
  return sum;
}

struct SweepRow {
  int users = 0;
  int sweep_index = 0;
  double sweep_value = 0.0;
  double r_min = 0.0;
  std::uint64_t trial = 0;
  DcaStatus status = DcaStatus::infeasible;
  double objective_bits = std::numeric_limits<double>::quiet_NaN();
  double clamped_secrecy_sum = std::numeric_limits<double>::quiet_NaN();
  double dl_rate_achieved = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> tau_dl;
  std::vector<double> tau_ul;
  double oracle_objective = std::numeric_limits<double>::quiet_NaN();
  std::optional<bool> oracle_pass;
};

struct SweepAggregate {
  int users = 0;
  int sweep_index = 0;
  double sweep_value = 0.0;
  int trials = 0;
  int feasible_trials = 0;
  double mean_r_min = std::numeric_limits<double>::quiet_NaN();
  double mean_objective = std::numeric_limits<double>::quiet_NaN();
  double std_objective = std::numeric_limits<double>::quiet_NaN();
  double mean_clamped = std::numeric_limits<double>::quiet_NaN();
  double mean_dl_rate = std::numeric_limits<double>::quiet_NaN();
};

struct SweepOptions {
  bool oracle = false;
  double oracle_rel_tol = 1e-3;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // ordered by (users, sweep_index, trial)
  std::vector<SweepAggregate> aggregates;

  bool all_infeasible() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.status == DcaStatus::infeasible; });
  }
};

inline SweepRow solve_row(const Scenario& sc, const ExperimentConfig& cfg, double r_min, std::uint64_t trial,
                          const SweepOptions& opts) {
  SweepRow row;
  row.users = static_cast<int>(sc.channels.users());
  row.trial = trial;
  row.r_min = r_min;
  const FeasibleSet fs(sc.feasible.rate_coeffs, r_min, sc.feasible.tau_floor);
  DcaSettings solver = cfg.solver;
  solver.seed = derive_seed(cfg.seed, trial, kSolverStream);
  const RateCoefficients rc(sc.channels);
  const auto result = dca_solve_multistart(rc, fs, solver).best;
  row.status = result.status;
  row.iterations = result.iterations;
  if (result.status == DcaStatus::infeasible) return row;

  const Allocation shown = snap_for_report(result.allocation, fs);
  row.objective_bits = result.objective;
  row.clamped_secrecy_sum = clamped_secrecy_sum(sc.channels, shown);
  row.dl_rate_achieved = dl_sum_rate(fs.rate_coeffs, shown.tau_dl);
  row.kkt_residual = result.kkt_residual;
  row.tau_dl = shown.tau_dl;
  row.tau_ul = shown.tau_ul;
  if (opts.oracle && fs.users() <= 2) {
    const auto oracle = grid_search(rc, fs, GridSpec::for_users(fs.users()));
    row.oracle_objective = oracle.objective;
    row.oracle_pass = compare(result, oracle.objective, opts.oracle_rel_tol).pass;
  }
  return row;
}

inline std::vector<SweepAggregate> aggregate(const std::vector<SweepRow>& rows) {
  std::vector<SweepAggregate> out;
  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].users == rows[i].users && rows[j].sweep_index == rows[i].sweep_index) ++j;
    SweepAggregate a;
    a.users = rows[i].users;
    a.sweep_index = rows[i].sweep_index;
    a.sweep_value = rows[i].sweep_value;
    a.trials = static_cast<int>(j - i);
    double sum_obj = 0.0, sum_clamped = 0.0, sum_rate = 0.0, sum_rmin = 0.0;
    for (std::size_t r = i; r < j; ++r) {
      sum_rmin += rows[r].r_min;
      if (rows[r].status == DcaStatus::infeasible) continue;
      ++a.feasible_trials;
      sum_obj += rows[r].objective_bits;
      sum_clamped += rows[r].clamped_secrecy_sum;
      sum_rate += rows[r].dl_rate_achieved;
    }
    a.mean_r_min = sum_rmin / a.trials;
    if (a.feasible_trials > 0) {
      const double n = a.feasible_trials;
      a.mean_objective = sum_obj / n;
      a.mean_clamped = sum_clamped / n;
      a.mean_dl_rate = sum_rate / n;
      double ss = 0.0;
      for (std::size_t r = i; r < j; ++r)
        if (rows[r].status != DcaStatus::infeasible) ss += (rows[r].objective_bits - a.mean_objective) * (rows[r].objective_bits - a.mean_objective);
      a.std_objective = a.feasible_trials > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    }
    out.push_back(a);
    i = j;
  }
  return out;
}

/// One task per (user count, trial); each task solves every sweep point on
/// its scenario. Rows are merged in (users, sweep_index, trial) order.
inline SweepResult run_sweep(const ExperimentConfig& cfg, const SweepOptions& opts = {}) {
  const auto user_counts = cfg.sweep_user_counts();
  const auto values = cfg.sweep.values();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t tasks = user_counts.size() * trials;
  std::vector<std::vector<SweepRow>> per_task(tasks);
  std::vector<std::string> errors(tasks);

#pragma omp parallel for schedule(dynamic)
  for (long long t = 0; t < static_cast<long long>(tasks); ++t) {
    const std::size_t task = static_cast<std::size_t>(t);
    const int users = user_counts[task / trials];
    const std::uint64_t trial = task % trials;
    try {
      const Scenario sc = generate_scenario(cfg, users, trial);
      const double bound = sc.feasible.rate_bound();
      for (std::size_t v = 0; v < values.size(); ++v) {
        const double r_min = cfg.sweep.mode == SweepMode::rmin_fraction ? values[v] * bound : values[v];
        SweepRow row = solve_row(sc, cfg, r_min, trial, opts);
        row.sweep_index = static_cast<int>(v);
        row.sweep_value = values[v];
        per_task[task].push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      errors[task] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error("sweep task failed: " + e);

  SweepResult out;
  for (std::size_t ki = 0; ki < user_counts.size(); ++ki)
    for (std::size_t v = 0; v < values.size(); ++v)
      for (std::size_t tr = 0; tr < trials; ++tr) out.rows.push_back(per_task[ki * trials + tr][v]);
  out.aggregates = aggregate(out.rows);
  return out;
}

inline void write_sweep_rows(std::ostream& os, const std::vector<SweepRow>& rows) {
  const std::vector<std::string> header{
      "users", "sweep_index", "sweep_value", "r_min", "trial", "status", "objective_bits", "clamped_secrecy_sum",
      "dl_rate_achieved", "iterations", "kkt_residual", "tau_dl", "tau_ul", "oracle_objective", "oracle_pass"};
  os << "# sweep_rows: one row per (users, sweep point, trial); tau_dl/tau_ul are ';'-separated per user\r\n";
  csv::write_row(os, header);
  for (const auto& r : rows) {
    csv::write_row(os, {std::to_string(r.users), std::to_string(r.sweep_index), csv::number(r.sweep_value),
                        csv::number(r.r_min), std::to_string(r.trial), to_string(r.status),
                        csv::number(r.objective_bits), csv::number(r.clamped_secrecy_sum),
                        csv::number(r.dl_rate_achieved), std::to_string(r.iterations), csv::number(r.kkt_residual),
                        csv::join(r.tau_dl), csv::join(r.tau_ul), csv::number(r.oracle_objective),
                        r.oracle_pass ? (*r.oracle_pass ? "pass" : "fail") : ""});
  }
}

inline void write_sweep_aggregates(std::ostream& os, const std::vector<SweepAggregate>& aggs) {
  os << "# sweep_agg: mean/stddev over feasible trials per (users, sweep point)\r\n";
  csv::write_row(os, {"users", "sweep_index", "sweep_value", "trials", "feasible_trials", "mean_r_min",
                      "mean_objective", "std_objective", "mean_clamped_secrecy", "mean_dl_rate"});
  for (const auto& a : aggs) {
    csv::write_row(os, {std::to_string(a.users), std::to_string(a.sweep_index), csv::number(a.sweep_value),
                        std::to_string(a.trials), std::to_string(a.feasible_trials), csv::number(a.mean_r_min),
                        csv::number(a.mean_objective), csv::number(a.std_objective), csv::number(a.mean_clamped),
                        csv::number(a.mean_dl_rate)});
  }
}

// ---- single-scenario allocation report ----

struct AllocationReport {
  Scenario scenario;
  DcaResult result;
  Allocation reported;  // snapped
};

inline AllocationReport allocation_report(const ExperimentConfig& cfg, std::uint64_t trial = 0) {
  AllocationReport rep{generate_scenario(cfg, cfg.users, trial), {}, {}};
  DcaSettings solver = cfg.solver;
  solver.seed = derive_seed(cfg.seed, trial, kSolverStream);
  rep.result = dca_solve_multistart(rep.scenario.channels, rep.scenario.feasible, solver).best;
  if (rep.result.status != DcaStatus::infeasible)
    rep.reported = snap_for_report(rep.result.allocation, rep.scenario.feasible);
  return rep;
}

inline void write_allocation_report(std::ostream& os, const AllocationReport& rep) {
  const auto& sc = rep.scenario;
  const auto& fs = sc.feasible;
  os << "# allocation_report: status=" << to_string(rep.result.status) << " r_min=" << csv::number(fs.r_min)
     << " objective_bits=" << csv::number(rep.result.objective) << " dl_rate="
     << (rep.reported.users() ? csv::number(dl_sum_rate(fs.rate_coeffs, rep.reported.tau_dl)) : std::string())
     << " iterations=" << rep.result.iterations << "\r\n";
  csv::write_row(os, {"user", "x", "y", "z", "g", "rate_coeff", "a", "a_e", "tau_dl", "tau_ul", "secrecy_bits",
                      "secrecy_clamped"});
  const bool have = rep.reported.users() == sc.channels.users();
  for (std::size_t k = 0; k < sc.channels.users(); ++k) {
    const auto& p = sc.user_positions[k];
    const double td = have ? rep.reported.tau_dl[k] : std::numeric_limits<double>::quiet_NaN();
    const double tu = have ? rep.reported.tau_ul[k] : std::numeric_limits<double>::quiet_NaN();
    const double cs = have ? secrecy_capacity_user(sc.channels, k, td, tu) : std::numeric_limits<double>::quiet_NaN();
    csv::write_row(os, {std::to_string(k), csv::number(p.x), csv::number(p.y), csv::number(p.z),
                        csv::number(sc.channels.g[k]), csv::number(fs.rate_coeffs[k]), csv::number(sc.channels.a(k)),
                        csv::number(sc.channels.a_e(k)), csv::number(td), csv::number(tu), csv::number(cs),
                        csv::number(have ? std::max(cs, 0.0) : cs)});
  }
}

inline void write_file(const std::filesystem::path& path, const auto& writer) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  writer(os);
}

}  // namespace slipt::experiment
