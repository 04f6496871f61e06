#pragma once

// DC algorithm for maximizing sum_k (u_k - v_k) over the time-slot polytope.
//
// Each outer step linearizes the concave subtrahend v at the current iterate
// (y = grad v(x_n)) and maximizes the concave surrogate u(x) - <y, x> over the
// polytope, warm-started at x_n. Concavity of v gives
//   f(x_{n+1}) >= u(x_{n+1}) - <y, x_{n+1}> - v(x_n) + <y, x_n> >= f(x_n)
// whenever the surrogate does not decrease, so the trace is monotone.
//
// The surrogate is solved by projected gradient ascent with an Armijo
// backtracking search along the projection arc and Barzilai-Borwein trial steps.
// Steps and projections use the diagonal of -Hessian(u) as the metric: the
// UL curvature grows like 1/tau_ul, so the unscaled method crawls once a UL
// slot heads for the floor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "slipt/feasible_set.hpp"
#include "slipt/link_budget.hpp"
#include "slipt/rng.hpp"

namespace slipt {

struct DcaSettings {
  double epsilon = 1e-8;  // max-norm of the iterate change
  int max_iterations = 500;
  double subproblem_tolerance = 1e-9;  // projected-gradient residual
  int subproblem_max_iterations = 20000;
  int restarts = 5;  // total starts for dca_solve_multistart
  std::uint64_t seed = 0x5eed;

  void validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("solver.epsilon must be > 0");
    if (max_iterations < 1) throw std::invalid_argument("solver.max_iterations must be >= 1");
    if (!(subproblem_tolerance > 0.0)) throw std::invalid_argument("solver.subproblem_tolerance must be > 0");
    if (subproblem_max_iterations < 1)
      throw std::invalid_argument("solver.subproblem_max_iterations must be >= 1");
    if (restarts < 1) throw std::invalid_argument("solver.restarts must be >= 1");
  }
};

enum class DcaStatus { converged, max_iterations, infeasible };

inline const char* to_string(DcaStatus s) {
  switch (s) {
    case DcaStatus::converged: return "converged";
    case DcaStatus::max_iterations: return "max_iterations";
    case DcaStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

struct DcaTraceEntry {
  double objective;
  double step_norm;
};

struct DcaResult {
  Allocation allocation;
  double objective = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  DcaStatus status = DcaStatus::infeasible;
  std::vector<DcaTraceEntry> trace;
  double kkt_residual = std::numeric_limits<double>::quiet_NaN();
};

/// Thrown when the inner ascent hits its iteration cap; carries the best iterate.
class SubproblemError : public std::runtime_error {
 public:
  SubproblemError(std::vector<double> best, double residual)
      : std::runtime_error("subproblem iteration cap exceeded (residual " + std::to_string(residual) + ")"),
        best_(std::move(best)),
        residual_(residual) {}

  const std::vector<double>& best_iterate() const { return best_; }
  double residual() const { return residual_; }

 private:
  std::vector<double> best_;
  double residual_;
};

namespace detail {

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double surrogate_value(const RateCoefficients& rc, std::span<const double> y, std::span<const double> x) {
  return part_value(rc, Part::u, x) - dot(y, x);
}

inline void surrogate_gradient(const RateCoefficients& rc, std::span<const double> y, std::span<const double> x,
                               std::span<double> g) {
  part_gradient(rc, Part::u, x, g);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= y[i];
}

inline double projected_residual(const FeasibleSet& fs, std::span<const double> x, std::span<const double> g,
                                 std::vector<double>& scratch) {
  scratch.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) scratch[i] = x[i] + g[i];
  fs.project(scratch);
  return max_abs_diff(scratch, x);
}

// Diagonal of -Hessian(u), floored relative to its largest entry so linear
// directions get long but finite steps.
inline void curvature_metric(const RateCoefficients& rc, std::span<const double> x, std::span<double> w) {
  const std::size_t n = rc.users();
  double top = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = rc.a[k], s = 1.0 - x[k], t = x[n + k];
    const double den = t + s * a;
    const double den2 = den * den * kLn2;
    w[k] = a * a * t / den2;
    w[n + k] = (s * a) * (s * a) / (t * den2);
    top = std::max({top, w[k], w[n + k]});
  }
  const double floor = top > 0.0 ? 1e-10 * top : 1.0;
  for (double& v : w)
    if (!(v >= floor)) v = floor;
}

}  // namespace detail

struct SubproblemResult {
  std::vector<double> x;
  int iterations = 0;
  double residual = 0.0;
};

/// Maximizes u(x) - <y, x> over the working polytope from `warm_start`
/// (packed). The surrogate value never drops below its value at the
/// projected warm start.
inline SubproblemResult solve_subproblem(const RateCoefficients& rc, const FeasibleSet& fs,
                                         std::span<const double> y, std::span<const double> warm_start,
                                         double tolerance, int max_iterations) {
  constexpr double kArmijo = 1e-4;
  const std::size_t n = warm_start.size();
  std::vector<double> x(warm_start.begin(), warm_start.end());
  fs.project(x);

  std::vector<double> g(n), trial(n), g_trial(n), w(n), scratch;
  detail::surrogate_gradient(rc, y, x, g);
  double value = detail::surrogate_value(rc, y, x);
  double step = 1.0;

  for (int it = 0; it < max_iterations; ++it) {
    const double residual = detail::projected_residual(fs, x, g, scratch);
    if (residual <= tolerance) return {std::move(x), it, residual};

    detail::curvature_metric(rc, x, w);
    // Rounding noise of the surrogate value; gains below it cannot be verified.
    double noise = std::abs(value);
    for (std::size_t i = 0; i < n; ++i) noise += std::abs(y[i] * x[i]);
    noise *= 1e-15;
    bool accepted = false;
    double trial_value = value;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * g[i] / w[i];
      fs.project(trial, w);
      double predicted = 0.0;
      for (std::size_t i = 0; i < n; ++i) predicted += g[i] * (trial[i] - x[i]);
      if (predicted <= noise && bt > 0) break;
      trial_value = detail::surrogate_value(rc, y, trial);
      if (predicted > noise && trial_value >= value + kArmijo * predicted) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    // No verifiable ascent left along the arc: numerically stationary.
    if (!accepted) return {std::move(x), it, residual};

    detail::surrogate_gradient(rc, y, trial, g_trial);
    double ss = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = trial[i] - x[i];
      ss += w[i] * dx * dx;
      sy -= dx * (g_trial[i] - g[i]);
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e10) : std::min(2.0 * step, 1e10);
    x.swap(trial);
    g.swap(g_trial);
    value = trial_value;
  }
  const double residual = detail::projected_residual(fs, x, g, scratch);
  if (residual <= tolerance) return {std::move(x), max_iterations, residual};
  throw SubproblemError(std::move(x), residual);
}

inline Allocation solve_subproblem(const ScenarioChannels& s, const FeasibleSet& fs, std::span<const double> y,
                                   const Allocation& warm_start, const DcaSettings& cfg = {}) {
  const RateCoefficients rc(s);
  const auto flat = warm_start.flatten();
  return Allocation::unflatten(
      solve_subproblem(rc, fs, y, flat, cfg.subproblem_tolerance, cfg.subproblem_max_iterations).x);
}

/// All DL time needed for r_min (plus a small margin) on the best-rate user,
/// UL split evenly. Ties go to the lowest index.
inline Allocation initial_allocation(const FeasibleSet& fs) {
  if (check_feasibility(fs) == Feasibility::infeasible)
    throw std::invalid_argument("initial_allocation: r_min exceeds the achievable DL sum rate");
  const std::size_t n = fs.users();
  const std::size_t j = fs.best_user();
  const double cj = fs.rate_coeffs[j];
  const double needed = cj > 0.0 ? std::min(1.0, fs.r_min / cj) : 0.0;
  Allocation a{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0 / static_cast<double>(n))};
  a.tau_dl[j] = std::min(1.0, needed + 1e-6);
  return a;
}

/// Norm of the tangent-cone projection of grad f at x, computed as
/// (P(x + t grad) - x) / t for small t (exact for polyhedra once t is small).
inline double kkt_residual(const RateCoefficients& rc, const FeasibleSet& fs, std::span<const double> x_in) {
  std::vector<double> x(x_in.begin(), x_in.end());
  fs.project(x);
  const std::size_t n = x.size();
  std::vector<double> g(n), gv(n);
  part_gradient(rc, Part::u, x, g);
  part_gradient(rc, Part::v, x, gv);
  double gmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    g[i] -= gv[i];
    gmax = std::max(gmax, std::abs(g[i]));
  }
  const double t = 1e-7 / std::max(1.0, gmax);
  std::vector<double> moved(n);
  for (std::size_t i = 0; i < n; ++i) moved[i] = x[i] + t * g[i];
  fs.project(moved);
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (moved[i] - x[i]) / t;
    sq += d * d;
  }
  return std::sqrt(sq);
}

inline double kkt_residual(const ScenarioChannels& s, const FeasibleSet& fs, const Allocation& x) {
  return kkt_residual(RateCoefficients(s), fs, x.flatten());
}

inline DcaResult dca_solve(const RateCoefficients& rc, const FeasibleSet& fs, const DcaSettings& cfg,
                           std::span<const double> start) {
  cfg.validate();
  DcaResult result;
  const std::size_t n = 2 * fs.users();
  if (check_feasibility(fs) == Feasibility::infeasible) {
    result.allocation = Allocation::unflatten(std::vector<double>(n, 0.0));
    result.status = DcaStatus::infeasible;
    return result;
  }

  std::vector<double> x(start.begin(), start.end());
  fs.project(x);
  double fx = objective_value(rc, x);
  result.trace.push_back({fx, 0.0});
  result.status = DcaStatus::max_iterations;

  std::vector<double> y(n);
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    part_gradient(rc, Part::v, x, y);
    std::vector<double> next;
    try {
      next = solve_subproblem(rc, fs, y, x, cfg.subproblem_tolerance, cfg.subproblem_max_iterations).x;
    } catch (const SubproblemError& e) {
      next = e.best_iterate();
    }
    const double step = detail::max_abs_diff(next, x);
    x = std::move(next);
    fx = objective_value(rc, x);
    result.trace.push_back({fx, step});
    result.iterations = it;
    if (step <= cfg.epsilon) {
      result.status = DcaStatus::converged;
      break;
    }
  }
  result.allocation = Allocation::unflatten(x);
  result.objective = fx;
  result.kkt_residual = kkt_residual(rc, fs, x);
  return result;
}

inline DcaResult dca_solve(const ScenarioChannels& s, const FeasibleSet& fs, const DcaSettings& cfg = {}) {
  const RateCoefficients rc(s);
  if (check_feasibility(fs) == Feasibility::infeasible) return dca_solve(rc, fs, cfg, {});
  return dca_solve(rc, fs, cfg, initial_allocation(fs).flatten());
}

/// Random feasible start: DL fractions of a random budget, UL a random split
/// of the whole frame; projected to enforce the rate constraint.
inline std::vector<double> random_feasible_point(const FeasibleSet& fs, RandomStream& rng) {
  const std::size_t k = fs.users();
  std::vector<double> x(2 * k);
  double dl_sum = 0.0, ul_sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = -std::log(1.0 - rng.uniform());
    x[k + i] = -std::log(1.0 - rng.uniform());
    dl_sum += x[i];
    ul_sum += x[k + i];
  }
  const double dl_budget = rng.uniform();
  for (std::size_t i = 0; i < k; ++i) {
    x[i] *= dl_budget / dl_sum;
    x[k + i] /= ul_sum;
  }
  fs.project(x);
  return x;
}

struct MultiStartResult {
  DcaResult best;
  std::vector<DcaResult> runs;
};

/// cfg.restarts starts: initial_allocation first, then seeded random points.
/// Keeps the highest objective; ties keep the earliest start.
inline MultiStartResult dca_solve_multistart(const RateCoefficients& rc, const FeasibleSet& fs,
                                             const DcaSettings& cfg) {
  MultiStartResult out;
  if (check_feasibility(fs) == Feasibility::infeasible) {
    out.best = dca_solve(rc, fs, cfg, {});
    out.runs.push_back(out.best);
    return out;
  }
  RandomStream rng(derive_seed(cfg.seed, fs.users(), 0xdca));
  for (int r = 0; r < cfg.restarts; ++r) {
    const auto start = r == 0 ? initial_allocation(fs).flatten() : random_feasible_point(fs, rng);
    out.runs.push_back(dca_solve(rc, fs, cfg, start));
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < out.runs.size(); ++r)
    if (out.runs[r].objective > out.runs[best].objective) best = r;
  out.best = out.runs[best];
  return out;
}

inline MultiStartResult dca_solve_multistart(const ScenarioChannels& s, const FeasibleSet& fs,
                                             const DcaSettings& cfg = {}) {
  return dca_solve_multistart(RateCoefficients(s), fs, cfg);
}

}  // namespace slipt
