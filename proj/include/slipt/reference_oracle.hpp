#pragma once

// Brute-force grid search over the time-slot polytope for K <= 2, with local
// refinement around the incumbent. Used to cross-check the DC solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "slipt/dc_solver.hpp"
#include "slipt/feasible_set.hpp"
#include "slipt/link_budget.hpp"

namespace slipt {

struct GridSpec {
  int resolution = 1024;  // points per axis
  int refine_rounds = 3;
  double refine_shrink = 0.1;  // box half-width multiplier per round

  void validate() const {
    if (resolution < 16) throw std::invalid_argument("grid resolution must be >= 16");
    if (refine_rounds < 0) throw std::invalid_argument("refine_rounds must be >= 0");
    if (!(refine_shrink > 0.0 && refine_shrink < 1.0)) throw std::invalid_argument("refine_shrink must be in (0, 1)");
  }

  static GridSpec for_users(std::size_t k) { return k <= 1 ? GridSpec{1024, 3, 0.1} : GridSpec{64, 3, 0.1}; }
};

struct OracleResult {
  Allocation allocation;
  double objective = -std::numeric_limits<double>::infinity();
  std::vector<double> round_best;  // incumbent objective after each round
  long long evaluated = 0;
};

namespace detail {

inline constexpr double kGridFeasTol = 1e-12;

inline bool grid_point_feasible(const FeasibleSet& fs, const std::vector<double>& x) {
  const std::size_t n = fs.users();
  double sum_dl = 0.0, sum_ul = 0.0, rate = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum_dl += x[k];
    sum_ul += x[n + k];
    rate += fs.rate_coeffs[k] * x[k];
  }
  return sum_dl <= 1.0 + kGridFeasTol && sum_ul <= 1.0 + kGridFeasTol &&
         rate >= fs.r_min - kGridFeasTol * std::max(1.0, fs.r_min);
}

struct GridBest {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<double> x;
  long long evaluated = 0;
};

// Exhaustive search over the tensor grid with per-axis [lo, hi].
inline GridBest search_box(const RateCoefficients& rc, const FeasibleSet& fs, const std::vector<double>& lo,
                           const std::vector<double>& hi, int res) {
  const std::size_t dims = lo.size();
  auto coord = [&](std::size_t d, int i) {
    if (i == res - 1) return hi[d];
    return lo[d] + (hi[d] - lo[d]) * static_cast<double>(i) / static_cast<double>(res - 1);
  };
  std::vector<GridBest> per_outer(static_cast<std::size_t>(res));

#pragma omp parallel for schedule(dynamic)
  for (int i0 = 0; i0 < res; ++i0) {
    GridBest& best = per_outer[static_cast<std::size_t>(i0)];
    std::vector<int> idx(dims, 0);
    std::vector<double> x(dims);
    idx[0] = i0;
    while (true) {
      for (std::size_t d = 0; d < dims; ++d) x[d] = coord(d, idx[d]);
      if (grid_point_feasible(fs, x)) {
        const double v = objective_value(rc, x);
        ++best.evaluated;
        if (v > best.value) {
          best.value = v;
          best.x = x;
        }
      }
      std::size_t d = 1;
      while (d < dims && ++idx[d] == res) idx[d++] = 0;
      if (d >= dims) break;
    }
  }

  GridBest out;
  for (auto& b : per_outer) {
    out.evaluated += b.evaluated;
    if (b.value > out.value) {
      out.value = b.value;
      out.x = std::move(b.x);
    }
  }
  return out;
}

}  // namespace detail

inline OracleResult grid_search(const RateCoefficients& rc, const FeasibleSet& fs, const GridSpec& spec) {
  spec.validate();
  const std::size_t k = fs.users();
  if (k > 2) throw std::invalid_argument("grid_search supports at most 2 users");
  if (check_feasibility(fs) == Feasibility::infeasible) throw std::invalid_argument("grid_search: infeasible set");
  const std::size_t dims = 2 * k;

  std::vector<double> lo(dims, 0.0), hi(dims, 1.0);
  auto best = detail::search_box(rc, fs, lo, hi, spec.resolution);
  if (best.x.empty()) throw std::runtime_error("grid_search: no feasible grid point");

  OracleResult out;
  out.evaluated = best.evaluated;
  out.round_best.push_back(best.value);
  double half_width = 1.0;
  for (int r = 0; r < spec.refine_rounds; ++r) {
    half_width *= spec.refine_shrink;
    for (std::size_t d = 0; d < dims; ++d) {
      lo[d] = std::max(0.0, best.x[d] - half_width);
      hi[d] = std::min(1.0, best.x[d] + half_width);
    }
    auto local = detail::search_box(rc, fs, lo, hi, spec.resolution);
    out.evaluated += local.evaluated;
    if (local.value > best.value) {
      best.value = local.value;
      best.x = std::move(local.x);
    }
    out.round_best.push_back(best.value);
  }
  out.allocation = Allocation::unflatten(best.x);
  out.objective = best.value;
  return out;
}

inline OracleResult grid_search(const ScenarioChannels& s, const FeasibleSet& fs, const GridSpec& spec) {
  return grid_search(RateCoefficients(s), fs, spec);
}

struct OracleComparison {
  bool pass;
  double gap;  // oracle - dca; negative when the solver beats the grid
  double allowed;
};

/// One-sided: the solver may beat the grid, but may not fall short of it by
/// more than rel_tol * max(1, |oracle|).
inline OracleComparison compare(const DcaResult& dca, double oracle_objective, double rel_tol) {
  const double allowed = rel_tol * std::max(1.0, std::abs(oracle_objective));
  const double gap = oracle_objective - dca.objective;
  return {dca.objective >= oracle_objective - allowed, gap, allowed};
}

}  // namespace slipt
