#pragma once

// The time-slot polytope
//   sum tau_dl <= 1,  sum tau_ul <= 1,  tau >= 0,  c . tau_dl >= r_min
// and the Euclidean projection onto its working version (tau_ul >= floor).
//
// The two blocks separate. The UL block is a shifted capped simplex. The DL
// block is the capped simplex cut by one halfspace; its projection is
// z(mu) = Pi_simplex(p + mu c) with the halfspace multiplier mu >= 0 found by
// a safeguarded root search (c . z(mu) is nondecreasing in mu). Both blocks
// also accept a diagonal metric, which the inner solver uses for scaling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "slipt/link_budget.hpp"

namespace slipt {

enum class Feasibility { feasible, infeasible };

/// Projects p onto {z >= 0, sum z <= cap} in place.
inline void project_capped_simplex(std::span<double> p, double cap) {
  double pos_sum = 0.0;
  for (double v : p) pos_sum += std::max(v, 0.0);
  if (pos_sum <= cap) {
    for (double& v : p) v = std::max(v, 0.0);
    return;
  }
  // Find theta > 0 with sum max(p - theta, 0) = cap.
  std::vector<double> sorted(p.begin(), p.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumsum += sorted[i];
    const double t = (cumsum - cap) / static_cast<double>(i + 1);
    if (i + 1 == sorted.size() || sorted[i + 1] <= t) {
      theta = t;
      break;
    }
  }
  for (double& v : p) v = std::max(v - theta, 0.0);
}

/// Same set, distance sum_i w_i (z_i - p_i)^2 with w > 0:
/// z_i = max(p_i - theta / w_i, 0). Returns theta (0 when the cap is slack).
inline double project_capped_simplex(std::span<double> p, std::span<const double> w, double cap) {
  double pos_sum = 0.0;
  for (double v : p) pos_sum += std::max(v, 0.0);
  if (pos_sum <= cap) {
    for (double& v : p) v = std::max(v, 0.0);
    return 0.0;
  }
  // z_i > 0 iff theta < p_i w_i. Walk the breakpoints downwards.
  std::vector<std::size_t> order;
  order.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) order.push_back(i);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return p[i] * w[i] > p[j] * w[j]; });
  double sum_p = 0.0, sum_inv_w = 0.0, theta = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    sum_p += p[order[r]];
    sum_inv_w += 1.0 / w[order[r]];
    theta = (sum_p - cap) / sum_inv_w;
    if (r + 1 == order.size() || p[order[r + 1]] * w[order[r + 1]] <= theta) break;
  }
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::max(p[i] - theta / w[i], 0.0);
  return theta;
}

struct FeasibleSet {
  std::vector<double> rate_coeffs;  // c
  double r_min = 0.0;
  double tau_floor = 1e-9;

  FeasibleSet() = default;
  FeasibleSet(std::vector<double> c, double r_min_, double floor = 1e-9)
      : rate_coeffs(std::move(c)), r_min(r_min_), tau_floor(floor) {
    if (!(r_min >= 0.0)) throw std::invalid_argument("r_min must be >= 0");
    if (rate_coeffs.empty()) throw std::invalid_argument("feasible set needs at least one user");
    if (!(tau_floor >= 0.0 && tau_floor * static_cast<double>(users()) < 1.0))
      throw std::invalid_argument("tau_floor must satisfy 0 <= K*floor < 1");
  }

  std::size_t users() const { return rate_coeffs.size(); }

  /// Largest achievable DL sum rate: all DL time to the best user.
  double rate_bound() const { return *std::max_element(rate_coeffs.begin(), rate_coeffs.end()); }

  /// Lowest index attaining rate_bound().
  std::size_t best_user() const {
    return static_cast<std::size_t>(std::max_element(rate_coeffs.begin(), rate_coeffs.end()) -
                                    rate_coeffs.begin());
  }

  /// Largest violation of the original constraints (no floor) at packed x.
  double violation(std::span<const double> x) const {
    const std::size_t n = users();
    double worst = 0.0, sum_dl = 0.0, sum_ul = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      worst = std::max({worst, -x[k], -x[n + k]});
      sum_dl += x[k];
      sum_ul += x[n + k];
    }
    worst = std::max({worst, sum_dl - 1.0, sum_ul - 1.0});
    return std::max(worst, r_min - dl_sum_rate(rate_coeffs, x.first(n)));
  }

  double violation(const Allocation& a) const { return violation(a.flatten()); }

  /// Projects packed x onto the working polytope (tau_ul >= floor) in place.
  void project(std::span<double> x) const {
    const std::vector<double> unit(x.size(), 1.0);
    project(x, unit);
  }

  /// Projection in the metric sum_i w_i dx_i^2 (w > 0, packed like x).
  /// Widely spread weights cost digits (z_i = p_i - theta / w_i cancels), so
  /// a block that comes out infeasible is finished with the unit metric.
  void project(std::span<double> x, std::span<const double> w) const {
    const std::size_t n = users();
    const double ul_cap = 1.0 - tau_floor * static_cast<double>(n);
    auto dl = x.first(n);
    project_dl(dl, w.first(n));
    if (block_sum(dl) > 1.0 || dl_sum_rate(rate_coeffs, dl) < r_min) project_dl(dl, std::vector<double>(n, 1.0));
    auto ul = x.subspan(n, n);
    for (double& v : ul) v -= tau_floor;
    project_capped_simplex(ul, w.subspan(n, n), ul_cap);
    if (block_sum(ul) > ul_cap) project_capped_simplex(ul, ul_cap);
    for (double& v : ul) v += tau_floor;
  }

 private:
  static double block_sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

  // z(mu) = argmin over the capped simplex of |z - p - mu c / w|_w. c . z(mu)
  // is nondecreasing and piecewise linear in mu; each piece is fixed by the
  // positive set and whether the cap binds, so once a bracket end sits on the
  // root's piece the linear model there lands on the root exactly.
  void project_dl(std::span<double> p, std::span<const double> w) const {
    const std::size_t n = p.size();
    const std::vector<double> origin(p.begin(), p.end());
    std::vector<double> z(n);
    struct Piece {
      double rate, slope;
    };
    auto eval = [&](double mu) {
      for (std::size_t k = 0; k < n; ++k) z[k] = origin[k] + mu * rate_coeffs[k] / w[k];
      const double theta = project_capped_simplex(z, w, 1.0);
      double rate = 0.0, cc = 0.0, c1 = 0.0, inv_w = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        rate += rate_coeffs[k] * z[k];
        if (z[k] > 0.0) {
          cc += rate_coeffs[k] * rate_coeffs[k] / w[k];
          c1 += rate_coeffs[k] / w[k];
          inv_w += 1.0 / w[k];
        }
      }
      const double slope = theta > 0.0 ? cc - c1 * c1 / inv_w : cc;
      return Piece{rate, slope};
    };
    Piece lo_piece = eval(0.0);
    if (lo_piece.rate >= r_min) {
      std::copy(z.begin(), z.end(), p.begin());
      return;
    }
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200 && eval(hi).rate < r_min; ++i) {
      lo = hi;
      hi *= 2.0;
    }
    if (lo > 0.0) lo_piece = eval(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
      double mid = 0.5 * (lo + hi);
      if (lo_piece.slope > 0.0) {
        const double guess = lo + (r_min - lo_piece.rate) / lo_piece.slope;
        if (guess > lo && guess < hi) mid = guess;
      }
      const Piece m = eval(mid);
      if (m.rate >= r_min) {
        hi = mid;
        if (m.rate - r_min <= 1e-15 * r_min) break;
      } else {
        lo = mid;
        lo_piece = m;
      }
    }
    eval(hi);
    std::copy(z.begin(), z.end(), p.begin());
  }
};

inline Feasibility check_feasibility(const FeasibleSet& fs) {
  return fs.r_min <= fs.rate_bound() ? Feasibility::feasible : Feasibility::infeasible;
}

}  // namespace slipt
