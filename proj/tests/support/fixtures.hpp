#pragma once

// Synthetic scenarios with chosen a_k, a_E,k and DL rate coefficients.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "slipt/feasible_set.hpp"
#include "slipt/link_budget.hpp"

namespace fixtures {

/// g = eta = I_D = sigma_ul = sigma_e = 1, so a = h^2 and a_E = h_e^2; the DL
/// noise is set so dl_rate_coefficients returns c.
inline slipt::ScenarioChannels channels(const std::vector<double>& a, const std::vector<double>& a_e,
                                        const std::vector<double>& c) {
  slipt::ScenarioChannels s;
  s.eta = 1.0;
  s.i_d = 1.0;
  s.p_led = 1.0;
  s.sigma2_e = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s.g.push_back(1.0);
    s.h.push_back(std::sqrt(a[k]));
    s.h_e.push_back(std::sqrt(a_e[k]));
    s.sigma2_ul.push_back(1.0);
    s.sigma2_dl.push_back(std::numbers::e / (2.0 * std::numbers::pi) / (std::exp2(c[k]) - 1.0));
  }
  return s;
}

struct Synthetic {
  std::vector<double> a, a_e, c;
  double r_min = 0.0;

  slipt::RateCoefficients rates() const { return {a, a_e}; }
  slipt::FeasibleSet feasible() const { return {c, r_min}; }
};

/// a, a_E log-uniform in [0.1, 1e3]; c uniform in [1, 12]; r_min uniform in
/// [0, max_fraction * max c].
inline Synthetic random_synthetic(std::mt19937_64& gen, std::size_t users, double max_fraction = 0.9) {
  std::uniform_real_distribution<double> log_a(std::log(0.1), std::log(1e3)), cc(1.0, 12.0), u(0.0, 1.0);
  Synthetic s;
  for (std::size_t k = 0; k < users; ++k) {
    s.a.push_back(std::exp(log_a(gen)));
    s.a_e.push_back(std::exp(log_a(gen)));
    s.c.push_back(cc(gen));
  }
  double best = 0.0;
  for (double v : s.c) best = std::max(best, v);
  s.r_min = u(gen) * max_fraction * best;
  return s;
}

}  // namespace fixtures
