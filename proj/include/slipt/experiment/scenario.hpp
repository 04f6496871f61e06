#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "slipt/experiment/config.hpp"
#include "slipt/feasible_set.hpp"
#include "slipt/link_budget.hpp"
#include "slipt/rf_channel.hpp"
#include "slipt/rng.hpp"
#include "slipt/vlc_channel.hpp"

namespace slipt::experiment {

// Stream tags under derive_seed(seed, trial, tag).
inline constexpr std::uint64_t kGeometryStream = 1;
inline constexpr std::uint64_t kFadingStream = 2;
inline constexpr std::uint64_t kSolverStream = 3;

struct Scenario {
  ScenarioChannels channels;
  FeasibleSet feasible;
  std::vector<Vec3> user_positions;
  Vec3 eve_position;
  std::vector<std::string> warnings;
};

/// r_min for single-scenario runs.
inline double resolve_r_min(const ProblemConfig& p, const std::vector<double>& c) {
  if (p.r_min) return *p.r_min;
  return p.r_min_fraction * *std::max_element(c.begin(), c.end());
}

/// Deterministic per (cfg, users, trial). Geometry draws (random users, then
/// a random Eve) and fading draws (per user: legitimate then eavesdropper)
/// use separate streams, so explicit positions keep geometry fixed across
/// trials. The feasible set uses cfg.problem's r_min.
inline Scenario generate_scenario(const ExperimentConfig& cfg, int users, std::uint64_t trial) {
  const auto k = static_cast<std::size_t>(users);
  Scenario sc;
  RandomStream geometry(derive_seed(cfg.seed, trial, kGeometryStream));
  RandomStream fading(derive_seed(cfg.seed, trial, kFadingStream));

  if (!cfg.user_positions.empty()) {
    if (cfg.user_positions.size() != k)
      throw ConfigError("users.positions", "arity does not match the requested user count");
    sc.user_positions = cfg.user_positions;
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      const double x = geometry.uniform(0.0, cfg.room.width);
      const double y = geometry.uniform(0.0, cfg.room.depth);
      sc.user_positions.push_back({x, y, cfg.user_height});
    }
  }
  if (cfg.eve_position) {
    sc.eve_position = *cfg.eve_position;
  } else {
    const double x = geometry.uniform(0.0, cfg.room.width);
    const double y = geometry.uniform(0.0, cfg.room.depth);
    sc.eve_position = {x, y, cfg.eve_height};
  }

  auto& ch = sc.channels;
  ch.sigma2_e = cfg.noise.eve_ul;
  ch.eta = cfg.eta;
  ch.i_d = cfg.led.dc_offset;
  ch.p_led = cfg.led.p_led;
  for (std::size_t i = 0; i < k; ++i) {
    const UserTerminal ut{static_cast<int>(i), sc.user_positions[i], cfg.pd};
    const double g = vlc_channel_gain(cfg.led, ut);
    if (g == 0.0)
      sc.warnings.push_back("user " + std::to_string(i) + " is outside the LED/PD field of view (g = 0)");
    ch.g.push_back(g);
    ch.h.push_back(sample_rician_gain(cfg.rician, distance(sc.user_positions[i], cfg.ap_position), fading).h_mag);
    ch.h_e.push_back(sample_rician_gain(cfg.rician, distance(sc.user_positions[i], sc.eve_position), fading).h_mag);
    ch.sigma2_dl.push_back(cfg.noise.dl);
    ch.sigma2_ul.push_back(cfg.noise.ul);
  }
  ch.validate();

  auto c = dl_rate_coefficients(ch);
  const double r_min = resolve_r_min(cfg.problem, c);
  sc.feasible = FeasibleSet(std::move(c), r_min);
  return sc;
}

}  // namespace slipt::experiment
