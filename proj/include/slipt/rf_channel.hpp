#pragma once

// Rician-faded uplink RF amplitudes.

#include <cmath>
#include <stdexcept>

#include "slipt/rng.hpp"

namespace slipt {

enum class RicianModel {
  standard,        // sqrt(K/(1+K)) LOS + sqrt(1/(1+K)) NLOS
  paper_verbatim,  // sqrt(K/(1+K)) on both terms
};

struct RicianConfig {
  double k_factor = 2.0;
  double los_reference_gain = 1e-3;  // amplitude at 1 m
  double path_loss_exponent = 2.0;
  RicianModel model = RicianModel::standard;

  void validate() const {
    if (!(k_factor >= 0.0)) throw std::invalid_argument("rf.k_factor must be >= 0");
    if (!(los_reference_gain > 0.0)) throw std::invalid_argument("rf.los_reference_gain must be > 0");
    if (!(path_loss_exponent >= 1.0)) throw std::invalid_argument("rf.path_loss_exponent must be >= 1");
  }
};

struct FadingSample {
  double h_mag = 0.0;
};

inline double los_component(const RicianConfig& cfg, double distance) {
  if (!(distance > 0.0)) throw std::invalid_argument("RF link distance must be > 0");
  return cfg.los_reference_gain * std::pow(distance, -cfg.path_loss_exponent / 2.0);
}

struct RicianWeights {
  double los;
  double nlos;
};

inline RicianWeights rician_weights(const RicianConfig& cfg) {
  const double k = cfg.k_factor;
  if (std::isinf(k)) return {1.0, cfg.model == RicianModel::paper_verbatim ? 1.0 : 0.0};
  const double w_los = std::sqrt(k / (1.0 + k));
  return {w_los, cfg.model == RicianModel::paper_verbatim ? w_los : std::sqrt(1.0 / (1.0 + k))};
}

/// One fading draw. The NLOS term is circularly-symmetric complex Gaussian
/// with power equal to the LOS power; consumes two normals from `rng`.
inline FadingSample sample_rician_gain(const RicianConfig& cfg, double distance, RandomStream& rng) {
  const double los = los_component(cfg, distance);
  const auto [w_los, w_nlos] = rician_weights(cfg);
  const double scale = los / std::sqrt(2.0);
  const double re = rng.normal() * scale;
  const double im = rng.normal() * scale;
  return {std::hypot(w_los * los + w_nlos * re, w_nlos * im)};
}

}  // namespace slipt
