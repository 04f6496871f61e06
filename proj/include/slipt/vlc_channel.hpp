#pragma once

// Line-of-sight VLC channel: Lambertian LED emission, photodiode with optical
// filter and non-imaging concentrator. Angles are degrees at the interface.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "slipt/geometry.hpp"

namespace slipt {

struct LedConfig {
  Vec3 position{2.5, 2.5, 3.0};
  Vec3 orientation{0.0, 0.0, -1.0};
  double p_led = 1.0;            // W
  double dc_offset = 2.0;        // A, I_D
  double semi_angle_half = 60.0;  // deg

  void validate() const {
    if (!position.finite()) throw std::invalid_argument("led.position must be finite");
    if (!is_unit(orientation)) throw std::invalid_argument("led.orientation must have unit norm");
    if (!(p_led > 0.0)) throw std::invalid_argument("led.p_led must be > 0");
    if (!(dc_offset > 0.0)) throw std::invalid_argument("led.dc_offset must be > 0");
    if (!(semi_angle_half > 0.0 && semi_angle_half < 90.0))
      throw std::invalid_argument("led.semi_angle_half must be in (0, 90)");
  }
};

enum class ConcentratorModel {
  standard,        // kappa^2 / sin^2(FOV) inside the field of view
  paper_verbatim,  // kappa^2 / sin^2(incidence); singular at normal incidence
};

struct PhotodiodeConfig {
  double area = 1e-4;  // m^2
  double responsivity = 0.54;  // A/W
  double fov = 60.0;   // deg
  double filter_gain = 1.0;
  double refractive_index = 1.5;
  ConcentratorModel concentrator = ConcentratorModel::standard;

  void validate() const {
    if (!(area > 0.0)) throw std::invalid_argument("pd.area must be > 0");
    if (!(responsivity > 0.0)) throw std::invalid_argument("pd.responsivity must be > 0");
    if (!(fov > 0.0 && fov <= 90.0)) throw std::invalid_argument("pd.fov must be in (0, 90]");
    if (!(filter_gain > 0.0)) throw std::invalid_argument("pd.filter_gain must be > 0");
    if (!(refractive_index >= 1.0)) throw std::invalid_argument("pd.refractive_index must be >= 1");
  }
};

struct UserTerminal {
  int id = 0;
  Vec3 position;
  PhotodiodeConfig pd;
  Vec3 surface_normal{0.0, 0.0, 1.0};
};

struct LinkAngles {
  double irradiance_deg;  // at the LED, from its orientation
  double incidence_deg;   // at the PD, from its surface normal
  double distance;        // m
};

/// Lambertian order m = -1 / log2(cos(semi_angle_half)).
inline double lambertian_order(double semi_angle_half_deg) {
  if (!(semi_angle_half_deg > 0.0 && semi_angle_half_deg < 90.0))
    throw std::domain_error("semi-angle at half illuminance must be in (0, 90) degrees");
  return -1.0 / std::log2(std::cos(deg_to_rad(semi_angle_half_deg)));
}

inline LinkAngles link_angles(const LedConfig& led, const UserTerminal& user) {
  const Vec3 to_user = user.position - led.position;
  const double d = to_user.norm();
  if (!(d > 0.0)) throw std::invalid_argument("user position coincides with the LED");
  return {angle_between_deg(led.orientation, to_user),
          angle_between_deg(user.surface_normal, -1.0 * to_user), d};
}

inline double concentrator_gain(double incidence_deg, const PhotodiodeConfig& pd) {
  if (incidence_deg < 0.0 || incidence_deg > pd.fov) return 0.0;
  const double k2 = pd.refractive_index * pd.refractive_index;
  if (pd.concentrator == ConcentratorModel::paper_verbatim) {
    const double s = std::sin(deg_to_rad(incidence_deg));
    if (s == 0.0)
      throw std::domain_error("verbatim concentrator gain is singular at normal incidence");
    return k2 / (s * s);
  }
  const double s = std::sin(deg_to_rad(pd.fov));
  return k2 / (s * s);
}

/// DC gain of the LOS optical link. Gated on the incidence angle against the
/// PD field of view; zero behind the LED.
inline double vlc_channel_gain(const LedConfig& led, const UserTerminal& user) {
  const auto [phi, psi, d] = link_angles(led, user);
  if (psi > user.pd.fov || phi >= 90.0) return 0.0;
  const double m = lambertian_order(led.semi_angle_half);
  const auto& pd = user.pd;
  return (m + 1.0) * pd.area * pd.responsivity / (2.0 * std::numbers::pi * d * d) *
         std::pow(std::cos(deg_to_rad(phi)), m) * pd.filter_gain * concentrator_gain(psi, pd) *
         std::cos(deg_to_rad(psi));
}

}  // namespace slipt
