#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slipt {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend constexpr bool operator==(Vec3, Vec3) = default;

  constexpr double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline double distance(Vec3 a, Vec3 b) { return (a - b).norm(); }

// Angle between two nonzero vectors in degrees, in [0, 180].
inline double angle_between_deg(Vec3 a, Vec3 b) {
  const double c = a.dot(b) / (a.norm() * b.norm());
  return rad_to_deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

inline bool is_unit(Vec3 v, double tol = 1e-9) { return std::abs(v.norm() - 1.0) <= tol; }

}  // namespace slipt
