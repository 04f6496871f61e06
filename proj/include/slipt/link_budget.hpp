#pragma once

// Harvested energy, uplink power, downlink sum-rate coefficients and the
// uplink secrecy objective with its derivatives.
//
// Per user the secrecy capacity is u_k - v_k where
//   u_k(tau_dl, tau_ul) = tau_ul * log2(1 + a_k (1 - tau_dl) / tau_ul)
// and v_k is the same perspective form with the eavesdropper coefficient.
// Both are concave on tau_ul > 0; at tau_ul = 0 they take the continuous
// extension 0.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slipt {

inline constexpr double kLn2 = std::numbers::ln2;

struct ScenarioChannels {
  std::vector<double> g;          // VLC DC gains
  std::vector<double> h;          // UL amplitudes, user -> AP
  std::vector<double> h_e;        // UL amplitudes, user -> Eve
  std::vector<double> sigma2_dl;  // W
  std::vector<double> sigma2_ul;  // W
  double sigma2_e = 1e-14;        // W
  double eta = 0.44;
  double i_d = 2.0;  // A
  double p_led = 1.0;  // W

  std::size_t users() const { return g.size(); }

  /// a_k = eta I_D^2 g_k^2 h_k^2 / sigma_ul,k^2
  double a(std::size_t k) const {
    check_index(k);
    return eta * i_d * i_d * g[k] * g[k] * h[k] * h[k] / sigma2_ul[k];
  }

  /// Eavesdropper counterpart of a(k).
  double a_e(std::size_t k) const {
    check_index(k);
    return eta * i_d * i_d * g[k] * g[k] * h_e[k] * h_e[k] / sigma2_e;
  }

  void validate() const {
    const std::size_t k = users();
    if (k == 0) throw std::invalid_argument("scenario needs at least one user");
    if (h.size() != k || h_e.size() != k || sigma2_dl.size() != k || sigma2_ul.size() != k)
      throw std::invalid_argument("scenario arrays must all have length K");
    for (std::size_t i = 0; i < k; ++i) {
      if (!(g[i] >= 0.0 && h[i] >= 0.0 && h_e[i] >= 0.0))
        throw std::invalid_argument("channel gains must be >= 0");
      if (!(sigma2_dl[i] > 0.0 && sigma2_ul[i] > 0.0))
        throw std::invalid_argument("noise powers must be > 0");
    }
    if (!(sigma2_e > 0.0 && eta > 0.0 && i_d > 0.0 && p_led > 0.0))
      throw std::invalid_argument("sigma2_e, eta, i_d and p_led must be > 0");
  }

 private:
  void check_index(std::size_t k) const {
    if (k >= users()) throw std::out_of_range("user index " + std::to_string(k) + " out of range");
  }
};

/// Time-slot fractions of a unit TDMA frame.
struct Allocation {
  std::vector<double> tau_dl;
  std::vector<double> tau_ul;

  std::size_t users() const { return tau_dl.size(); }

  /// Packed as [tau_dl..., tau_ul...].
  std::vector<double> flatten() const {
    std::vector<double> x(tau_dl);
    x.insert(x.end(), tau_ul.begin(), tau_ul.end());
    return x;
  }

  static Allocation unflatten(std::span<const double> x) {
    const std::size_t k = x.size() / 2;
    return {{x.begin(), x.begin() + k}, {x.begin() + k, x.end()}};
  }
};

inline double harvested_energy(const ScenarioChannels& s, std::size_t k, double tau_dl_k) {
  if (k >= s.users()) throw std::out_of_range("user index out of range");
  if (!(tau_dl_k >= 0.0 && tau_dl_k <= 1.0)) throw std::invalid_argument("tau_dl must be in [0, 1]");
  return s.eta * s.i_d * s.i_d * s.g[k] * s.g[k] * (1.0 - tau_dl_k);
}

inline double ul_power(const ScenarioChannels& s, std::size_t k, double tau_dl_k, double tau_ul_k) {
  if (!(tau_ul_k > 0.0)) throw std::invalid_argument("uplink power is undefined for tau_ul <= 0");
  return harvested_energy(s, k, tau_dl_k) / tau_ul_k;
}

/// c_k such that the DL sum rate is sum_k tau_dl_k * c_k.
inline std::vector<double> dl_rate_coefficients(const ScenarioChannels& s) {
  std::vector<double> c(s.users());
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double snr = std::numbers::e / (2.0 * std::numbers::pi) * s.p_led * s.g[k] * s.g[k] / s.sigma2_dl[k];
    c[k] = std::log1p(snr) / kLn2;
  }
  return c;
}

inline double dl_sum_rate(std::span<const double> c, std::span<const double> tau_dl) {
  double r = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) r += c[k] * tau_dl[k];
  return r;
}

// ---- perspective term t*log2(1 + a*(1 - d)/t) ----

namespace detail {

// log1p(x) - x/(1+x), accurate for small x.
inline double log1p_minus_ratio(double x) {
  if (std::abs(x) < 1e-3) {
    // sum_{n>=2} (-1)^n (n-1) x^n / n
    double term = x * x, sum = 0.0;
    for (int n = 2; n < 9; ++n) {
      sum += ((n % 2 == 0) ? 1.0 : -1.0) * (n - 1) * term / n;
      term *= x;
    }
    return sum;
  }
  return std::log1p(x) - x / (1.0 + x);
}

}  // namespace detail

inline double perspective_rate(double a, double tau_dl, double tau_ul) {
  const double load = a * (1.0 - tau_dl);
  if (tau_ul <= 0.0 || load == 0.0) return 0.0;
  return tau_ul * std::log1p(load / tau_ul) / kLn2;
}

struct PerspectiveGradient {
  double d_dl;
  double d_ul;
};

inline PerspectiveGradient perspective_gradient(double a, double tau_dl, double tau_ul) {
  const double x = a * (1.0 - tau_dl) / tau_ul;
  return {-a / (kLn2 * (1.0 + x)), detail::log1p_minus_ratio(x) / kLn2};
}

/// Symmetric 2x2 Hessian over (tau_dl, tau_ul).
struct Hessian2 {
  double dl_dl;
  double dl_ul;
  double ul_ul;

  double quadratic_form(double z_dl, double z_ul) const {
    return dl_dl * z_dl * z_dl + 2.0 * dl_ul * z_dl * z_ul + ul_ul * z_ul * z_ul;
  }
  double determinant() const { return dl_dl * ul_ul - dl_ul * dl_ul; }
};

inline Hessian2 perspective_hessian(double a, double tau_dl, double tau_ul) {
  if (!(tau_ul > 0.0) || !(tau_dl < 1.0) || tau_dl < 0.0)
    throw std::domain_error("Hessian requires an interior point (tau_ul > 0, 0 <= tau_dl < 1)");
  const double s = 1.0 - tau_dl;
  const double den = tau_ul + s * a;
  const double den2 = den * den * kLn2;
  // d2/dtau_ul2 = s a / den^2 - s a / (tau_ul den), combined to avoid
  // cancellation when s a << tau_ul.
  return {
      -a * a * tau_ul / den2,
      -s * a * a / den2,
      -(s * a) * (s * a) / (tau_ul * den2),
  };
}

// ---- per-user and aggregate objective ----

inline double secrecy_capacity_user(const ScenarioChannels& s, std::size_t k, double tau_dl_k,
                                    double tau_ul_k) {
  return perspective_rate(s.a(k), tau_dl_k, tau_ul_k) - perspective_rate(s.a_e(k), tau_dl_k, tau_ul_k);
}

inline Hessian2 hessian_u(const ScenarioChannels& s, std::size_t k, double tau_dl_k, double tau_ul_k) {
  return perspective_hessian(s.a(k), tau_dl_k, tau_ul_k);
}

inline Hessian2 hessian_v(const ScenarioChannels& s, std::size_t k, double tau_dl_k, double tau_ul_k) {
  return perspective_hessian(s.a_e(k), tau_dl_k, tau_ul_k);
}

/// Per-user coefficient tables, cached for the solver's inner loops.
struct RateCoefficients {
  std::vector<double> a;
  std::vector<double> a_e;

  explicit RateCoefficients(const ScenarioChannels& s) : a(s.users()), a_e(s.users()) {
    for (std::size_t k = 0; k < s.users(); ++k) {
      a[k] = s.a(k);
      a_e[k] = s.a_e(k);
    }
  }
  RateCoefficients(std::vector<double> a_, std::vector<double> a_e_) : a(std::move(a_)), a_e(std::move(a_e_)) {}

  std::size_t users() const { return a.size(); }
};

enum class Part { u, v };

/// Sum over users of u_k (or v_k) at packed point x.
inline double part_value(const RateCoefficients& rc, Part part, std::span<const double> x) {
  const std::size_t n = rc.users();
  const auto& coef = part == Part::u ? rc.a : rc.a_e;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += perspective_rate(coef[k], x[k], x[n + k]);
  return sum;
}

/// Gradient of u (or v) at packed point x; requires tau_ul > 0.
inline void part_gradient(const RateCoefficients& rc, Part part, std::span<const double> x,
                          std::span<double> grad) {
  const std::size_t n = rc.users();
  const auto& coef = part == Part::u ? rc.a : rc.a_e;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(x[n + k] > 0.0)) throw std::domain_error("gradient requested at tau_ul = 0");
    const auto gk = perspective_gradient(coef[k], x[k], x[n + k]);
    grad[k] = gk.d_dl;
    grad[n + k] = gk.d_ul;
  }
}

inline double objective_value(const RateCoefficients& rc, std::span<const double> x) {
  const std::size_t n = rc.users();
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    sum += perspective_rate(rc.a[k], x[k], x[n + k]) - perspective_rate(rc.a_e[k], x[k], x[n + k]);
  return sum;
}

inline double objective_value(const ScenarioChannels& s, const Allocation& x) {
  double sum = 0.0;
  for (std::size_t k = 0; k < s.users(); ++k) sum += secrecy_capacity_user(s, k, x.tau_dl[k], x.tau_ul[k]);
  return sum;
}

struct ValueAndGradient {
  double value;
  std::vector<double> gradient;  // packed [d/dtau_dl..., d/dtau_ul...]
};

inline ValueAndGradient objective_and_gradient(const ScenarioChannels& s, const Allocation& x) {
  const RateCoefficients rc(s);
  const auto flat = x.flatten();
  std::vector<double> gu(flat.size()), gv(flat.size());
  part_gradient(rc, Part::u, flat, gu);
  part_gradient(rc, Part::v, flat, gv);
  for (std::size_t i = 0; i < gu.size(); ++i) gu[i] -= gv[i];
  return {objective_value(rc, flat), std::move(gu)};
}

}  // namespace slipt
