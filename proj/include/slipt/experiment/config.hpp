#pragma once

// Experiment configuration: INI-style text, `[section]` + `key = value`,
// addressed as `section.key`. ';' and '#' start comments; empty values mean
// "use the default".
// The full schema is documented in configs/schema.ini.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "slipt/dc_solver.hpp"
#include "slipt/geometry.hpp"
#include "slipt/rf_channel.hpp"
#include "slipt/vlc_channel.hpp"

namespace slipt::experiment {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RoomConfig {
  double width = 5.0;
  double depth = 5.0;
  double height = 3.0;

  bool contains(Vec3 p) const {
    return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= depth && p.z >= 0.0 && p.z <= height;
  }
};

struct NoiseConfig {
  double dl = 1e-14;
  double ul = 1e-14;
  double eve_dl = 1e-14;  // parsed for completeness; no rate formula uses it
  double eve_ul = 1e-14;
};

enum class SweepMode { rmin_fraction, rmin_absolute };

struct SweepConfig {
  SweepMode mode = SweepMode::rmin_fraction;
  double start = 0.0;
  double stop = 0.95;
  int points = 20;
  std::vector<int> users;  // empty: use users.count

  std::vector<double> values() const {
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
      v[static_cast<std::size_t>(i)] =
          points == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1);
    return v;
  }
};

/// r_min for single-scenario runs: absolute if set, else fraction of the bound.
struct ProblemConfig {
  double r_min_fraction = 0.0;
  std::optional<double> r_min;
};

struct ExperimentConfig {
  RoomConfig room;
  LedConfig led;
  PhotodiodeConfig pd;
  RicianConfig rician;
  Vec3 ap_position;
  NoiseConfig noise;
  double eta = 0.44;
  int users = 4;
  std::vector<Vec3> user_positions;  // empty: uniform over the floor
  double user_height = 0.0;
  std::optional<Vec3> eve_position;  // empty: uniform over the floor per trial
  double eve_height = 0.0;
  std::uint64_t seed = 0;
  int trials = 1;
  SweepConfig sweep;
  ProblemConfig problem;
  DcaSettings solver;
  std::string output_dir = "out";

  std::vector<int> sweep_user_counts() const { return sweep.users.empty() ? std::vector<int>{users} : sweep.users; }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

inline double parse_double(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a finite number, got '" + text + "'");
  }
}

inline long long parse_int(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected an integer, got '" + text + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
    const unsigned long long v = std::stoull(text, &used, 0);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "expected an unsigned 64-bit integer, got '" + text + "'");
  }
}

inline Vec3 parse_vec3(const std::string& field, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ConfigError(field, "expected 'x, y, z', got '" + text + "'");
  return {parse_double(field, parts[0]), parse_double(field, parts[1]), parse_double(field, parts[2])};
}

// Strips ';' and '#' comments, including trailing ones; the Boost INI reader
// only knows ';' at line start.
inline std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) out << line.substr(0, line.find_first_of(";#")) << '\n';
  return out.str();
}

// Flattened `section.key` -> value, with unknown-key detection.
class FieldReader {
 public:
  explicit FieldReader(const boost::property_tree::ptree& tree) {
    for (const auto& [key, node] : tree) {
      if (node.empty()) {
        if (auto v = trim(node.data()); !v.empty()) values_[key] = v;
      } else {
        for (const auto& [sub, leaf] : node)
          if (auto v = trim(leaf.data()); !v.empty()) values_[key + "." + sub] = v;
      }
    }
  }

  std::optional<std::string> raw(const std::string& field) {
    used_.insert(field);
    const auto it = values_.find(field);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  void number(const std::string& field, double& out) {
    if (auto v = raw(field)) out = parse_double(field, *v);
  }
  void integer(const std::string& field, int& out) {
    if (auto v = raw(field)) out = static_cast<int>(parse_int(field, *v));
  }
  void vec3(const std::string& field, Vec3& out) {
    if (auto v = raw(field)) out = parse_vec3(field, *v);
  }

  void reject_unknown() const {
    for (const auto& [key, _] : values_)
      if (!used_.count(key)) throw ConfigError(key, "unknown key");
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

inline void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace detail

inline void validate(const ExperimentConfig& c) {
  using detail::require;
  require(c.room.width > 0.0, "room.width", "must be > 0");
  require(c.room.depth > 0.0, "room.depth", "must be > 0");
  require(c.room.height > 0.0, "room.height", "must be > 0");
  require(is_unit(c.led.orientation), "led.orientation", "must have unit norm");
  require(c.led.p_led > 0.0, "led.p_led", "must be > 0");
  require(c.led.dc_offset > 0.0, "led.dc_offset", "must be > 0");
  require(c.led.semi_angle_half > 0.0 && c.led.semi_angle_half < 90.0, "led.semi_angle_half", "must be in (0, 90)");
  require(c.pd.area > 0.0, "pd.area", "must be > 0");
  require(c.pd.responsivity > 0.0, "pd.responsivity", "must be > 0");
  require(c.pd.fov > 0.0 && c.pd.fov <= 90.0, "pd.fov", "must be in (0, 90]");
  require(c.pd.filter_gain > 0.0, "pd.filter_gain", "must be > 0");
  require(c.pd.refractive_index >= 1.0, "pd.refractive_index", "must be >= 1");
  require(c.rician.k_factor >= 0.0, "rf.k_factor", "must be >= 0");
  require(c.rician.los_reference_gain > 0.0, "rf.los_reference_gain", "must be > 0");
  require(c.rician.path_loss_exponent >= 1.0, "rf.path_loss_exponent", "must be >= 1");
  require(c.noise.dl > 0.0, "noise.dl", "must be > 0");
  require(c.noise.ul > 0.0, "noise.ul", "must be > 0");
  require(c.noise.eve_dl > 0.0, "noise.eve_dl", "must be > 0");
  require(c.noise.eve_ul > 0.0, "noise.eve_ul", "must be > 0");
  require(c.eta > 0.0, "harvest.eta", "must be > 0");
  require(c.users >= 1, "users.count", "must be >= 1");
  require(c.user_height >= 0.0 && c.user_height < c.room.height, "users.height", "must be in [0, room.height)");
  require(c.user_positions.empty() || c.user_positions.size() == static_cast<std::size_t>(c.users),
          "users.positions", "has " + std::to_string(c.user_positions.size()) + " entries but users.count is " +
                                 std::to_string(c.users));
  for (const auto& p : c.user_positions) {
    require(c.room.contains(p), "users.positions", "position outside the room");
    require(!(p == c.led.position), "users.positions", "position coincides with the LED");
  }
  require(c.eve_height >= 0.0 && c.eve_height <= c.room.height, "eve.height", "must be in [0, room.height]");
  require(c.trials >= 1, "trials", "must be >= 1");
  require(c.sweep.points >= 1, "sweep.points", "must be >= 1");
  require(c.sweep.start >= 0.0 && c.sweep.stop >= c.sweep.start, "sweep.stop", "need 0 <= start <= stop");
  for (int k : c.sweep.users) require(k >= 1, "sweep.users", "user counts must be >= 1");
  if (!c.user_positions.empty())
    for (int k : c.sweep.users)
      require(k == c.users, "sweep.users", "explicit users.positions fix K; sweep.users must match users.count");
  require(c.problem.r_min_fraction >= 0.0, "problem.r_min_fraction", "must be >= 0");
  require(!c.problem.r_min || *c.problem.r_min >= 0.0, "problem.r_min", "must be >= 0");
  require(c.solver.epsilon > 0.0, "solver.epsilon", "must be > 0");
  require(c.solver.max_iterations >= 1, "solver.max_iterations", "must be >= 1");
  require(c.solver.subproblem_tolerance > 0.0, "solver.subproblem_tolerance", "must be > 0");
  require(c.solver.subproblem_max_iterations >= 1, "solver.subproblem_max_iterations", "must be >= 1");
  require(c.solver.restarts >= 1, "solver.restarts", "must be >= 1");
}

/// Parses config text. `seed_override` (the CLI --seed) wins over the file;
/// one of the two must supply the seed.
inline ExperimentConfig parse_config(const std::string& text, std::optional<std::uint64_t> seed_override = {}) {
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(detail::strip_comments(text));
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("<file>", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  detail::FieldReader r(tree);
  ExperimentConfig c;

  if (auto v = r.raw("seed")) c.seed = detail::parse_u64("seed", *v);
  else if (!seed_override) throw ConfigError("seed", "required (set it in the file or pass --seed)");
  if (seed_override) c.seed = *seed_override;
  r.integer("trials", c.trials);
  if (auto v = r.raw("output_dir")) c.output_dir = *v;

  r.number("room.width", c.room.width);
  r.number("room.depth", c.room.depth);
  r.number("room.height", c.room.height);

  c.led.position = {c.room.width / 2.0, c.room.depth / 2.0, c.room.height};
  r.vec3("led.position", c.led.position);
  r.vec3("led.orientation", c.led.orientation);
  r.number("led.p_led", c.led.p_led);
  r.number("led.dc_offset", c.led.dc_offset);
  r.number("led.semi_angle_half", c.led.semi_angle_half);

  r.number("pd.area", c.pd.area);
  r.number("pd.responsivity", c.pd.responsivity);
  r.number("pd.fov", c.pd.fov);
  r.number("pd.filter_gain", c.pd.filter_gain);
  r.number("pd.refractive_index", c.pd.refractive_index);
  if (auto v = r.raw("pd.concentrator")) {
    if (*v == "standard") c.pd.concentrator = ConcentratorModel::standard;
    else if (*v == "paper-verbatim") c.pd.concentrator = ConcentratorModel::paper_verbatim;
    else throw ConfigError("pd.concentrator", "expected 'standard' or 'paper-verbatim'");
  }

  if (auto v = r.raw("rf.k_factor")) {
    c.rician.k_factor = (*v == "inf") ? INFINITY : detail::parse_double("rf.k_factor", *v);
  }
  r.number("rf.los_reference_gain", c.rician.los_reference_gain);
  r.number("rf.path_loss_exponent", c.rician.path_loss_exponent);
  if (auto v = r.raw("rf.rician")) {
    if (*v == "standard") c.rician.model = RicianModel::standard;
    else if (*v == "paper-verbatim") c.rician.model = RicianModel::paper_verbatim;
    else throw ConfigError("rf.rician", "expected 'standard' or 'paper-verbatim'");
  }
  c.ap_position = c.led.position;
  r.vec3("rf.ap_position", c.ap_position);

  r.number("noise.dl", c.noise.dl);
  r.number("noise.ul", c.noise.ul);
  r.number("noise.eve_dl", c.noise.eve_dl);
  r.number("noise.eve_ul", c.noise.eve_ul);
  r.number("harvest.eta", c.eta);

  r.integer("users.count", c.users);
  r.number("users.height", c.user_height);
  if (auto v = r.raw("users.positions")) {
    for (const auto& item : detail::split(*v, '|'))
      if (!item.empty()) c.user_positions.push_back(detail::parse_vec3("users.positions", item));
  }

  if (auto v = r.raw("eve.position"); v && *v != "random") c.eve_position = detail::parse_vec3("eve.position", *v);
  r.number("eve.height", c.eve_height);

  if (auto v = r.raw("sweep.mode")) {
    if (*v == "rmin_fraction") c.sweep.mode = SweepMode::rmin_fraction;
    else if (*v == "rmin_absolute") c.sweep.mode = SweepMode::rmin_absolute;
    else throw ConfigError("sweep.mode", "expected 'rmin_fraction' or 'rmin_absolute'");
  }
  r.number("sweep.start", c.sweep.start);
  r.number("sweep.stop", c.sweep.stop);
  r.integer("sweep.points", c.sweep.points);
  if (auto v = r.raw("sweep.users")) {
    for (const auto& item : detail::split(*v, ','))
      if (!item.empty()) c.sweep.users.push_back(static_cast<int>(detail::parse_int("sweep.users", item)));
  }

  r.number("problem.r_min_fraction", c.problem.r_min_fraction);
  if (auto v = r.raw("problem.r_min")) c.problem.r_min = detail::parse_double("problem.r_min", *v);

  r.number("solver.epsilon", c.solver.epsilon);
  r.integer("solver.max_iterations", c.solver.max_iterations);
  r.number("solver.subproblem_tolerance", c.solver.subproblem_tolerance);
  r.integer("solver.subproblem_max_iterations", c.solver.subproblem_max_iterations);
  r.integer("solver.restarts", c.solver.restarts);

  r.reject_unknown();
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), seed_override);
}

}  // namespace slipt::experiment
