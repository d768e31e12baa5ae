#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringmag/geometry.hpp"
#include "ringmag/radial.hpp"
#include "ringmag/two_ring.hpp"
#include "ringmag/types.hpp"

namespace ringmag {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline double parse_number(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key +
                                "' is not a number: " + v);
  }
  while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos])))
    ++pos;
  if (pos != v.size())
    throw std::invalid_argument("config: key '" + key +
                                "' has trailing junk: " + v);
  return x;
}

}  // namespace detail

// Flat `section.key = value` text; '#' starts a comment, duplicates are
// rejected. Values stay strings until typed access.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                    " is not 'key = value'");
      const std::string key = detail::trim(line.substr(0, eq));
      const std::string value = detail::trim(line.substr(eq + 1));
      if (key.empty() || value.empty())
        throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                    " has an empty key or value");
      if (!cfg.kv_.emplace(key, value).second)
        throw std::invalid_argument("config: duplicate key '" + key + "'");
    }
    return cfg;
  }

  static KeyValueConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
      throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  void set(const std::string& key, const std::string& value) {
    kv_[key] = value;
  }

  const std::string& str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end())
      throw std::invalid_argument("config: missing key '" + key + "'");
    return it->second;
  }

  std::string str_or(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  double number(const std::string& key) const {
    return detail::parse_number(key, str(key));
  }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  long integer(const std::string& key) const {
    const double x = number(key);
    const long n = static_cast<long>(x);
    if (static_cast<double>(n) != x)
      throw std::invalid_argument("config: key '" + key +
                                  "' is not an integer");
    return n;
  }

  long integer_or(const std::string& key, long fallback) const {
    return has(key) ? integer(key) : fallback;
  }

  bool flag_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = str(key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw std::invalid_argument("config: key '" + key + "' is not a flag");
  }

  // Radians; a trailing "pi" scales the numeric prefix ("0.48pi", "pi").
  double angle(const std::string& key) const {
    std::string v = str(key);
    if (v.size() >= 2 && v.substr(v.size() - 2) == "pi") {
      v = detail::trim(v.substr(0, v.size() - 2));
      return (v.empty() ? 1.0 : detail::parse_number(key, v)) * kPi;
    }
    return detail::parse_number(key, v);
  }

  // "lo:hi:step" (inclusive sweep), a comma list, or a single number.
  std::vector<double> range(const std::string& key) const {
    const std::string& v = str(key);
    std::vector<double> out;
    if (v.find(':') != std::string::npos) {
      std::vector<std::string> parts;
      std::istringstream in(v);
      std::string tok;
      while (std::getline(in, tok, ':')) parts.push_back(detail::trim(tok));
      if (parts.size() != 3)
        throw std::invalid_argument("config: key '" + key +
                                    "' range needs lo:hi:step");
      const double lo = detail::parse_number(key, parts[0]);
      const double hi = detail::parse_number(key, parts[1]);
      const double step = detail::parse_number(key, parts[2]);
      if (step <= 0.0 || hi < lo)
        throw std::invalid_argument("config: key '" + key +
                                    "' range is empty or descending");
      const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
      for (int i = 0; i < n; ++i) out.push_back(lo + i * step);
      return out;
    }
    std::istringstream in(v);
    std::string tok;
    while (std::getline(in, tok, ',')) {
      tok = detail::trim(tok);
      if (!tok.empty()) out.push_back(detail::parse_number(key, tok));
    }
    if (out.empty())
      throw std::invalid_argument("config: key '" + key + "' is empty");
    return out;
  }

  std::vector<int> integers(const std::string& key) const {
    std::vector<int> out;
    for (const double x : range(key)) {
      const int n = static_cast<int>(x);
      if (static_cast<double>(n) != x)
        throw std::invalid_argument("config: key '" + key +
                                    "' holds non-integers");
      out.push_back(n);
    }
    return out;
  }

  const std::map<std::string, std::string>& items() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

enum class CouplingMode { Solve, Inject };
enum class UPolicy { Absolute, Ratio };

// Typed experiment description assembled from the flat config.
struct ExperimentConfig {
  RingGeometry geometry;
  std::vector<double> d_values;  // one entry unless a d range was given
  CouplingMode mode = CouplingMode::Solve;
  double inj_J1 = 0.0, inj_J2 = 0.0, inj_J3 = 0.0;
  UPolicy u_policy = UPolicy::Ratio;
  double u_value = 1.0;    // Absolute policy
  double u_ratio = 20.0;   // Ratio policy: U / max(|J2|, |J3|)
  TwoRingGrid grid;
  RadialGrid radial;
  double solver_tol = 1e-10;
  long solver_max_iter = 360;  // Krylov basis cap
  std::uint64_t seed = 0;      // 0 keeps per-module defaults
};

inline ExperimentConfig make_experiment_config(const KeyValueConfig& c) {
  ExperimentConfig e;
  e.geometry.R = c.number_or("geometry.R", e.geometry.R);
  if (c.has("geometry.d") == c.has("geometry.d_range"))
    throw std::invalid_argument(
        "config: exactly one of geometry.d / geometry.d_range required");
  e.d_values = c.has("geometry.d") ? std::vector<double>{c.number("geometry.d")}
                                   : c.range("geometry.d_range");
  if (e.d_values.empty())
    throw std::invalid_argument("config: geometry.d_range is empty");
  e.geometry.d = e.d_values.front();
  if (c.has("geometry.Theta")) e.geometry.Theta = c.angle("geometry.Theta");
  e.geometry.l = static_cast<int>(c.integer_or("geometry.l", e.geometry.l));
  e.geometry.N = static_cast<int>(c.integer_or("geometry.N", e.geometry.N));
  const std::string cell = c.str_or("geometry.cell", "two");
  if (cell == "two") {
    e.geometry.cell = CellKind::TwoSite;
  } else if (cell == "four") {
    e.geometry.cell = CellKind::FourSite;
  } else {
    throw std::invalid_argument("config: geometry.cell must be two or four");
  }
  const std::string bc = c.str_or("geometry.boundary", "periodic");
  if (bc == "periodic") {
    e.geometry.boundary = Boundary::Periodic;
  } else if (bc == "open") {
    e.geometry.boundary = Boundary::Open;
  } else {
    throw std::invalid_argument(
        "config: geometry.boundary must be periodic or open");
  }
  e.geometry.validate();

  const std::string mode = c.str_or("couplings.mode", "solve");
  if (mode == "solve") {
    e.mode = CouplingMode::Solve;
  } else if (mode == "inject") {
    e.mode = CouplingMode::Inject;
    if (!c.has("couplings.J1") || !c.has("couplings.J2") ||
        !c.has("couplings.J3"))
      throw std::invalid_argument(
          "config: inject mode requires couplings.J1, .J2, .J3");
    e.inj_J1 = c.number("couplings.J1");
    e.inj_J2 = c.number("couplings.J2");
    e.inj_J3 = c.number("couplings.J3");
  } else {
    throw std::invalid_argument("config: couplings.mode must be solve or inject");
  }

  const std::string up = c.str_or("couplings.u_policy", "ratio");
  if (up == "absolute") {
    e.u_policy = UPolicy::Absolute;
    e.u_value = c.number("couplings.U");
    if (e.u_value <= 0.0)
      throw std::invalid_argument("config: couplings.U must be positive");
  } else if (up == "ratio") {
    e.u_policy = UPolicy::Ratio;
    e.u_ratio = c.number_or("couplings.u_ratio", e.u_ratio);
    if (e.u_ratio <= 0.0)
      throw std::invalid_argument("config: couplings.u_ratio must be positive");
  } else {
    throw std::invalid_argument(
        "config: couplings.u_policy must be absolute or ratio");
  }

  e.grid.spacing = c.number_or("grid.spacing", e.grid.spacing);
  e.grid.margin = c.number_or("grid.margin", e.grid.margin);
  e.radial.spacing = c.number_or("grid.radial_spacing", e.radial.spacing);
  e.radial.margin = c.number_or("grid.radial_margin", e.radial.margin);
  e.solver_tol = c.number_or("solver.tol", e.solver_tol);
  e.solver_max_iter = c.integer_or("solver.max_iter", e.solver_max_iter);
  if (e.solver_tol <= 0.0 || e.solver_max_iter < 8)
    throw std::invalid_argument("config: solver settings out of range");
  e.seed = static_cast<std::uint64_t>(c.integer_or("solver.seed", 0));
  return e;
}

}  // namespace ringmag
