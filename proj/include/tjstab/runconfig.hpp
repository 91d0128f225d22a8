#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "tjstab/errors.hpp"
#include "tjstab/geometry.hpp"

namespace tjstab {

// Run-level configuration: flat ini-style sections [geometry], [sweep],
// [numerics], [output]; every key optional with the defaults below.
struct RunConfig {
  // geometry: either (kappa, l, L) or (l_star, L_star) with kappa = 1
  std::optional<double> kappa, l, L;
  std::optional<double> l_star, L_star;

  // sweep ranges
  double sweep_l_min = 0.1, sweep_l_max = 0.5;
  int sweep_l_steps = 5;
  double sweep_L_min = 0.01, sweep_L_max = 2.0;
  int sweep_L_steps = 20;

  // numerics
  int grid_n = 400;     // oracle grid
  int scan_n = 2048;    // determinant scan resolution
  double tol = 1e-12;
  bool oracle = false;
  int jobs = 1;

  // output
  std::string out_dir = ".";
  bool emit_svg = false;
  bool emit_csv = true;
  bool emit_traces = false;
  int trace_samples = 512;
  std::string trace_kind = "x";  // "x" or "L_star"

  void validate_geometry() const {
    const bool physical = kappa.has_value() || l.has_value() || L.has_value();
    const bool dimensionless = l_star.has_value() || L_star.has_value();
    if (physical && dimensionless)
      throw ConfigError("give either (kappa, l, L) or (l_star, L_star), not both");
    if (physical && !(kappa && l && L))
      throw ConfigError("physical geometry needs all of kappa, l, L");
    if (dimensionless && !(l_star && L_star))
      throw ConfigError("dimensionless geometry needs both l_star and L_star");
    if (!physical && !dimensionless)
      throw ConfigError("no geometry given (kappa,l,L or l_star,L_star)");
  }

  void validate_numerics() const {
    if (sweep_l_steps < 1 || sweep_L_steps < 1)
      throw ConfigError("sweep steps must be >= 1");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (grid_n < 8) throw ConfigError("grid_n must be >= 8");
    if (scan_n < 64) throw ConfigError("scan must be >= 64");
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (trace_kind != "x" && trace_kind != "L_star")
      throw ConfigError("trace kind must be 'x' or 'L_star'");
  }

  PartitionConfig partition() const {
    validate_geometry();
    if (kappa) return build_config(*kappa, *l, *L);
    return build_config(1.0, *l_star, *L_star);
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  std::string t;
  for (char c : v) t.push_back(static_cast<char>(std::tolower(c)));
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError("bad boolean for " + key + ": " + v);
}

inline double parse_double(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad number for " + key + ": " + v);
  }
}

inline int parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const int d = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad integer for " + key + ": " + v);
  }
}

}  // namespace detail

// Parse the ini text; unknown keys are rejected so typos do not silently
// fall back to defaults.
inline RunConfig parse_run_config(std::istream& in) {
  RunConfig rc;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = std::min(line.find('#'), line.find(';'));
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = detail::trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    const std::string q = section + "." + key;

    if (q == "geometry.kappa") rc.kappa = detail::parse_double(val, q);
    else if (q == "geometry.l") rc.l = detail::parse_double(val, q);
    else if (q == "geometry.L") rc.L = detail::parse_double(val, q);
    else if (q == "geometry.l_star") rc.l_star = detail::parse_double(val, q);
    else if (q == "geometry.L_star") rc.L_star = detail::parse_double(val, q);
    else if (q == "sweep.l_star_min") rc.sweep_l_min = detail::parse_double(val, q);
    else if (q == "sweep.l_star_max") rc.sweep_l_max = detail::parse_double(val, q);
    else if (q == "sweep.l_star_steps") rc.sweep_l_steps = detail::parse_int(val, q);
    else if (q == "sweep.L_star_min") rc.sweep_L_min = detail::parse_double(val, q);
    else if (q == "sweep.L_star_max") rc.sweep_L_max = detail::parse_double(val, q);
    else if (q == "sweep.L_star_steps") rc.sweep_L_steps = detail::parse_int(val, q);
    else if (q == "numerics.grid_n") rc.grid_n = detail::parse_int(val, q);
    else if (q == "numerics.scan") rc.scan_n = detail::parse_int(val, q);
    else if (q == "numerics.tol") rc.tol = detail::parse_double(val, q);
    else if (q == "numerics.oracle") rc.oracle = detail::parse_bool(val, q);
    else if (q == "numerics.jobs") rc.jobs = detail::parse_int(val, q);
    else if (q == "output.dir") rc.out_dir = val;
    else if (q == "output.emit_svg") rc.emit_svg = detail::parse_bool(val, q);
    else if (q == "output.emit_csv") rc.emit_csv = detail::parse_bool(val, q);
    else if (q == "output.emit_traces") rc.emit_traces = detail::parse_bool(val, q);
    else if (q == "output.trace_samples") rc.trace_samples = detail::parse_int(val, q);
    else if (q == "output.trace_kind") rc.trace_kind = val;
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key " + q);
  }
  return rc;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_run_config(in);
}

}  // namespace tjstab
