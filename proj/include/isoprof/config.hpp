#pragma once

// Experiment configuration: an INI-style file of [section] headers and
// `key = value` lines. Every key has a default; unknown keys are rejected.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isoprof/errors.hpp"
#include "isoprof/numerics.hpp"

namespace isoprof {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  char buf[64];
  if (x == std::trunc(x) && std::abs(x) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", x);
    return buf;
  }
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

/// Fixed 17-significant-digit text, as written to result files.
inline std::string format_fixed17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Log-spaced probability grid "lo:hi:steps", or an explicit comma list.
struct AGridSpec {
  double lo = 1e-10;
  double hi = 0.5;
  int steps = 12;
  std::vector<double> explicit_values;

  std::vector<double> values() const {
    if (!explicit_values.empty()) return explicit_values;
    return numeric::geomspace(lo, hi, steps);
  }
  std::string text() const {
    if (!explicit_values.empty()) {
      std::string s;
      for (std::size_t i = 0; i < explicit_values.size(); ++i)
        s += (i ? ", " : "") + format_double(explicit_values[i]);
      return s;
    }
    return format_double(lo) + ":" + format_double(hi) + ":" + std::to_string(steps);
  }
  bool operator==(const AGridSpec&) const = default;
};

/// A ledger input: estimated from the measure ("fit") or a fixed number.
struct LedgerOverride {
  bool fit = false;
  double value = 0;
  std::string text() const { return fit ? "fit" : format_double(value); }
  bool operator==(const LedgerOverride&) const = default;
};

struct ExperimentConfig {
  std::string potential_kind = "power";
  std::vector<double> alphas{1.0, 1.5, 2.0, 3.0};
  bool isotropic = false;
  double lambda = 1.0;
  std::vector<int> n_list{2, 5, 10, 50, 100};
  AGridSpec a_grid;
  std::vector<std::string> routes{"bobkov", "big", "small", "tensor", "theorem"};
  std::uint64_t seed = 12345;
  double rel_tol = 1e-10;
  double abs_tol_log = -60.0;
  int max_subdivisions = 2000;
  LedgerOverride c1{true, 0};
  LedgerOverride C1{true, 0};
  LedgerOverride d1{true, 0};
  LedgerOverride d2{true, 0};
  double kappa = 0.5;
  double sphere_coeff = 1.0;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  QuadraturePlan plan() const { return {rel_tol, abs_tol_log, max_subdivisions}; }

  /// The complete configuration, defaults included, in canonical order.
  std::string resolved_text() const {
    std::ostringstream o;
    auto list = [](const auto& xs, auto fmt) {
      std::string s;
      for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
      return s;
    };
    o << "[potential]\n";
    o << "kind = " << potential_kind << "\n";
    o << "alpha = " << list(alphas, format_double) << "\n";
    o << "lambda = " << (isotropic ? std::string("isotropic") : format_double(lambda)) << "\n\n";
    o << "[grid]\n";
    o << "n = " << list(n_list, [](int n) { return std::to_string(n); }) << "\n";
    o << "a = " << a_grid.text() << "\n\n";
    o << "[run]\n";
    o << "routes = " << list(routes, [](const std::string& s) { return s; }) << "\n";
    o << "seed = " << seed << "\n\n";
    o << "[quadrature]\n";
    o << "rel_tol = " << format_double(rel_tol) << "\n";
    o << "abs_tol_log = " << format_double(abs_tol_log) << "\n";
    o << "max_subdivisions = " << max_subdivisions << "\n\n";
    o << "[ledger]\n";
    o << "c1 = " << c1.text() << "\n";
    o << "C1 = " << C1.text() << "\n";
    o << "d1 = " << d1.text() << "\n";
    o << "d2 = " << d2.text() << "\n";
    o << "kappa = " << format_double(kappa) << "\n";
    o << "sphere_coeff = " << format_double(sphere_coeff) << "\n\n";
    o << "[output]\n";
    o << "dir = " << output_dir << "\n";
    return o.str();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double parse_number(const std::string& s, const std::string& key, int line) {
  std::size_t used = 0;
  double v;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + s + "' is not a number", line);
  }
  if (used != s.size() || !std::isfinite(v)) throw ConfigError("key '" + key + "': '" + s + "' is not a number", line);
  return v;
}

inline long long parse_integer(const std::string& s, const std::string& key, int line) {
  std::size_t used = 0;
  long long v;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': '" + s + "' is not an integer", line);
  }
  if (used != s.size()) throw ConfigError("key '" + key + "': '" + s + "' is not an integer", line);
  return v;
}

inline LedgerOverride parse_override(const std::string& s, const std::string& key, int line) {
  if (s == "fit") return {true, 0};
  const double v = parse_number(s, key, line);
  if (!(v > 0)) throw ConfigError("key '" + key + "' must be positive or 'fit'", line);
  return {false, v};
}

// Accepted spellings: [quad] for [quadrature], max_subdiv, potential.potential.
inline std::string canonical_key(std::string key) {
  if (key.rfind("quad.", 0) == 0) key = "quadrature." + key.substr(5);
  if (key == "quadrature.max_subdiv") key = "quadrature.max_subdivisions";
  if (key == "potential.potential") key = "potential.kind";
  return key;
}

}  // namespace detail

inline const std::vector<std::string>& known_routes() {
  static const std::vector<std::string> r{"bobkov", "big", "small", "tensor", "theorem"};
  return r;
}

/// Applies one `key = value` assignment; keys are "section.key".
inline void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                             int line = 0) {
  using namespace detail;
  if (key == "potential.kind") {
    if (value != "power") throw ConfigError("potential.kind must be 'power'", line);
    cfg.potential_kind = value;
  } else if (key == "potential.alpha") {
    cfg.alphas.clear();
    for (const auto& s : split_list(value)) {
      const double a = parse_number(s, key, line);
      if (!(a >= 1)) throw ConfigError("potential.alpha values must be >= 1", line);
      cfg.alphas.push_back(a);
    }
    if (cfg.alphas.empty()) throw ConfigError("potential.alpha is empty", line);
  } else if (key == "potential.lambda") {
    if (value == "isotropic") {
      cfg.isotropic = true;
    } else {
      cfg.isotropic = false;
      cfg.lambda = parse_number(value, key, line);
      if (!(cfg.lambda > 0)) throw ConfigError("potential.lambda must be positive or 'isotropic'", line);
    }
  } else if (key == "grid.n") {
    cfg.n_list.clear();
    for (const auto& s : split_list(value)) {
      const auto n = parse_integer(s, key, line);
      if (n < 1 || n > 100000) throw ConfigError("grid.n values must lie in [1, 100000]", line);
      cfg.n_list.push_back(static_cast<int>(n));
    }
    if (cfg.n_list.empty()) throw ConfigError("grid.n is empty", line);
  } else if (key == "grid.a") {
    AGridSpec g;
    if (value.find(':') != std::string::npos) {
      std::vector<std::string> parts;
      std::string part;
      std::istringstream in(value);
      while (std::getline(in, part, ':')) parts.push_back(trim(part));
      if (parts.size() != 3) throw ConfigError("grid.a must be lo:hi:steps or a list", line);
      g.lo = parse_number(parts[0], key, line);
      g.hi = parse_number(parts[1], key, line);
      g.steps = static_cast<int>(parse_integer(parts[2], key, line));
      if (!(g.lo > 0 && g.lo <= g.hi && g.hi < 1) || g.steps < 1 || (g.steps == 1 && g.lo != g.hi))
        throw ConfigError("grid.a needs 0 < lo <= hi < 1 and steps >= 1", line);
    } else {
      for (const auto& s : split_list(value)) {
        const double a = parse_number(s, key, line);
        if (!(a > 0 && a < 1)) throw ConfigError("grid.a values must lie in (0, 1)", line);
        g.explicit_values.push_back(a);
      }
      if (g.explicit_values.empty()) throw ConfigError("grid.a is empty", line);
    }
    cfg.a_grid = g;
  } else if (key == "run.routes") {
    cfg.routes.clear();
    for (const auto& s : split_list(value)) {
      if (std::find(known_routes().begin(), known_routes().end(), s) == known_routes().end())
        throw ConfigError("unknown route '" + s + "'", line);
      cfg.routes.push_back(s);
    }
    if (cfg.routes.empty()) throw ConfigError("run.routes is empty", line);
  } else if (key == "run.seed") {
    const auto s = parse_integer(value, key, line);
    if (s < 0) throw ConfigError("run.seed must be non-negative", line);
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "quadrature.rel_tol") {
    cfg.rel_tol = parse_number(value, key, line);
    if (!(cfg.rel_tol > 0 && cfg.rel_tol < 1)) throw ConfigError("quadrature.rel_tol must lie in (0, 1)", line);
  } else if (key == "quadrature.abs_tol_log") {
    cfg.abs_tol_log = parse_number(value, key, line);
    if (!(cfg.abs_tol_log < 0)) throw ConfigError("quadrature.abs_tol_log must be negative", line);
  } else if (key == "quadrature.max_subdivisions") {
    const auto v = parse_integer(value, key, line);
    if (v < 1 || v > 10000000) throw ConfigError("quadrature.max_subdivisions out of range", line);
    cfg.max_subdivisions = static_cast<int>(v);
  } else if (key == "ledger.c1") {
    cfg.c1 = parse_override(value, key, line);
  } else if (key == "ledger.C1") {
    cfg.C1 = parse_override(value, key, line);
    if (!cfg.C1.fit && cfg.C1.value < 1) throw ConfigError("ledger.C1 must be >= 1", line);
  } else if (key == "ledger.d1") {
    cfg.d1 = parse_override(value, key, line);
  } else if (key == "ledger.d2") {
    cfg.d2 = parse_override(value, key, line);
  } else if (key == "ledger.kappa") {
    cfg.kappa = parse_number(value, key, line);
    if (!(cfg.kappa > 0)) throw ConfigError("ledger.kappa must be positive", line);
  } else if (key == "ledger.sphere_coeff") {
    cfg.sphere_coeff = parse_number(value, key, line);
    if (!(cfg.sphere_coeff > 0)) throw ConfigError("ledger.sphere_coeff must be positive", line);
  } else if (key == "output.dir") {
    if (value.empty()) throw ConfigError("output.dir is empty", line);
    cfg.output_dir = value;
  } else {
    throw ConfigError("unknown key '" + key + "'", line);
  }
}

/// Parses config text; `#` and `;` start comments. Keys outside a section
/// must be written in dotted form.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::map<std::string, int> seen;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find_first_of("#;");
    const std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header", line);
      section = detail::trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError("empty section name", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    std::string key = detail::trim(s.substr(0, eq));
    std::string value = detail::trim(s.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError("missing key", line);
    if (key.find('.') == std::string::npos) {
      if (section.empty()) {
        if (key == "potential" || key == "alpha" || key == "lambda")
          key = "potential." + std::string(key == "potential" ? "kind" : key);
        else
          throw ConfigError("key '" + key + "' outside any section", line);
      } else {
        key = section + "." + key;
      }
    }
    key = detail::canonical_key(key);
    if (auto it = seen.find(key); it != seen.end())
      throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")", line);
    seen[key] = line;
    apply_config_key(cfg, key, value, line);
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

}  // namespace isoprof
