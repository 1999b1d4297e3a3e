#pragma once

// Experiment configuration: a flat `key = value` document with `#` comments,
// merged with command-line overrides, validated and fully defaulted. The
// effective configuration prints back to the same format; reloading it yields
// the same configuration and the same hash.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgm/analytic.hpp"
#include "cgm/lattice.hpp"
#include "cgm/report.hpp"

namespace cgm {

/// Parse or validation failure. key() names the offending key, or is empty
/// for syntax errors that are not tied to one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : "config key '" + key + "': " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

using KeyValues = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// duplicate keys are errors.
inline KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected `key = value`");
    }
    std::string key = detail::trim(std::string_view(body).substr(0, eq));
    std::string value = detail::trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) throw ConfigError(key, "duplicate key");
  }
  return kv;
}

inline KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

enum class ExperimentKind { rains, burke, tail, exit, busemann, cif };
enum class TailModel { bulk, stationary };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::rains: return "rains";
    case ExperimentKind::burke: return "burke";
    case ExperimentKind::tail: return "tail";
    case ExperimentKind::exit: return "exit";
    case ExperimentKind::busemann: return "busemann";
    case ExperimentKind::cif: return "cif";
  }
  return "?";
}

inline const char* to_string(TailModel m) { return m == TailModel::bulk ? "bulk" : "stationary"; }

inline ExperimentKind parse_experiment_kind(const std::string& s) {
  for (auto k : {ExperimentKind::rains, ExperimentKind::burke, ExperimentKind::tail, ExperimentKind::exit,
                 ExperimentKind::busemann, ExperimentKind::cif}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("experiment", "unknown experiment '" + s + "'");
}

/// Fully resolved experiment parameters. `workers` affects scheduling only
/// and is left out of the effective text and the hash.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::rains;
  Coord m = 8;
  Coord n = 8;
  double w = 0.4;
  double z = 0.6;
  TailModel model = TailModel::bulk;
  std::vector<double> s_grid;
  std::vector<double> x_grid;
  Coord k = 1;
  Coord l = 1;
  std::vector<Coord> sizes;
  std::uint64_t scaling_reps = 10000;
  double quantile = 0.9;
  std::uint64_t reps = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double level = 0.99;
  bool allow_positive_exponent = false;
};

namespace detail {

inline double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw ConfigError(key, "not a number: '" + v + "'");
  if (!std::isfinite(out)) throw ConfigError(key, "must be finite");
  return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) throw ConfigError(key, "not an integer: '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& v, Parse parse) {
  std::vector<T> out;
  if (trim(v).empty()) return out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const auto comma = v.find(',', pos);
    const std::string item = trim(std::string_view(v).substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (item.empty()) throw ConfigError(key, "empty list element");
    out.push_back(parse(key, item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::vector<double> parse_reals(const std::string& key, const std::string& v) {
  return parse_list<double>(key, v, parse_real);
}

inline std::string join_reals(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? "," : "") + format_double(xs[k]);
  return out;
}

inline std::string join_ints(const std::vector<Coord>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) out += (k ? "," : "") + std::to_string(xs[k]);
  return out;
}

inline std::vector<double> linspace_grid(double lo, double hi, int count) {
  std::vector<double> g;
  for (int k = 0; k < count; ++k) g.push_back(std::round((lo + (hi - lo) * k / (count - 1)) * 1e9) / 1e9);
  return g;
}

inline const std::set<std::string>& common_keys() {
  static const std::set<std::string> keys{"experiment", "reps", "seed", "workers", "level"};
  return keys;
}

inline std::set<std::string> kind_keys(ExperimentKind kind, TailModel model) {
  switch (kind) {
    case ExperimentKind::rains: return {"m", "n", "w", "z", "allow_positive_exponent"};
    case ExperimentKind::burke: return {"m", "n", "z"};
    case ExperimentKind::tail:
      return model == TailModel::stationary ? std::set<std::string>{"model", "m", "n", "z", "s_grid"}
                                            : std::set<std::string>{"model", "m", "n", "s_grid"};
    case ExperimentKind::exit: return {"m", "n", "z", "s_grid", "sizes", "scaling_reps", "quantile"};
    case ExperimentKind::busemann: return {"m", "n", "k", "l", "s_grid"};
    case ExperimentKind::cif: return {"n", "x_grid"};
  }
  return {};
}

inline void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace detail

/// Every key any experiment understands.
inline const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys{"experiment", "reps", "seed", "workers", "level", "m", "n", "w", "z",
                                          "allow_positive_exponent", "model", "s_grid", "x_grid", "k", "l",
                                          "sizes", "scaling_reps", "quantile"};
  return keys;
}

/// Defaults, then `kv` on top, then validation.
inline ExperimentConfig build_config(ExperimentKind kind, const KeyValues& kv) {
  using namespace detail;
  for (const auto& [key, value] : kv) {
    if (!known_config_keys().contains(key)) throw ConfigError(key, "unknown key");
  }
  if (const auto it = kv.find("experiment"); it != kv.end() && parse_experiment_kind(it->second) != kind) {
    throw ConfigError("experiment", "file is for '" + it->second + "', command runs '" + to_string(kind) + "'");
  }

  ExperimentConfig c;
  c.kind = kind;
  if (const auto it = kv.find("model"); it != kv.end()) {
    if (it->second == "bulk") {
      c.model = TailModel::bulk;
    } else if (it->second == "stationary") {
      c.model = TailModel::stationary;
    } else {
      throw ConfigError("model", "expected bulk or stationary, got '" + it->second + "'");
    }
  }
  const std::set<std::string> allowed = kind_keys(kind, c.model);
  for (const auto& [key, value] : kv) {
    if (!common_keys().contains(key) && !allowed.contains(key)) {
      throw ConfigError(key, std::string("does not apply to experiment '") + to_string(kind) + "'" +
                                 (kind == ExperimentKind::tail && key == "z" ? " with model = bulk" : ""));
    }
  }

  bool z_auto = false;
  switch (kind) {
    case ExperimentKind::rains:
      c.m = 8; c.n = 8; c.w = 0.4; c.z = 0.6; c.reps = 1000000;
      break;
    case ExperimentKind::burke:
      c.m = 200; c.n = 200; c.z = 0.5; c.reps = 25;
      break;
    case ExperimentKind::tail:
      c.m = 100; c.n = 100; c.reps = 100000; z_auto = true;
      c.s_grid = linspace_grid(1.0, 3.0, 21);
      break;
    case ExperimentKind::exit:
      c.m = 100; c.n = 100; c.reps = 100000; z_auto = true;
      c.s_grid = {0.5, 1.0, 1.5};
      c.sizes = {64, 128, 256};
      break;
    case ExperimentKind::busemann:
      c.m = 500; c.n = 500; c.k = 1; c.l = 1; c.reps = 10000;
      c.s_grid = {0.5, 1.0, 1.5, 2.0, 3.0};
      break;
    case ExperimentKind::cif:
      c.m = 0; c.n = 2000; c.reps = 20000;
      c.x_grid = {0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
      break;
  }

  const auto get = [&kv](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto v = get("reps")) c.reps = parse_int<std::uint64_t>("reps", *v);
  if (auto v = get("seed")) c.seed = parse_int<std::uint64_t>("seed", *v);
  if (auto v = get("workers")) c.workers = parse_int<unsigned>("workers", *v);
  if (auto v = get("level")) c.level = parse_real("level", *v);
  if (auto v = get("m")) c.m = parse_int<Coord>("m", *v);
  if (auto v = get("n")) c.n = parse_int<Coord>("n", *v);
  if (auto v = get("w")) c.w = parse_real("w", *v);
  if (auto v = get("z")) {
    c.z = parse_real("z", *v);
    z_auto = false;
  }
  if (auto v = get("allow_positive_exponent")) c.allow_positive_exponent = parse_bool("allow_positive_exponent", *v);
  if (auto v = get("s_grid")) c.s_grid = parse_reals("s_grid", *v);
  if (auto v = get("x_grid")) c.x_grid = parse_reals("x_grid", *v);
  if (auto v = get("k")) c.k = parse_int<Coord>("k", *v);
  if (auto v = get("l")) c.l = parse_int<Coord>("l", *v);
  if (auto v = get("sizes")) c.sizes = parse_list<Coord>("sizes", *v, parse_int<Coord>);
  if (auto v = get("scaling_reps")) c.scaling_reps = parse_int<std::uint64_t>("scaling_reps", *v);
  if (auto v = get("quantile")) c.quantile = parse_real("quantile", *v);

  require(c.reps >= 1, "reps", "must be >= 1");
  require(c.workers >= 1 && c.workers <= 1024, "workers", "must lie in [1, 1024]");
  require(c.level > 0.0 && c.level < 1.0, "level", "must lie in (0,1)");
  constexpr Coord kMaxSide = Coord{1} << 20;
  const Coord min_side = kind == ExperimentKind::rains ? 0 : (kind == ExperimentKind::busemann ? 2 : 1);
  if (kind != ExperimentKind::cif) {
    require(c.m >= min_side && c.m <= kMaxSide, "m", "must lie in [" + std::to_string(min_side) + ", 2^20]");
  }
  require(c.n >= min_side && c.n <= kMaxSide, "n", "must lie in [" + std::to_string(min_side) + ", 2^20]");
  if (kind == ExperimentKind::cif) require(c.n >= 2, "n", "must be >= 2");
  if (allowed.contains("w")) require(c.w > 0.0 && c.w < 1.0, "w", "must lie in (0,1)");
  if (z_auto) c.z = shape_zeta(Direction(static_cast<double>(c.m), static_cast<double>(c.n)));
  if (allowed.contains("z")) require(c.z > 0.0 && c.z < 1.0, "z", "must lie in (0,1)");
  if (kind == ExperimentKind::rains && c.w > c.z) {
    require(c.allow_positive_exponent, "w",
            "w > z makes the estimator unbounded; set allow_positive_exponent = true to run it anyway");
  }
  if (allowed.contains("s_grid")) {
    require(!c.s_grid.empty(), "s_grid", "must not be empty");
    for (double s : c.s_grid) {
      require(kind == ExperimentKind::exit ? s > 0.0 : s >= 0.0, "s_grid",
              kind == ExperimentKind::exit ? "levels must be > 0" : "levels must be >= 0");
    }
  }
  if (allowed.contains("x_grid")) {
    require(!c.x_grid.empty(), "x_grid", "must not be empty");
    for (double x : c.x_grid) require(x >= 0.0 && x <= 1.0, "x_grid", "points must lie in [0,1]");
  }
  if (allowed.contains("k")) {
    require(c.k >= 0 && c.k <= c.m - 1, "k", "must lie in [0, m-1]");
    require(c.l >= 0 && c.l <= c.n - 1, "l", "must lie in [0, n-1]");
  }
  if (allowed.contains("sizes")) {
    for (Coord s : c.sizes) require(s >= 1 && s <= kMaxSide, "sizes", "each size must lie in [1, 2^20]");
    require(c.scaling_reps >= 1, "scaling_reps", "must be >= 1");
    require(c.quantile > 0.0 && c.quantile <= 1.0, "quantile", "must lie in (0,1]");
  }
  return c;
}

inline ExperimentConfig build_config(ExperimentKind kind, const std::string& text) {
  return build_config(kind, parse_key_values(text));
}

/// The effective configuration as `key = value` lines in a fixed order.
inline std::string effective_config_text(const ExperimentConfig& c) {
  using detail::join_ints;
  using detail::join_reals;
  const auto keys = detail::kind_keys(c.kind, c.model);
  std::string out;
  const auto put = [&out](const std::string& key, const std::string& value) { out += key + " = " + value + "\n"; };
  put("experiment", to_string(c.kind));
  if (keys.contains("model")) put("model", to_string(c.model));
  if (keys.contains("m")) put("m", std::to_string(c.m));
  if (keys.contains("n")) put("n", std::to_string(c.n));
  if (keys.contains("w")) put("w", format_double(c.w));
  if (keys.contains("z")) put("z", format_double(c.z));
  if (keys.contains("allow_positive_exponent")) put("allow_positive_exponent", c.allow_positive_exponent ? "true" : "false");
  if (keys.contains("k")) put("k", std::to_string(c.k));
  if (keys.contains("l")) put("l", std::to_string(c.l));
  if (keys.contains("s_grid")) put("s_grid", join_reals(c.s_grid));
  if (keys.contains("x_grid")) put("x_grid", join_reals(c.x_grid));
  if (keys.contains("sizes")) put("sizes", join_ints(c.sizes));
  if (keys.contains("scaling_reps")) put("scaling_reps", std::to_string(c.scaling_reps));
  if (keys.contains("quantile")) put("quantile", format_double(c.quantile));
  put("level", format_double(c.level));
  put("reps", std::to_string(c.reps));
  put("seed", std::to_string(c.seed));
  return out;
}

inline std::string config_hash(const ExperimentConfig& c) {
  char buf[17];
  const auto h = fnv1a64(effective_config_text(c));
  const auto res = std::to_chars(buf, buf + sizeof buf, h, 16);
  return std::string(16 - static_cast<std::size_t>(res.ptr - buf), '0') + std::string(buf, res.ptr);
}

/// The effective configuration as an ordered JSON object, values typed.
inline nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  for (const auto& [key, value] : [&] {
         std::vector<std::pair<std::string, std::string>> kvs;
         const std::string text = effective_config_text(c);
         std::istringstream in(text);
         for (std::string line; std::getline(in, line);) {
           const auto eq = line.find(" = ");
           kvs.emplace_back(line.substr(0, eq), line.substr(eq + 3));
         }
         return kvs;
       }()) {
    if (key == "experiment" || key == "model") {
      j[key] = value;
    } else if (key == "allow_positive_exponent") {
      j[key] = value == "true";
    } else if (key == "s_grid" || key == "x_grid") {
      auto arr = nlohmann::ordered_json::array();
      for (double x : detail::parse_reals(key, value)) arr.push_back(x);
      j[key] = arr;
    } else if (key == "sizes") {
      auto arr = nlohmann::ordered_json::array();
      for (Coord s : detail::parse_list<Coord>(key, value, detail::parse_int<Coord>)) arr.push_back(s);
      j[key] = arr;
    } else if (key == "seed" || key == "reps" || key == "scaling_reps") {
      j[key] = detail::parse_int<std::uint64_t>(key, value);
    } else if (key == "m" || key == "n" || key == "k" || key == "l") {
      j[key] = detail::parse_int<Coord>(key, value);
    } else {
      j[key] = detail::parse_real(key, value);
    }
  }
  return j;
}

}  // namespace cgm
