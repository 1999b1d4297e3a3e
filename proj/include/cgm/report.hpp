#pragma once

// Serialized experiment reports. JSON for machines, CSV for plotting. Both
// are pure functions of the report contents, so equal inputs give equal bytes.

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#ifndef CGM_VERSION
#define CGM_VERSION "0.1.0"
#endif

namespace cgm {

inline constexpr const char* kToolVersion = CGM_VERSION;

/// Shortest decimal that round-trips to the same double; "nan"/"inf" spelled out.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// JSON has no inf/nan; those become null.
inline nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::ordered_json json_number(const std::optional<double>& v) {
  return v ? json_number(*v) : nlohmann::ordered_json(nullptr);
}

struct Check {
  std::string name;
  double value = 0.0;
  std::string rule;  // human-readable acceptance rule, thresholds included
  bool pass = false;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::string experiment;
  std::string config_text;  // effective configuration, one `key = value` per line
  std::string config_hash;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::vector<Check> checks;
  CsvTable table;
  std::vector<std::string> warnings;
  std::optional<double> wall_seconds;  // only when timing is requested

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }

  std::string to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "cgm_lab";
    j["version"] = kToolVersion;
    j["experiment"] = experiment;
    j["config_hash"] = config_hash;
    j["config"] = config;
    j["results"] = results;
    auto checks_json = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      checks_json.push_back({{"name", c.name}, {"value", json_number(c.value)}, {"rule", c.rule}, {"pass", c.pass}});
    }
    j["checks"] = std::move(checks_json);
    j["warnings"] = warnings;
    if (wall_seconds) j["wall_seconds"] = *wall_seconds;
    j["verdict"] = pass() ? "pass" : "fail";
    return j.dump(2) + "\n";
  }

  std::string to_csv() const {
    std::string out;
    const auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out += ',';
        out += cells[k];
      }
      out += '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
    return out;
  }
};

}  // namespace cgm
