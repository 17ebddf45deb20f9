// Serialization: config files, CSV/JSON artifacts, grid field text format.
#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "pgflow/balayage.hpp"

namespace pgflow {

// Fixed 17-significant-digit formatting for deterministic CSV output.
std::string format_value(double v);

void write_gridfield(const GridField& f, const std::string& path);
GridField read_gridfield(const std::string& path);

nlohmann::json rational_map_to_json(const RationalMap& g);
RationalMap rational_map_from_json(const nlohmann::json& j);

// Flat key=value config with [section] headers; '#' comments.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback = "") const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  std::string require(const std::string& section, const std::string& key) const;
};

}  // namespace pgflow
