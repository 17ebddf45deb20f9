#include "pgflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pgflow {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_gridfield(const GridField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "{x0=" << format_value(f.grid.x0) << " y0=" << format_value(f.grid.y0)
      << " h=" << format_value(f.grid.h) << " nx=" << f.grid.nx
      << " ny=" << f.grid.ny << "}\n";
  for (int j = 0; j < f.grid.ny; ++j) {
    for (int i = 0; i < f.grid.nx; ++i) {
      if (i) out << ' ';
      out << format_value(f.values(i, j));
    }
    out << '\n';
  }
}

GridField read_gridfield(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  std::string header;
  std::getline(in, header);
  Grid g;
  if (std::sscanf(header.c_str(), "{x0=%lf y0=%lf h=%lf nx=%d ny=%d}", &g.x0,
                  &g.y0, &g.h, &g.nx, &g.ny) != 5)
    throw ConfigError("bad grid field header in " + path);
  GridField f = GridField::zeros(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (!(in >> f.values(i, j)))
        throw ConfigError("truncated grid field in " + path);
  return f;
}

nlohmann::json rational_map_to_json(const RationalMap& g) {
  nlohmann::json j;
  j["lead_re"] = g.lead.real();
  j["lead_im"] = g.lead.imag();
  j["zeros"] = nlohmann::json::array();
  j["poles"] = nlohmann::json::array();
  for (const auto& z : g.zeros)
    j["zeros"].push_back({z.location.real(), z.location.imag(), z.mult});
  for (const auto& p : g.poles)
    j["poles"].push_back({p.location.real(), p.location.imag(), p.mult});
  return j;
}

RationalMap rational_map_from_json(const nlohmann::json& j) {
  RationalMap g;
  g.lead = Complex(j.at("lead_re").get<double>(), j.at("lead_im").get<double>());
  for (const auto& z : j.at("zeros"))
    g.zeros.push_back(
        {Complex(z.at(0).get<double>(), z.at(1).get<double>()), z.at(2).get<int>()});
  for (const auto& p : j.at("poles"))
    g.poles.push_back(
        {Complex(p.at(0).get<double>(), p.at(1).get<double>()), p.at(2).get<int>()});
  return g;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_text(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      cfg.sections[section];
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value, got '" + t + "'");
    cfg.sections[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  return it != sections.end() && it->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
  auto it = sections.find(section);
  if (it == sections.end()) return fallback;
  auto kt = it->second.find(key);
  return kt == it->second.end() ? fallback : kt->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key,
                              double fallback) const {
  if (!has(section, key)) return fallback;
  try {
    return std::stod(get(section, key));
  } catch (const std::exception&) {
    throw ConfigError("config value [" + section + "]" + key +
                      " is not a number");
  }
}

int ConfigFile::get_int(const std::string& section, const std::string& key,
                        int fallback) const {
  if (!has(section, key)) return fallback;
  try {
    return std::stoi(get(section, key));
  } catch (const std::exception&) {
    throw ConfigError("config value [" + section + "]" + key +
                      " is not an integer");
  }
}

std::string ConfigFile::require(const std::string& section,
                                const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing config key [" + section + "] " + key);
  return get(section, key);
}

}  // namespace pgflow
