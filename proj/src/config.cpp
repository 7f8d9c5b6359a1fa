#include "etm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "etm/errors.hpp"

namespace etm {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key))
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    cfg.values_[key] = val;
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_str(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_str(const std::string& key,
                            const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_num(const std::string& key) const {
  const std::string s = get_str(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': not a finite number: " + s);
  }
}

double Config::get_num(const std::string& key, double fallback) const {
  return has(key) ? get_num(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const double v = get_num(key);
  const long n = std::lround(v);
  if (std::abs(v - static_cast<double>(n)) > 1e-9)
    throw ConfigError("config key '" + key + "': expected an integer");
  return n;
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

void Config::check_known(const std::vector<std::string>& allowed) const {
  for (const auto& [key, _] : values_) {
    bool ok = false;
    for (const auto& a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError("unknown config key '" + key + "'");
  }
}

std::vector<std::string> model_config_keys() {
  return {"model.hazard", "model.b", "model.b_bar", "model.phi", "model.sigma"};
}

FiringModel model_from_config(const Config& cfg) {
  const std::string hz = cfg.get_str("model.hazard");
  if (hz == "sigmoid9") {
    const double sigma = cfg.get_num("model.sigma", 0.5);
    return FiringModel::refractory(sigma, HazardCurve::sigmoid9(cfg.get_num("model.b")));
  }
  if (hz == "satquad") {
    const double sigma = cfg.get_num("model.sigma", 1.0);
    double b_bar;
    if (cfg.has("model.b_bar")) {
      b_bar = cfg.get_num("model.b_bar");
    } else {
      const double b = cfg.get_num("model.b");
      b_bar = b * b;
    }
    return FiringModel::refractory(sigma, HazardCurve::sat_quad(b_bar));
  }
  if (hz == "constant") {
    const double sigma = cfg.get_num("model.sigma", 1.0);
    return FiringModel::refractory(sigma, HazardCurve::constant(cfg.get_num("model.phi")));
  }
  throw ConfigError("model.hazard must be sigmoid9, satquad or constant (got '" +
                    hz + "')");
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc())
    throw NumericalError("format_double: conversion failed");
  return std::string(buf, res.ptr);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open csv file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) row.push_back(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << content;
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace etm
