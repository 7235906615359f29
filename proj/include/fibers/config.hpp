#pragma once

// key = value configuration files. '#' starts a comment; blank lines are
// ignored. Values are kept as strings and converted on lookup.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <boost/lexical_cast.hpp>

#include "fibers/error.hpp"

namespace fibers {

class Config {
 public:
  Config() = default;

  static Config parse(std::istream& in, const std::string& origin = "config") {
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto key_end = line.find('=');
      if (trim(line).empty()) continue;
      if (key_end == std::string::npos)
        throw Error(ErrorKind::parse_error, origin + ":" + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(line.substr(0, key_end));
      std::string value = trim(line.substr(key_end + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      if (key.empty())
        throw Error(ErrorKind::parse_error, origin + ":" + std::to_string(lineno) + ": empty key");
      if (!known(key))
        throw Error(ErrorKind::parse_error, origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
      cfg.values_[key] = value;
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io_error, "cannot read config file " + path);
    return parse(in, path);
  }

  static Config from_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  std::optional<std::string> raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  template <class T>
  std::optional<T> get(const std::string& key) const {
    auto v = raw(key);
    if (!v) return std::nullopt;
    try {
      return boost::lexical_cast<T>(*v);
    } catch (const boost::bad_lexical_cast&) {
      throw Error(ErrorKind::parse_error, "config key '" + key + "': bad value '" + *v + "'");
    }
  }

  /// Flag value if given, else config value, else the default.
  template <class T>
  T resolve(const std::optional<T>& flag, const std::string& key, T fallback) const {
    if (flag) return *flag;
    if (auto v = get<T>(key)) return *v;
    return fallback;
  }

  static bool known(const std::string& key) {
    static const char* const keys[] = {"d",          "c",          "tol",          "depth",
                                       "g0",         "escape_radius_factor",    "resolution",
                                       "max_iter",   "landing_tol", "trace_depth", "guard",
                                       "workers",    "eps",        "delta",        "n_angles",
                                       "steps",      "width",      "center",       "max_den"};
    for (const char* k : keys)
      if (key == k) return true;
    return false;
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, std::string> values_;
};

}  // namespace fibers
