#ifndef GALILEO_IO_KEYVALUE_HPP
#define GALILEO_IO_KEYVALUE_HPP

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "galileo/common.hpp"

namespace galileo::io {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError(fmt::format("{}: cannot parse '{}' as a number", what, s));
  }
  return v;
}

/// Flat `key = value` text; '#' starts a comment. Later keys override earlier ones.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in, const std::string& origin = "<stream>") {
    KeyValueFile kv;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
      ++n;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.resize(hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw IoError(fmt::format("{}:{}: expected key = value", origin, n));
      const std::string key = trim(line.substr(0, eq));
      if (key.empty()) throw IoError(fmt::format("{}:{}: empty key", origin, n));
      kv.values_[key] = trim(line.substr(eq + 1));
    }
    return kv;
  }

  static KeyValueFile load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path));
    return parse(in, path);
  }

  /// Parses "key=value" overrides such as command-line flags.
  void apply_override(const std::string& assignment) {
    std::istringstream in(assignment);
    const KeyValueFile o = parse(in, "override");
    for (const auto& [k, v] : o.values_) values_[k] = v;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(it->second, key);
  }

  int get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, fallback);
    if (v != static_cast<double>(static_cast<int>(v))) throw IoError(fmt::format("{}: expected an integer", key));
    return static_cast<int>(v);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw IoError(fmt::format("{}: expected a boolean, got '{}'", key, v));
  }

  std::vector<double> get_vector(const std::string& key, std::vector<double> fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::istringstream in(it->second);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, key));
    return out;
  }

  void write(std::ostream& out) const {
    for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace galileo::io

#endif  // GALILEO_IO_KEYVALUE_HPP
