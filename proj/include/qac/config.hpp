#pragma once

// Flat key = value run configuration (TOML-like subset): one pair per line,
// `#` comments, optional double quotes around values. Lists are comma
// separated or written as linspace(lo, hi, n) / logspace(lo, hi, n).
//
// The canonical form (sorted "key = value" lines) is embedded in every output
// file as "# config: key = value" lines together with its FNV-1a hash, so an
// output file is itself a valid config for reproducing it.

#include "qac/errors.hpp"
#include "qac/support.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qac {

inline constexpr std::string_view kConfigLinePrefix = "# config: ";

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& text, const std::string& key) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + text + "'");
  return v;
}

} // namespace detail

class RunConfig {
public:
  /// Parses a config file, or the embedded "# config:" lines of an output
  /// file when any are present.
  static RunConfig parse(std::string_view text) {
    RunConfig cfg;
    const bool embedded = text.find(kConfigLinePrefix) != std::string_view::npos;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos)
        end = text.size();
      std::string_view line = text.substr(pos, end - pos);
      const std::size_t line_offset = pos;
      pos = end + 1;
      if (embedded) {
        if (line.substr(0, kConfigLinePrefix.size()) != kConfigLinePrefix)
          continue;
        line.remove_prefix(kConfigLinePrefix.size());
      } else if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      const std::string body = detail::trim(line);
      if (body.empty())
        continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos)
        throw parse_error("config: expected 'key = value'", line_offset);
      std::string key = detail::trim(std::string_view(body).substr(0, eq));
      std::string value = detail::trim(std::string_view(body).substr(eq + 1));
      if (key.empty())
        throw parse_error("config: empty key", line_offset);
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
      cfg.values_[key] = value;
    }
    return cfg;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void erase(const std::string& key) { values_.erase(key); }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      throw std::invalid_argument("config: missing key '" + key + "'");
    return it->second;
  }

  double number(const std::string& key, double fallback) const {
    return has(key) ? detail::parse_number(require(key), key) : fallback;
  }

  long integer(const std::string& key, long fallback) const {
    const double v = number(key, static_cast<double>(fallback));
    if (v != std::floor(v))
      throw std::invalid_argument("config: key '" + key + "' expects an integer");
    return static_cast<long>(v);
  }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const {
    if (!has(key))
      return fallback;
    const auto text = require(key);
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || text.front() == '-')
      throw std::invalid_argument("config: key '" + key + "' expects an unsigned integer");
    return v;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key))
      return fallback;
    const auto v = require(key);
    if (v == "true" || v == "1" || v == "yes")
      return true;
    if (v == "false" || v == "0" || v == "no")
      return false;
    throw std::invalid_argument("config: key '" + key + "' expects true/false");
  }

  std::vector<double> list(const std::string& key, const std::string& fallback) const {
    return parse_list(get(key, fallback), key);
  }

  static std::vector<double> parse_list(const std::string& text, const std::string& key = "list") {
    const std::string t = detail::trim(text);
    for (std::string_view fn : {"linspace", "logspace"}) {
      if (t.rfind(fn, 0) != 0)
        continue;
      const auto open = t.find('('), close = t.rfind(')');
      if (open == std::string::npos || close == std::string::npos || close < open)
        throw std::invalid_argument("config: malformed " + std::string(fn) + " in '" + key + "'");
      const auto args = parse_list(t.substr(open + 1, close - open - 1), key);
      if (args.size() != 3 || args[2] < 1 || args[2] != std::floor(args[2]))
        throw std::invalid_argument("config: " + std::string(fn) + "(lo, hi, n) needs 3 arguments");
      const int n = static_cast<int>(args[2]);
      const bool log = fn == "logspace";
      if (log && !(args[0] > 0 && args[1] > 0))
        throw std::invalid_argument("config: logspace bounds must be positive");
      const double lo = log ? std::log10(args[0]) : args[0];
      const double hi = log ? std::log10(args[1]) : args[1];
      std::vector<double> out;
      for (int i = 0; i < n; ++i) {
        const double x = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
        out.push_back(log ? std::pow(10.0, x) : x);
      }
      // Exact endpoints regardless of rounding in the interpolation.
      out.front() = args[0];
      if (n > 1)
        out.back() = args[1];
      return out;
    }
    std::vector<double> out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ','))
      if (auto v = detail::trim(item); !v.empty())
        out.push_back(detail::parse_number(v, key));
    return out;
  }

  std::string canonical() const {
    std::string s;
    for (const auto& [k, v] : values_)
      s += k + " = " + v + "\n";
    return s;
  }

  std::string hash() const { return hex64(fnv1a64(canonical())); }

  /// Header lines (without the "# " prefix) for output files.
  std::vector<std::string> header_lines(const std::string& title) const {
    std::vector<std::string> out{title, "config_hash: " + hash()};
    for (const auto& [k, v] : values_)
      out.push_back(std::string(kConfigLinePrefix.substr(2)) + k + " = " + v);
    return out;
  }

  const std::map<std::string, std::string>& values() const { return values_; }

private:
  std::map<std::string, std::string> values_;
};

} // namespace qac
