#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcfv/mc_driver.hpp"

namespace mcfv {

/// Invalid configuration; names the offending key when there is one.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat key-value configuration. Every key has a default; unknown keys are
/// rejected. Text form: one `key = value` per line, `#` starts a comment.
class Settings {
 public:
  Settings();

  static const std::vector<std::string>& keys();
  static const std::vector<std::string>& presets();

  void set(const std::string& key, const std::string& value);
  /// Parses `key=value`.
  void set_assignment(const std::string& assignment);
  const std::string& get(const std::string& key) const;

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;

  /// Overwrites the keys a preset defines.
  void apply_preset(const std::string& name);

  void write(std::ostream& out) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Reads `key = value` lines. Throws ConfigError on malformed lines.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in, const std::string& source);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Run configuration for the given problem and grid size. For the space
/// problem, final_time = auto resolves to distance / mu, or 2 when mu = 0.
RunConfig make_run_config(const Settings& s, Problem problem, std::size_t cells);

/// Decimal text with 17 significant digits.
std::string format_double(double value);

}  // namespace mcfv
