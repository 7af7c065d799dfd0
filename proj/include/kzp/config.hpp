#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kzp {

/// Flat `key = value` text configuration. Blank lines and lines starting with
/// '#' are ignored; a later duplicate key overrides an earlier one.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  std::optional<double> get_double(const std::string& key) const;
  std::optional<long long> get_int(const std::string& key) const;
  /// Comma separated list of numbers.
  std::optional<std::vector<double>> get_doubles(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

std::vector<double> parse_double_list(const std::string& text);

}  // namespace kzp
