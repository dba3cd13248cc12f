#pragma once

// Plain-text `key = value` documents used for model files, population
// configs, column schemas, fetch manifests and experiment configs.
//
//   # comment
//   key = value
//   repeated = first
//   repeated = second
//
// Keys keep their file order and may repeat. Blank lines and lines starting
// with '#' are ignored; whitespace around keys and values is trimmed.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fairbayes {

class KeyValueDoc {
 public:
  static KeyValueDoc parse(std::string_view text);
  static KeyValueDoc read_file(const std::filesystem::path& path);

  void add(std::string key, std::string value);
  /// Replaces every existing entry for `key` with a single one.
  void set(const std::string& key, std::string value);

  bool contains(std::string_view key) const;
  /// Last value for `key`, if any.
  std::optional<std::string> get(std::string_view key) const;
  std::vector<std::string> get_all(std::string_view key) const;
  /// Throws std::runtime_error naming the key when absent.
  std::string require(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept {
    return entries_;
  }

  std::string to_string() const;
  void write_file(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);
std::string format_doubles(const std::vector<double>& v);

/// Strict parse: the whole string (after trimming) must be a number.
double parse_double(std::string_view s);
bool try_parse_double(std::string_view s, double& out);
/// Whitespace- or comma-separated list of numbers.
std::vector<double> parse_doubles(std::string_view s);
long long parse_int(std::string_view s);

}  // namespace fairbayes
