#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rgbn {

/// A value in a TOML-style `key = value` file: number, boolean, quoted
/// string, or a (possibly nested) bracketed array of those.
class ConfigValue {
 public:
  using Array = std::vector<ConfigValue>;

  ConfigValue() = default;
  explicit ConfigValue(double v) : value_(v) {}
  explicit ConfigValue(bool v) : value_(v) {}
  explicit ConfigValue(std::string v) : value_(std::move(v)) {}
  explicit ConfigValue(Array v) : value_(std::move(v)) {}

  bool is_number() const noexcept { return std::holds_alternative<double>(value_); }
  bool is_bool() const noexcept { return std::holds_alternative<bool>(value_); }
  bool is_string() const noexcept { return std::holds_alternative<std::string>(value_); }
  bool is_array() const noexcept { return std::holds_alternative<Array>(value_); }

  double as_number() const;
  int as_int() const;
  bool as_bool() const;
  const std::string& as_string() const;
  const Array& as_array() const;
  std::vector<double> as_numbers() const;

 private:
  std::variant<double, bool, std::string, Array> value_;
};

/// Flat key/value document. `[section]` headers prefix following keys with
/// "section.". Comments start with '#'. Arrays may span several lines.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const ConfigValue& at(const std::string& key) const;
  std::optional<ConfigValue> find(const std::string& key) const;

  double number_or(const std::string& key, double fallback) const;
  int int_or(const std::string& key, int fallback) const;
  bool bool_or(const std::string& key, bool fallback) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;

  std::vector<std::string> keys() const;

 private:
  std::map<std::string, ConfigValue> values_;
};

}  // namespace rgbn
