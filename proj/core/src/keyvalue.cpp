#include "rgbn/keyvalue.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rgbn/error.hpp"

namespace rgbn {

namespace {

class ValueParser {
 public:
  ValueParser(std::string_view text, int line) : text_(text), line_(line) {}

  ConfigValue parse_document_value() {
    ConfigValue v = parse_value();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters after value");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  ConfigValue parse_value() {
    skip_space();
    if (pos_ >= text_.size()) fail("missing value");
    const char c = text_[pos_];
    if (c == '[') return parse_array();
    if (c == '"') return parse_string();
    if (text_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return ConfigValue(true);
    }
    if (text_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return ConfigValue(false);
    }
    return parse_number();
  }

  ConfigValue parse_array() {
    ++pos_;  // '['
    ConfigValue::Array items;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return ConfigValue(std::move(items));
    }
    for (;;) {
      items.push_back(parse_value());
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated array");
      if (text_[pos_] == ',') {
        ++pos_;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ']') {  // trailing comma
          ++pos_;
          break;
        }
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return ConfigValue(std::move(items));
  }

  ConfigValue parse_string() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out.push_back(text_[pos_++]);
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return ConfigValue(std::move(out));
  }

  ConfigValue parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '.' || text_[pos_] == '-' ||
                                   text_[pos_] == '+' || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string token(text_.substr(start, pos_ - start));
    std::erase(token, '_');
    if (token.empty()) fail("expected a value");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
      fail("bad number '" + token + "'");
    }
    return ConfigValue(v);
  }

  std::string_view text_;
  int line_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Drops a '#' comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == '[') ++depth;
    if (c == ']') --depth;
  }
  return depth;
}

[[noreturn]] void type_error(const char* expected) {
  throw Error(ErrorCode::ParseError, std::string("config value is not a ") + expected);
}

}  // namespace

double ConfigValue::as_number() const {
  if (!is_number()) type_error("number");
  return std::get<double>(value_);
}

int ConfigValue::as_int() const {
  const double v = as_number();
  if (v != std::floor(v)) type_error("integer");
  return static_cast<int>(v);
}

bool ConfigValue::as_bool() const {
  if (!is_bool()) type_error("boolean");
  return std::get<bool>(value_);
}

const std::string& ConfigValue::as_string() const {
  if (!is_string()) type_error("string");
  return std::get<std::string>(value_);
}

const ConfigValue::Array& ConfigValue::as_array() const {
  if (!is_array()) type_error("array");
  return std::get<Array>(value_);
}

std::vector<double> ConfigValue::as_numbers() const {
  std::vector<double> out;
  for (const auto& item : as_array()) out.push_back(item.as_number());
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::string section;
  std::string pending_key;
  std::string pending_value;
  int pending_line = 0;
  int line_no = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(strip_comment(raw));
    if (!pending_key.empty()) {
      pending_value += ' ';
      pending_value += line;
      if (bracket_balance(pending_value) <= 0) {
        cfg.values_[pending_key] = ValueParser(pending_value, pending_line).parse_document_value();
        pending_key.clear();
      }
      continue;
    }
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string_view::npos) {
      if (line.back() != ']') {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad section");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty key");
    }
    const std::string full_key = section.empty() ? std::string(key) : section + "." + std::string(key);
    if (bracket_balance(value) > 0) {
      pending_key = full_key;
      pending_value = std::string(value);
      pending_line = line_no;
      continue;
    }
    cfg.values_[full_key] = ValueParser(value, line_no).parse_document_value();
  }
  if (!pending_key.empty()) {
    throw Error(ErrorCode::ParseError,
                "line " + std::to_string(pending_line) + ": unterminated array for " + pending_key);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const ConfigValue& KeyValueConfig::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::ParseError, "missing key '" + key + "'");
  return it->second;
}

std::optional<ConfigValue> KeyValueConfig::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double KeyValueConfig::number_or(const std::string& key, double fallback) const {
  const auto v = find(key);
  return v ? v->as_number() : fallback;
}

int KeyValueConfig::int_or(const std::string& key, int fallback) const {
  const auto v = find(key);
  return v ? v->as_int() : fallback;
}

bool KeyValueConfig::bool_or(const std::string& key, bool fallback) const {
  const auto v = find(key);
  return v ? v->as_bool() : fallback;
}

std::string KeyValueConfig::string_or(const std::string& key, const std::string& fallback) const {
  const auto v = find(key);
  return v ? v->as_string() : fallback;
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

}  // namespace rgbn
