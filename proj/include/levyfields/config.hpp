#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

// Experiment configuration files: a TOML subset chosen so configs stay
// hand-editable and line-diffable.
//
// Supported syntax:
//   * `# comment` lines and trailing comments;
//   * `[section]` headers, one level deep, bare names;
//   * `key = value` with bare keys [A-Za-z0-9_-]+;
//   * values: booleans `true`/`false`, integers, floats (with exponent),
//     double-quoted strings (escapes \" \\ \n \t), and single-line arrays
//     `[v1, v2, ...]`, which may nest (`atoms = [[1.0, 0.5], [-2.0, 0.1]]`).
// Multi-line values, dotted keys, inline tables, and dates are not
// supported; parse errors name the offending line.
//
// Lookups address fields by path: "seed" (root) or "kernel.alpha".  All
// `require_*` accessors throw ConfigError naming the path; numeric
// accessors accept an integer where a real is wanted.

namespace levyfields {

class ConfigValue {
  public:
    using Array = std::vector<ConfigValue>;

    explicit ConfigValue(bool v) : data_(v) {}
    explicit ConfigValue(std::int64_t v) : data_(v) {}
    explicit ConfigValue(double v) : data_(v) {}
    explicit ConfigValue(std::string v) : data_(std::move(v)) {}
    explicit ConfigValue(Array v) : data_(std::move(v)) {}

    bool is_bool() const { return std::holds_alternative<bool>(data_); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(data_); }
    bool is_real() const { return std::holds_alternative<double>(data_); }
    bool is_number() const { return is_int() || is_real(); }
    bool is_string() const { return std::holds_alternative<std::string>(data_); }
    bool is_array() const { return std::holds_alternative<Array>(data_); }

    bool as_bool() const { return std::get<bool>(data_); }
    std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
    double as_number() const {
        return is_int() ? static_cast<double>(std::get<std::int64_t>(data_))
                        : std::get<double>(data_);
    }
    const std::string& as_string() const { return std::get<std::string>(data_); }
    const Array& as_array() const { return std::get<Array>(data_); }

    const char* type_name() const;

  private:
    std::variant<bool, std::int64_t, double, std::string, Array> data_;
};

struct Config {
    std::string text; // raw file contents, kept for provenance echo
    std::map<std::string, std::map<std::string, ConfigValue>> sections; // "" = root

    bool has(const std::string& path) const;
    // nullptr when absent; throws nothing.
    const ConfigValue* find(const std::string& path) const;

    double require_real(const std::string& path) const;
    std::int64_t require_int(const std::string& path) const;
    bool require_bool(const std::string& path) const;
    const std::string& require_string(const std::string& path) const;
    std::vector<double> require_reals(const std::string& path) const;
    std::vector<std::int64_t> require_ints(const std::string& path) const;
    // Array of two-element numeric arrays.
    std::vector<std::array<double, 2>> require_pairs(const std::string& path) const;

    double real_or(const std::string& path, double fallback) const;
    std::int64_t int_or(const std::string& path, std::int64_t fallback) const;
    bool bool_or(const std::string& path, bool fallback) const;
    std::string string_or(const std::string& path, const std::string& fallback) const;
    std::vector<double> reals_or(const std::string& path, std::vector<double> fallback) const;
};

// Throws ConfigError with a line number on malformed input.
Config parse_config(const std::string& text);

// Reads and parses; throws ConfigError when the file cannot be read.
Config load_config(const std::filesystem::path& path);

} // namespace levyfields
