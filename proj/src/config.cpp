#include "levyfields/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "levyfields/errors.hpp"

namespace levyfields {

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + what);
}

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

// Cursor over one logical line.
struct Scanner {
    const std::string& s;
    std::size_t pos = 0;
    std::size_t line_no;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool at_end_or_comment() {
        skip_ws();
        return pos >= s.size() || s[pos] == '#';
    }
    char peek() const { return pos < s.size() ? s[pos] : '\0'; }
};

ConfigValue parse_value(Scanner& sc); // forward

ConfigValue parse_string(Scanner& sc) {
    ++sc.pos; // opening quote
    std::string out;
    while (sc.pos < sc.s.size() && sc.s[sc.pos] != '"') {
        char c = sc.s[sc.pos++];
        if (c == '\\') {
            if (sc.pos >= sc.s.size()) fail_line(sc.line_no, "dangling escape in string");
            switch (sc.s[sc.pos++]) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            default: fail_line(sc.line_no, "unsupported string escape");
            }
        } else {
            out += c;
        }
    }
    if (sc.pos >= sc.s.size()) fail_line(sc.line_no, "unterminated string");
    ++sc.pos; // closing quote
    return ConfigValue(std::move(out));
}

ConfigValue parse_array(Scanner& sc) {
    ++sc.pos; // opening bracket
    ConfigValue::Array items;
    sc.skip_ws();
    if (sc.peek() == ']') {
        ++sc.pos;
        return ConfigValue(std::move(items));
    }
    for (;;) {
        items.push_back(parse_value(sc));
        sc.skip_ws();
        if (sc.peek() == ',') {
            ++sc.pos;
            sc.skip_ws();
            if (sc.peek() == ']') { // tolerate one trailing comma
                ++sc.pos;
                return ConfigValue(std::move(items));
            }
            continue;
        }
        if (sc.peek() == ']') {
            ++sc.pos;
            return ConfigValue(std::move(items));
        }
        fail_line(sc.line_no, "expected ',' or ']' in array");
    }
}

ConfigValue parse_number(Scanner& sc) {
    const std::size_t start = sc.pos;
    bool is_real = false;
    if (sc.peek() == '+' || sc.peek() == '-') ++sc.pos;
    while (sc.pos < sc.s.size()) {
        const char c = sc.s[sc.pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            ++sc.pos;
        } else if (c == '.' || c == 'e' || c == 'E') {
            is_real = true;
            ++sc.pos;
            if ((c == 'e' || c == 'E') && (sc.peek() == '+' || sc.peek() == '-')) ++sc.pos;
        } else {
            break;
        }
    }
    const std::string token = sc.s.substr(start, sc.pos - start);
    if (token.empty() || token == "+" || token == "-")
        fail_line(sc.line_no, "expected a value");
    errno = 0;
    char* end = nullptr;
    if (!is_real) {
        const long long v = std::strtoll(token.c_str(), &end, 10);
        if (errno != 0 || end != token.c_str() + token.size())
            fail_line(sc.line_no, "malformed integer '" + token + "'");
        return ConfigValue(static_cast<std::int64_t>(v));
    }
    const double v = std::strtod(token.c_str(), &end);
    if (errno == ERANGE || end != token.c_str() + token.size())
        fail_line(sc.line_no, "malformed number '" + token + "'");
    return ConfigValue(v);
}

ConfigValue parse_value(Scanner& sc) {
    sc.skip_ws();
    const char c = sc.peek();
    if (c == '"') return parse_string(sc);
    if (c == '[') return parse_array(sc);
    if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t end = sc.pos;
        while (end < sc.s.size() && std::isalpha(static_cast<unsigned char>(sc.s[end]))) ++end;
        const std::string word = sc.s.substr(sc.pos, end - sc.pos);
        sc.pos = end;
        if (word == "true") return ConfigValue(true);
        if (word == "false") return ConfigValue(false);
        fail_line(sc.line_no, "unquoted value '" + word + "' (strings need double quotes)");
    }
    return parse_number(sc);
}

[[noreturn]] void fail_path(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const ConfigValue& require(const Config& cfg, const std::string& path) {
    const ConfigValue* v = cfg.find(path);
    if (v == nullptr) fail_path(path, "required key is missing");
    return *v;
}

double number_at(const ConfigValue& v, const std::string& path) {
    if (!v.is_number()) fail_path(path, std::string("expected a number, got ") + v.type_name());
    return v.as_number();
}

} // namespace

const char* ConfigValue::type_name() const {
    if (is_bool()) return "a boolean";
    if (is_int()) return "an integer";
    if (is_real()) return "a float";
    if (is_string()) return "a string";
    return "an array";
}

bool Config::has(const std::string& path) const { return find(path) != nullptr; }

const ConfigValue* Config::find(const std::string& path) const {
    const std::size_t dot = path.find('.');
    const std::string section = dot == std::string::npos ? std::string() : path.substr(0, dot);
    const std::string key = dot == std::string::npos ? path : path.substr(dot + 1);
    const auto sec = sections.find(section);
    if (sec == sections.end()) return nullptr;
    const auto it = sec->second.find(key);
    return it == sec->second.end() ? nullptr : &it->second;
}

double Config::require_real(const std::string& path) const {
    return number_at(require(*this, path), path);
}

std::int64_t Config::require_int(const std::string& path) const {
    const ConfigValue& v = require(*this, path);
    if (!v.is_int()) fail_path(path, std::string("expected an integer, got ") + v.type_name());
    return v.as_int();
}

bool Config::require_bool(const std::string& path) const {
    const ConfigValue& v = require(*this, path);
    if (!v.is_bool()) fail_path(path, std::string("expected a boolean, got ") + v.type_name());
    return v.as_bool();
}

const std::string& Config::require_string(const std::string& path) const {
    const ConfigValue& v = require(*this, path);
    if (!v.is_string()) fail_path(path, std::string("expected a string, got ") + v.type_name());
    return v.as_string();
}

std::vector<double> Config::require_reals(const std::string& path) const {
    const ConfigValue& v = require(*this, path);
    if (!v.is_array()) fail_path(path, std::string("expected an array, got ") + v.type_name());
    std::vector<double> out;
    out.reserve(v.as_array().size());
    for (std::size_t i = 0; i < v.as_array().size(); ++i)
        out.push_back(number_at(v.as_array()[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::int64_t> Config::require_ints(const std::string& path) const {
    const ConfigValue& v = require(*this, path);
    if (!v.is_array()) fail_path(path, std::string("expected an array, got ") + v.type_name());
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < v.as_array().size(); ++i) {
        const ConfigValue& item = v.as_array()[i];
        const std::string item_path = path + "[" + std::to_string(i) + "]";
        if (!item.is_int())
            fail_path(item_path, std::string("expected an integer, got ") + item.type_name());
        out.push_back(item.as_int());
    }
    return out;
}

std::vector<std::array<double, 2>> Config::require_pairs(const std::string& path) const {
    const ConfigValue& v = require(*this, path);
    if (!v.is_array()) fail_path(path, std::string("expected an array, got ") + v.type_name());
    std::vector<std::array<double, 2>> out;
    for (std::size_t i = 0; i < v.as_array().size(); ++i) {
        const ConfigValue& item = v.as_array()[i];
        const std::string item_path = path + "[" + std::to_string(i) + "]";
        if (!item.is_array() || item.as_array().size() != 2)
            fail_path(item_path, "expected a two-element array");
        out.push_back({number_at(item.as_array()[0], item_path + "[0]"),
                       number_at(item.as_array()[1], item_path + "[1]")});
    }
    return out;
}

double Config::real_or(const std::string& path, double fallback) const {
    return has(path) ? require_real(path) : fallback;
}
std::int64_t Config::int_or(const std::string& path, std::int64_t fallback) const {
    return has(path) ? require_int(path) : fallback;
}
bool Config::bool_or(const std::string& path, bool fallback) const {
    return has(path) ? require_bool(path) : fallback;
}
std::string Config::string_or(const std::string& path, const std::string& fallback) const {
    return has(path) ? require_string(path) : fallback;
}
std::vector<double> Config::reals_or(const std::string& path,
                                     std::vector<double> fallback) const {
    return has(path) ? require_reals(path) : fallback;
}

Config parse_config(const std::string& text) {
    Config cfg;
    cfg.text = text;
    cfg.sections[""];
    std::string current;

    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        Scanner sc{line, 0, line_no};
        if (sc.at_end_or_comment()) continue;

        if (sc.peek() == '[') {
            ++sc.pos;
            std::size_t start = sc.pos;
            while (sc.pos < line.size() && is_bare_key_char(line[sc.pos])) ++sc.pos;
            const std::string name = line.substr(start, sc.pos - start);
            if (name.empty() || sc.peek() != ']')
                fail_line(line_no, "malformed section header");
            ++sc.pos;
            if (!sc.at_end_or_comment()) fail_line(line_no, "trailing text after section header");
            if (cfg.sections.count(name) != 0)
                fail_line(line_no, "duplicate section [" + name + "]");
            cfg.sections[name];
            current = name;
            continue;
        }

        std::size_t start = sc.pos;
        while (sc.pos < line.size() && is_bare_key_char(line[sc.pos])) ++sc.pos;
        const std::string key = line.substr(start, sc.pos - start);
        if (key.empty()) fail_line(line_no, "expected a key");
        sc.skip_ws();
        if (sc.peek() != '=') fail_line(line_no, "expected '=' after key '" + key + "'");
        ++sc.pos;
        ConfigValue value = parse_value(sc);
        if (!sc.at_end_or_comment()) fail_line(line_no, "trailing text after value");
        auto [it, inserted] = cfg.sections[current].emplace(key, std::move(value));
        (void)it;
        if (!inserted) {
            const std::string where = current.empty() ? key : current + "." + key;
            fail_line(line_no, "duplicate key '" + where + "'");
        }
    }
    return cfg;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace levyfields
