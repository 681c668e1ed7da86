#pragma once

#include <fstream>
#include <map>
#include <string>
#include <variant>

#include "wulff/errors.hpp"

namespace wulff {

/// Minimal TOML subset for flat config files: comments, [section] headers
/// (flattened to "section.key"), and string / bool / integer / float
/// values. Arrays and dates are out of scope.
struct TomlValue {
    std::variant<std::string, bool, double> v;
    bool is_string() const { return std::holds_alternative<std::string>(v); }
    bool is_bool() const { return std::holds_alternative<bool>(v); }
    bool is_number() const { return std::holds_alternative<double>(v); }
    const std::string& as_string() const { return std::get<std::string>(v); }
    bool as_bool() const { return std::get<bool>(v); }
    double as_number() const { return std::get<double>(v); }
};

using TomlTable = std::map<std::string, TomlValue>;

namespace detail {

inline std::string toml_trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline TomlTable parse_toml(std::istream& in) {
    TomlTable table;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool in_str = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') {
                in_str = !in_str;
            } else if (line[i] == '#' && !in_str) {
                line = line.substr(0, i);
                break;
            }
        }
        line = detail::toml_trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError("toml line " + std::to_string(lineno) + ": bad section");
            section = detail::toml_trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("toml line " + std::to_string(lineno) + ": expected key = value");
        std::string key = detail::toml_trim(line.substr(0, eq));
        std::string val = detail::toml_trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ParseError("toml line " + std::to_string(lineno) + ": empty key or value");
        if (!section.empty()) key = section + "." + key;

        TomlValue tv;
        if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"')
                throw ParseError("toml line " + std::to_string(lineno) + ": unterminated string");
            tv.v = val.substr(1, val.size() - 2);
        } else if (val == "true" || val == "false") {
            tv.v = (val == "true");
        } else {
            try {
                std::size_t used = 0;
                const double d = std::stod(val, &used);
                if (used != val.size()) throw std::invalid_argument(val);
                tv.v = d;
            } catch (const std::exception&) {
                throw ParseError("toml line " + std::to_string(lineno) + ": bad value '" + val +
                                 "'");
            }
        }
        table[key] = tv;
    }
    return table;
}

inline TomlTable parse_toml_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingRunError("cannot open config " + path);
    return parse_toml(in);
}

}  // namespace wulff
