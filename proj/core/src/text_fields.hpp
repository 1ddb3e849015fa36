#pragma once

// Helpers for the "kind key=value key=value" record lines used by the trace
// and audit formats.

#include <charconv>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sparcas/money.hpp"
#include "sparcas/workspace.hpp"

namespace sparcas::detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(pos));
            break;
        }
        lines.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    return lines;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    size_t pos = 0;
    while (true) {
        size_t end = s.find(sep, pos);
        if (end == std::string_view::npos) {
            parts.push_back(s.substr(pos));
            return parts;
        }
        parts.push_back(s.substr(pos, end - pos));
        pos = end + 1;
    }
}

// Comma-separated list; "-" is the empty list.
inline std::vector<std::string_view> split_list(std::string_view s) {
    if (s == "-" || s.empty()) {
        return {};
    }
    return split(s, ',');
}

inline long long to_int(std::string_view token, int line, const char* field) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        throw ParseError(line, field, "expected an integer, got '" + std::string(token) + "'");
    }
    return value;
}

inline Money to_money(std::string_view token, int line, const char* field) {
    try {
        return parse_money(token);
    } catch (const std::invalid_argument& e) {
        throw ParseError(line, field, e.what());
    }
}

class FieldLine {
public:
    FieldLine(std::string_view line, int line_no)
            : _line_no(line_no) {
        auto tokens = split(line, ' ');
        if (tokens.empty() || tokens[0].empty()) {
            throw ParseError(line_no, "kind", "empty record");
        }
        _kind = tokens[0];
        for (size_t i = 1; i < tokens.size(); ++i) {
            if (tokens[i].empty()) {
                continue;
            }
            auto eq = tokens[i].find('=');
            if (eq == std::string_view::npos) {
                throw ParseError(line_no, std::string(tokens[i]), "expected key=value");
            }
            _fields.emplace(tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
        }
    }

    std::string_view kind() const { return _kind; }
    bool has(std::string_view key) const { return _fields.contains(key); }

    std::string_view get(std::string_view key) const {
        auto it = _fields.find(key);
        if (it == _fields.end()) {
            throw ParseError(_line_no, std::string(key), "missing field");
        }
        return it->second;
    }
    long long get_int(std::string_view key) const {
        std::string k(key);
        return to_int(get(key), _line_no, k.c_str());
    }
    Money get_money(std::string_view key) const {
        std::string k(key);
        return to_money(get(key), _line_no, k.c_str());
    }
    const std::map<std::string_view, std::string_view, std::less<>>& fields() const { return _fields; }

private:
    int _line_no;
    std::string_view _kind;
    std::map<std::string_view, std::string_view, std::less<>> _fields;
};

}  // namespace sparcas::detail
