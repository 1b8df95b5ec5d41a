#include "tsvsim/config_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <sstream>

#include <fmt/format.h>

namespace tsvsim {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("{}:{}: {}", source, line, message)
                                  : fmt::format("{}: {}", source, message)),
      source_(source),
      line_(line) {}

void KeyValues::set(std::string key, std::string value) {
    for (auto& [k, v] : items_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    items_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValues::get(std::string_view key) const {
    for (const auto& [k, v] : items_) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

std::string KeyValues::require(std::string_view key, const std::string& source) const {
    auto v = get(key);
    if (!v) {
        throw ParseError(source, 0, fmt::format("missing required key '{}'", key));
    }
    return *v;
}

std::string_view trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::optional<std::pair<std::string, std::string>> parse_key_value_line(std::string_view line,
                                                                        const std::string& source,
                                                                        std::size_t line_number) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') {
        return std::nullopt;
    }
    auto eq = t.find('=');
    if (eq == std::string_view::npos) {
        throw ParseError(source, line_number, fmt::format("expected 'key = value', got '{}'", t));
    }
    auto key = trim(t.substr(0, eq));
    auto value = trim(t.substr(eq + 1));
    if (key.empty()) {
        throw ParseError(source, line_number, "empty key");
    }
    return std::make_pair(std::string(key), std::string(value));
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
    KeyValues kv;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto item = parse_key_value_line(line, source, n)) {
            kv.set(std::move(item->first), std::move(item->second));
        }
    }
    return kv;
}

KeyValues parse_key_values(std::string_view text, const std::string& source) {
    std::istringstream in{std::string(text)};
    return parse_key_values(in, source);
}

std::string format_key_values(const KeyValues& kv, std::string_view prefix) {
    std::string out;
    for (const auto& [k, v] : kv.items()) {
        out += fmt::format("{}{} = {}\n", prefix, k, v);
    }
    return out;
}

double parse_double(std::string_view text, const std::string& source, std::size_t line, std::string_view what) {
    auto t = trim(text);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(value)) {
        throw ParseError(source, line, fmt::format("invalid number for {}: '{}'", what, t));
    }
    return value;
}

long long parse_integer(std::string_view text, const std::string& source, std::size_t line, std::string_view what) {
    auto t = trim(text);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ParseError(source, line, fmt::format("invalid integer for {}: '{}'", what, t));
    }
    return value;
}

std::string format_double(double x) {
    return fmt::format("{}", x);
}

}  // namespace tsvsim
