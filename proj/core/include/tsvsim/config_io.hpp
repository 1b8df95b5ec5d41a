#pragma once

// Flat `key = value` text, used for config files, ledger headers and run
// manifests. Blank lines and lines starting with '#' are ignored.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsvsim {

/// Malformed input; carries the 1-based line number when known.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& source, std::size_t line, const std::string& message);

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string source_;
    std::size_t line_;
};

class KeyValues {
  public:
    void set(std::string key, std::string value);
    std::optional<std::string> get(std::string_view key) const;
    std::string require(std::string_view key, const std::string& source = "config") const;
    bool contains(std::string_view key) const { return get(key).has_value(); }

    const std::vector<std::pair<std::string, std::string>>& items() const noexcept { return items_; }

  private:
    std::vector<std::pair<std::string, std::string>> items_;
};

KeyValues parse_key_values(std::istream& in, const std::string& source);
KeyValues parse_key_values(std::string_view text, const std::string& source);

/// Parses one `key = value` line; returns nullopt for blank/comment lines.
std::optional<std::pair<std::string, std::string>> parse_key_value_line(std::string_view line,
                                                                        const std::string& source,
                                                                        std::size_t line_number);

/// `key = value` lines, each prefixed by `prefix` (e.g. "# ").
std::string format_key_values(const KeyValues& kv, std::string_view prefix = "");

double parse_double(std::string_view text, const std::string& source, std::size_t line, std::string_view what);
long long parse_integer(std::string_view text, const std::string& source, std::size_t line, std::string_view what);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

std::string_view trim(std::string_view s);

}  // namespace tsvsim
