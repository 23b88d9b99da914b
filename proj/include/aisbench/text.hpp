#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aisbench::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);
std::string join(const std::vector<std::string>& parts, std::string_view separator);
bool starts_with_icase(std::string_view s, std::string_view prefix);

/// Shortest decimal representation that parses back to the same double.
std::string shortest(double value);
/// Fixed-point rendering with `decimals` digits after the point.
std::string fixed(double value, int decimals);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

/// Minutes since midnight rendered as HH:MM.
std::string hhmm(int minute_of_day);
/// Parses HH:MM (or HH:MM:SS, seconds ignored) into minutes since midnight.
std::optional<int> parse_hhmm(std::string_view s);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: temp file then rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

} // namespace aisbench::text
