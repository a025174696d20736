#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ftc {

/// Shortest-exact rendering: 17 significant digits, `nan` for NaN.
std::string format_real(double v);
/// Parses a full string as a real (accepts `nan`, `inf`); throws ConfigError.
double parse_real(std::string_view s);
long long parse_integer(std::string_view s);
bool parse_bool(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace ftc
