#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace numgame {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Strict parse of a whole field; throws Parse naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
int parse_int(std::string_view text, std::string_view what);

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim(std::string_view text) noexcept;

} // namespace numgame
