#pragma once

#include <string>
#include <string_view>

namespace sbt {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

/// Parses a full string as a double; throws ConfigError on trailing junk.
double parse_double(std::string_view text);

long long parse_integer(std::string_view text);

}  // namespace sbt
