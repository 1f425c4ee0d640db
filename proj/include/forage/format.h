#pragma once

#include <string>

namespace forage {

/// Shortest decimal that parses back to exactly `v`.
std::string shortest(double v);

/// Inverse of shortest(); throws std::invalid_argument on junk.
double parse_double(const std::string& s);

}  // namespace forage
