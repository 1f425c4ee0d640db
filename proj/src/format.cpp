#include "forage/format.h"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace forage {

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

}  // namespace forage
