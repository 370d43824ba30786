#pragma once

#include <charconv>
#include <cstddef>
#include <string>
#include <system_error>

namespace resalloc {

/// Shortest decimal form that parses back to the same double. Locale-free.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_size(std::size_t v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace resalloc
