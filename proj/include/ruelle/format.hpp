#pragma once

#include <charconv>
#include <string>

#include "ruelle/core.hpp"

namespace ruelle {

// 17 significant digits, '.' decimal point, locale-independent.
inline std::string format_real(Real v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace ruelle
